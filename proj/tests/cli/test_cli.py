"""End-to-end checks of the knudsen_jump command line.

Usage: test_cli.py BINARY SCHEMA_DIR [unittest args]
"""

import csv
import io
import json
import math
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

BINARY = ""
SCHEMAS = ""


def run(*args, env=None):
    e = dict(os.environ)
    if env:
        e.update(env)
    p = subprocess.run([BINARY, *args], capture_output=True, env=e, timeout=600)
    return p.returncode, p.stdout.decode(), p.stderr.decode()


def schema(name):
    with open(os.path.join(SCHEMAS, f"{name}.schema.json")) as f:
        return json.load(f)


def validate(doc, name):
    jsonschema.validate(doc, schema(name), cls=jsonschema.Draft202012Validator)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class Jumps(unittest.TestCase):
    def test_degenerate_speed(self):
        code, out, _ = run("jumps", "--speed", "0.70710678")
        self.assertEqual(code, 0)
        doc = json.loads(out)
        validate(doc, "jumps")
        self.assertEqual(doc["regime"], "DegenerateHalfSqrt2")
        self.assertAlmostEqual(doc["eps_T"], 0.8864, delta=2e-3)
        self.assertAlmostEqual(doc["v1"], 3.0095, delta=2e-3)
        self.assertAlmostEqual(doc["v_at_u"], 1.8376, delta=2e-3)

    def test_no_solution(self):
        code, out, _ = run("jumps", "--speed", "2.0")
        self.assertEqual(code, 2)
        doc = json.loads(out)
        validate(doc, "jumps")
        self.assertEqual(doc["regime"], "NoSolution")
        self.assertEqual(doc["status"], "no_solution")
        self.assertIsNone(doc["eps_T"])
        self.assertIsNone(doc["eps_rho"])

    def test_one_parameter_condensation(self):
        code, out, _ = run("jumps", "--speed", "-0.5", "--eps-rho", "0.0")
        self.assertEqual(code, 0)
        doc = json.loads(out)
        validate(doc, "jumps")
        self.assertEqual(doc["regime"], "OneParameterCondensation")
        self.assertEqual(doc["eps_rho"], 0.0)
        self.assertTrue(all(abs(r["residual"]) < 1e-8 for r in doc["residuals"]))

    def test_missing_free_parameter(self):
        code, out, _ = run("jumps", "--speed", "-0.5")
        self.assertEqual(code, 2)
        doc = json.loads(out)
        validate(doc, "jumps")
        self.assertEqual(doc["status"], "needs_free_parameters")

    def test_regime_boundary(self):
        code, out, _ = run("jumps", "--speed", "0")
        self.assertEqual(code, 2)
        doc = json.loads(out)
        validate(doc, "jumps")
        self.assertEqual(doc["status"], "regime_error")

    def test_flag_errors(self):
        self.assertEqual(run("jumps", "--sped", "1")[0], 1)
        self.assertEqual(run("jumps")[0], 1)
        self.assertEqual(run("jumps", "--speed", "abc")[0], 1)
        self.assertEqual(run("jumps", "--speed", "0.5", "--format", "xml")[0], 1)
        self.assertEqual(run()[0], 1)
        self.assertEqual(run("scan", env={"KNUDSEN_JUMP_THREADS": "zero"})[0], 1)

    def test_csv_format(self):
        code, out, _ = run("jumps", "--speed", "0.3", "--format", "csv")
        self.assertEqual(code, 0)
        (row,) = rows(out)
        self.assertAlmostEqual(float(row["eps_T"]), 0.2994937, delta=1e-6)


class Scan(unittest.TestCase):
    def test_default_range(self):
        code, out, _ = run("scan", "--from", "0.05", "--to", "0.70", "--steps", "14")
        self.assertEqual(code, 0)
        r = rows(out)
        self.assertEqual(len(r), 14)
        us = [float(x["U"]) for x in r]
        self.assertEqual(us, sorted(us))
        for x in r:
            self.assertEqual(x["status"], "ok")
            self.assertLess(float(x["max_residual"]), 1e-8)

    def test_crossing_sonic_speed(self):
        code, out, _ = run("scan", "--from", "1.0", "--to", "1.5", "--steps", "6")
        self.assertEqual(code, 0)
        for x in rows(out):
            if float(x["U"]) > math.sqrt(1.5):
                self.assertEqual(x["regime"], "NoSolution")
                self.assertEqual(x["eps_T"], "")
            else:
                self.assertEqual(x["status"], "ok")

    def test_single_point_matches_jumps(self):
        _, out, _ = run("scan", "--speed", "0.70710678")
        (row,) = rows(out)
        _, j, _ = run("jumps", "--speed", "0.70710678")
        doc = json.loads(j)
        self.assertEqual(float(row["eps_T"]), doc["eps_T"])
        self.assertEqual(float(row["eps_rho"]), doc["eps_rho"])

    def test_json_and_threads(self):
        code, out, _ = run("scan", "--from", "-2", "--to", "2", "--steps", "9", "--eps-rho", "0.1", "--eps-t", "-0.1",
                           "--format", "json")
        self.assertEqual(code, 0)
        validate(json.loads(out), "scan")
        one = run("scan", "--steps", "6", env={"KNUDSEN_JUMP_THREADS": "1"})[1]
        four = run("scan", "--steps", "6", env={"KNUDSEN_JUMP_THREADS": "4"})[1]
        self.assertEqual(one, four)


class Profiles(unittest.TestCase):
    def test_identities(self):
        code, out, _ = run("profiles", "--speed", "0.5")
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[0], "x,rho_ratio,u,t_ratio,identity1_residual,identity2_residual")
        r = rows(out)
        self.assertEqual(len(r), 64)
        for x in r:
            self.assertLess(abs(float(x["identity1_residual"])), 1e-8)
            self.assertLess(abs(float(x["identity2_residual"])), 1e-8)

    def test_json(self):
        code, out, _ = run("profiles", "--speed", "1.0", "--xmax", "5", "--points", "10", "--format", "json")
        self.assertEqual(code, 0)
        doc = json.loads(out)
        validate(doc, "profiles")
        self.assertEqual(len(doc["x"]), 10)

    def test_no_solution(self):
        code, out, _ = run("profiles", "--speed", "2", "--format", "json")
        self.assertEqual(code, 2)
        validate(json.loads(out), "profiles")


class Dispersion(unittest.TestCase):
    def test_winding_at_one(self):
        code, out, _ = run("dispersion", "--speed", "1")
        self.assertEqual(code, 0)
        self.assertEqual(out.splitlines()[0], "mu,lambda,s,theta")
        r = rows(out)
        self.assertEqual(len(r), 200)
        self.assertAlmostEqual(float(r[-1]["theta"]), 2 * math.pi, delta=0.01)

    def test_json(self):
        code, out, _ = run("dispersion", "--speed", "-1", "--points", "20", "--mu-min", "-3", "--format", "json")
        self.assertEqual(code, 0)
        doc = json.loads(out)
        validate(doc, "dispersion")
        self.assertIsNone(doc["samples"][0]["theta"])


class Oracle(unittest.TestCase):
    def test_agrees_with_jumps(self):
        code, out, _ = run("oracle", "--speed", "0.3")
        self.assertEqual(code, 0)
        doc = json.loads(out)
        validate(doc, "oracle")
        j = json.loads(run("jumps", "--speed", "0.3")[1])
        self.assertLess(abs(doc["eps_T_fit"] / j["eps_T"] - 1), 0.01)
        self.assertLess(abs(doc["eps_rho_fit"] / j["eps_rho"] - 1), 0.01)
        self.assertEqual(doc["L"], 30.0)
        self.assertEqual(doc["nodes"], 128)

    def test_flags_and_errors(self):
        code, out, _ = run("oracle", "--speed", "0.5", "--slab-length", "10", "--nodes", "32", "--no-double-l")
        self.assertEqual(code, 0)
        doc = json.loads(out)
        self.assertEqual(doc["L"], 10.0)
        self.assertEqual(doc["nodes"], 32)
        code, out, _ = run("oracle", "--speed", "0.5", "--nodes", "32", "--method", "source-iteration",
                           "--max-iterations", "2", "--no-double-l")
        self.assertEqual(code, 3)
        doc = json.loads(out)
        validate(doc, "oracle")
        self.assertEqual(doc["status"], "numerical_error")
        code, out, _ = run("oracle", "--speed", "-2")
        self.assertEqual(code, 2)
        validate(json.loads(out), "oracle")
        self.assertEqual(run("oracle", "--speed", "2")[0], 2)

    def test_csv_profiles(self):
        code, out, _ = run("oracle", "--speed", "0.5", "--nodes", "64", "--cells", "200", "--no-double-l",
                           "--format", "csv")
        self.assertEqual(code, 0)
        r = rows(out)
        self.assertEqual(len(r), 201)
        for x in r:
            self.assertLess(abs(float(x["identity1_residual"])), 1e-3)


class Convert(unittest.TestCase):
    def test_round_trip(self):
        code, out, _ = run("convert", "--velocity", "100", "--temperature", "300", "--gas-constant", "287",
                           "--collision-frequency", "1e9", "--length", "1e-6")
        self.assertEqual(code, 0)
        doc = json.loads(out)
        validate(doc, "convert")
        self.assertAlmostEqual(doc["U"], 100 / math.sqrt(2 * 287 * 300), places=14)
        self.assertAlmostEqual(doc["x"], 1e-6 * 1e9 / math.sqrt(2 * 287 * 300), places=12)
        back = json.loads(run("convert", "--speed", repr(doc["U"]), "--temperature", "300", "--gas-constant", "287")[1])
        self.assertAlmostEqual(back["v_inf"], 100.0, places=10)

    def test_errors(self):
        self.assertEqual(run("convert", "--velocity", "1", "--temperature", "300")[0], 1)
        self.assertEqual(run("convert", "--velocity", "1", "--speed", "1", "--temperature", "3", "--gas-constant", "1")[0], 1)
        self.assertEqual(run("convert", "--velocity", "1", "--temperature", "-3", "--gas-constant", "1")[0], 1)


class Plumbing(unittest.TestCase):
    def test_print_config(self):
        code, out, _ = run("--print-config")
        self.assertEqual(code, 0)
        doc = json.loads(out)
        self.assertEqual(doc["oracle"]["slab_length"], 30.0)
        self.assertEqual(doc["oracle"]["nodes"], 128)
        code, out, _ = run("profiles", "--speed", "0.4", "--xmax", "7", "--print-config")
        doc = json.loads(out)
        self.assertEqual(doc["command"], "profiles")
        self.assertEqual(doc["xmax"], 7.0)
        self.assertEqual(doc["points"], 64)
        doc = json.loads(run("--print-config", env={"KNUDSEN_JUMP_THREADS": "3"})[1])
        self.assertEqual(doc["threads"], 3)

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "p.csv")
            code, out, _ = run("profiles", "--speed", "0.5", "--points", "8", "--output", path)
            self.assertEqual(code, 0)
            self.assertEqual(out, "")
            with open(path) as f:
                self.assertEqual(f.read(), run("profiles", "--speed", "0.5", "--points", "8")[1])

    def test_byte_identical(self):
        for args in (["jumps", "--speed", "0.45"], ["scan", "--steps", "5"], ["profiles", "--speed", "0.6"],
                     ["dispersion", "--speed", "1.2"], ["oracle", "--speed", "0.4", "--nodes", "32", "--no-double-l"]):
            a = subprocess.run([BINARY, *args], capture_output=True).stdout
            b = subprocess.run([BINARY, *args], capture_output=True).stdout
            self.assertEqual(a, b, args)


if __name__ == "__main__":
    BINARY, SCHEMAS = sys.argv[1], sys.argv[2]
    unittest.main(argv=[sys.argv[0], *sys.argv[3:]], verbosity=2)
