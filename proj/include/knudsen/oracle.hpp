#pragma once

// Discrete-ordinates solver of the slab problem
//
//   (mu + U) dh/dx + h = (1/sqrt(pi)) Int e^{-mu'^2} q(mu, mu') h(x, mu') d mu',
//   h(0, mu) = prescribed for mu + U > 0,   h(L, mu) = 0 for mu + U < 0,
//
// used as an independent check of the analytic jumps. Nothing here calls the
// analytic engine: the kernel, the quadrature and the transport sweep are all
// local. The collision term only sees three moments, so the default solves the
// moment system directly; plain source iteration is kept as an alternative.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "knudsen/errors.hpp"

namespace knudsen {

enum class OracleMethod { Direct, SourceIteration };

struct OracleOptions {
  int nodes = 128;             ///< mu ordinates, split evenly over 4 Gauss-Legendre panels
  double L = 30.0;             ///< slab length (mean free paths)
  int cells = 400;             ///< x cells
  double grading = 8.0;        ///< x = L (e^{g s} - 1)/(e^g - 1), s uniform
  double mu_margin = 6.0;      ///< ordinates span [-|U| - margin, |U| + margin]
  OracleMethod method = OracleMethod::Direct;
  int max_iterations = 20000;  ///< source iteration only
  double tolerance = 1e-10;    ///< source iteration: successive max-norm change
  double max_condition = 1e10;
  bool double_L = true;        ///< rerun the fit on a 2L slab
};

struct OrdinateGrid {
  double U = 0.0;
  std::vector<double> mu;
  std::vector<double> w;  ///< includes e^{-mu^2}
  std::vector<double> x;
  double L = 0.0;
};

inline OrdinateGrid make_ordinate_grid(double U, const OracleOptions& opt = {}) {
  if (opt.nodes < 8 || opt.nodes % 4 != 0) throw std::invalid_argument("oracle: nodes must be a multiple of 4");
  if (!(opt.L > 0.0) || opt.cells < 4) throw std::invalid_argument("oracle: need L > 0 and at least 4 cells");
  OrdinateGrid g;
  g.U = U;
  g.L = opt.L;
  const double cut = std::abs(U) + opt.mu_margin;
  // two panels on each side of mu = -U so no ordinate sits at zero speed
  const double edges[] = {-cut, 0.5 * (-cut - U), -U, 0.5 * (-U + cut), cut};
  const int per = opt.nodes / 4;
  for (int p = 0; p < 4; ++p) {
    const double a = edges[p], b = edges[p + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    // Golub-Welsch via Eigen keeps the panel order arbitrary
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(per, per);
    for (int i = 1; i < per; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    for (int i = 0; i < per; ++i) {
      const double t = es.eigenvalues()(i);
      const double wt = 2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
      const double m = mid + half * t;
      g.mu.push_back(m);
      g.w.push_back(half * wt * std::exp(-m * m));
    }
  }
  g.x.resize(opt.cells + 1);
  const double e = std::expm1(opt.grading);
  for (int k = 0; k <= opt.cells; ++k) g.x[k] = opt.L * std::expm1(opt.grading * k / opt.cells) / e;
  g.x.back() = opt.L;
  return g;
}

/// h on the grid plus its three moments
///   m0 = (1/sqrt(pi)) sum w h,  m1 = (1/sqrt(pi)) sum w mu h,  m2 = (1/sqrt(pi)) sum w (mu^2 - 1/2) h.
struct SlabField {
  std::size_t nx = 0, nmu = 0;
  std::vector<double> h;  ///< h[k * nmu + i]
  std::array<std::vector<double>, 3> m;
  int iterations = 0;

  double at(std::size_t k, std::size_t i) const { return h[k * nmu + i]; }
};

namespace oracle_detail {

inline constexpr double inv_sqrt_pi = std::numbers::inv_sqrtpi;

inline double phi(int j, double mu) { return j == 0 ? 1.0 : j == 1 ? 2.0 * mu : 2.0 * (mu * mu - 0.5); }
inline double psi(int j, double mu) { return j == 0 ? 1.0 : j == 1 ? mu : mu * mu - 0.5; }

// Cell coefficients of the exact exponential step with linear source:
// h_out = E h_in + A S_in + B S_out.
struct Step {
  double E, A, B;
};

inline Step step(double tau) {
  if (tau < 1e-4) {
    const double E = std::exp(-tau);
    return {E, tau / 2.0 - tau * tau / 3.0 + tau * tau * tau / 8.0, tau / 2.0 - tau * tau / 6.0 + tau * tau * tau / 24.0};
  }
  const double E = std::exp(-tau);
  const double alpha = -std::expm1(-tau) / tau;
  return {E, alpha - E, 1.0 - alpha};
}

class Sweeper {
 public:
  explicit Sweeper(const OrdinateGrid& g) : g_(g), nx_(g.x.size()), nmu_(g.mu.size()) {
    steps_.resize((nx_ - 1) * nmu_);
    for (std::size_t i = 0; i < nmu_; ++i) {
      const double c = std::abs(g.mu[i] + g.U);
      for (std::size_t k = 0; k + 1 < nx_; ++k) steps_[i * (nx_ - 1) + k] = step((g.x[k + 1] - g.x[k]) / c);
    }
  }

  std::size_t nx() const { return nx_; }
  std::size_t nmu() const { return nmu_; }
  const Step& st(std::size_t i, std::size_t k) const { return steps_[i * (nx_ - 1) + k]; }

  /// Transport sweep for source S[k * nmu + i] and wall inflow bc[i] (used where mu + U > 0).
  void sweep(const std::vector<double>& S, const std::vector<double>& bc, std::vector<double>& h) const {
    h.assign(nx_ * nmu_, 0.0);
    for (std::size_t i = 0; i < nmu_; ++i) {
      if (g_.mu[i] + g_.U > 0.0) {
        double v = bc[i];
        h[i] = v;
        for (std::size_t k = 0; k + 1 < nx_; ++k) {
          const Step& s = st(i, k);
          v = s.E * v + s.A * S[k * nmu_ + i] + s.B * S[(k + 1) * nmu_ + i];
          h[(k + 1) * nmu_ + i] = v;
        }
      } else {
        double v = 0.0;
        h[(nx_ - 1) * nmu_ + i] = v;
        for (std::size_t k = nx_ - 1; k-- > 0;) {
          const Step& s = st(i, k);
          v = s.E * v + s.A * S[(k + 1) * nmu_ + i] + s.B * S[k * nmu_ + i];
          h[k * nmu_ + i] = v;
        }
      }
    }
  }

  std::array<std::vector<double>, 3> moments(const std::vector<double>& h) const {
    std::array<std::vector<double>, 3> m;
    for (auto& v : m) v.assign(nx_, 0.0);
    for (std::size_t k = 0; k < nx_; ++k) {
      for (std::size_t i = 0; i < nmu_; ++i) {
        const double wh = g_.w[i] * h[k * nmu_ + i] * inv_sqrt_pi;
        const double mu = g_.mu[i];
        m[0][k] += wh;
        m[1][k] += wh * mu;
        m[2][k] += wh * (mu * mu - 0.5);
      }
    }
    return m;
  }

  std::vector<double> source(const std::array<std::vector<double>, 3>& m) const {
    std::vector<double> S(nx_ * nmu_);
    for (std::size_t k = 0; k < nx_; ++k)
      for (std::size_t i = 0; i < nmu_; ++i) {
        const double mu = g_.mu[i];
        S[k * nmu_ + i] = m[0][k] + 2.0 * mu * m[1][k] + 2.0 * (mu * mu - 0.5) * m[2][k];
      }
    return S;
  }

  /// Moment response operator: moments of the sweep of a unit hat source in moment j at node k.
  Eigen::MatrixXd response() const {
    const std::size_t n = 3 * nx_;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> r(nx_);
    for (std::size_t i = 0; i < nmu_; ++i) {
      const double mu = g_.mu[i];
      std::array<std::array<double, 3>, 3> c{};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) c[a][b] = g_.w[i] * psi(a, mu) * phi(b, mu) * inv_sqrt_pi;
      const bool right = mu + g_.U > 0.0;
      for (std::size_t k = 0; k < nx_; ++k) {
        std::fill(r.begin(), r.end(), 0.0);
        std::size_t lo, hi;
        if (right) {
          if (k > 0) r[k] = st(i, k - 1).B;
          if (k + 1 < nx_) {
            r[k + 1] = st(i, k).E * r[k] + st(i, k).A;
            for (std::size_t m = k + 1; m + 1 < nx_; ++m) r[m + 1] = st(i, m).E * r[m];
          }
          lo = k;
          hi = nx_;
        } else {
          if (k + 1 < nx_) r[k] = st(i, k).B;
          if (k > 0) {
            r[k - 1] = st(i, k - 1).E * r[k] + st(i, k - 1).A;
            for (std::size_t m = k - 1; m-- > 0;) r[m] = st(i, m).E * r[m + 1];
          }
          lo = 0;
          hi = k + 1;
        }
        for (std::size_t m = lo; m < hi; ++m) {
          if (r[m] == 0.0) continue;
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) A(a * nx_ + m, b * nx_ + k) += c[a][b] * r[m];
        }
      }
    }
    return A;
  }

 private:
  const OrdinateGrid& g_;
  std::size_t nx_, nmu_;
  std::vector<Step> steps_;
};

}  // namespace oracle_detail

/// Wall data of the three basis problems: 1, mu^2 - 1/2, -2 U mu.
enum class BasisElement { Density, Temperature, Drift };

inline std::vector<double> basis_inflow(BasisElement e, const OrdinateGrid& g) {
  std::vector<double> bc(g.mu.size());
  for (std::size_t i = 0; i < bc.size(); ++i) {
    const double mu = g.mu[i];
    bc[i] = e == BasisElement::Density ? 1.0 : e == BasisElement::Temperature ? mu * mu - 0.5 : -2.0 * g.U * mu;
  }
  return bc;
}

/// Solves the slab problem for several wall inflows sharing one operator.
class SlabSolver {
 public:
  SlabSolver(const OrdinateGrid& g, const OracleOptions& opt) : g_(g), opt_(opt), sw_(g) {
    if (opt_.method == OracleMethod::Direct) {
      const Eigen::MatrixXd A = sw_.response();
      lu_.compute(Eigen::MatrixXd::Identity(A.rows(), A.cols()) - A);
    }
  }

  SlabField solve(const std::vector<double>& bc) const {
    const std::size_t nx = sw_.nx(), nmu = sw_.nmu();
    SlabField f;
    f.nx = nx;
    f.nmu = nmu;
    std::vector<double> h;
    const std::vector<double> zero(nx * nmu, 0.0);
    sw_.sweep(zero, bc, h);
    auto m = sw_.moments(h);
    if (opt_.method == OracleMethod::Direct) {
      Eigen::VectorXd b(3 * nx);
      for (int j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < nx; ++k) b(j * nx + k) = m[j][k];
      const Eigen::VectorXd sol = lu_.solve(b);
      for (int j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < nx; ++k) m[j][k] = sol(j * nx + k);
      f.iterations = 1;
    } else {
      double change = 0.0;
      int it = 0;
      for (; it < opt_.max_iterations; ++it) {
        sw_.sweep(sw_.source(m), bc, h);
        auto next = sw_.moments(h);
        change = 0.0;
        for (int j = 0; j < 3; ++j)
          for (std::size_t k = 0; k < nx; ++k) change = std::max(change, std::abs(next[j][k] - m[j][k]));
        m = std::move(next);
        if (change < opt_.tolerance) break;
      }
      if (change >= opt_.tolerance) {
        throw NonConvergence("oracle: source iteration stopped at " + std::to_string(it) +
                                 " iterations, last change " + std::to_string(change),
                             change, it);
      }
      f.iterations = it + 1;
    }
    sw_.sweep(sw_.source(m), bc, f.h);
    f.m = sw_.moments(f.h);
    return f;
  }

  SlabField solve(BasisElement e) const { return solve(basis_inflow(e, g_)); }

 private:
  const OrdinateGrid& g_;
  OracleOptions opt_;
  oracle_detail::Sweeper sw_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

inline SlabField solve_basis(double U, const OrdinateGrid& g, BasisElement e, const OracleOptions& opt = {}) {
  if (g.U != U) throw std::invalid_argument("oracle: grid built for a different U");
  return SlabSolver(g, opt).solve(e);
}

struct OracleSolution {
  double U = 0.0;
  double L = 0.0;
  int nodes = 0;
  int cells = 0;
  double eps_T_fit = 0.0;
  double eps_rho_fit = 0.0;
  double farfield_residual = 0.0;  ///< ((1/sqrt(pi)) Int e^{-mu^2} h(L, mu)^2)^{1/2}
  int iterations = 0;
  std::string method;
  /// Fit on the 2L slab and the largest relative change of the two jumps.
  double eps_T_2L = 0.0, eps_rho_2L = 0.0, L_sensitivity = 0.0;
  OrdinateGrid grid;
  SlabField field;
};

namespace oracle_detail {

struct BasisSet {
  SlabField rho, T, drift;
};

inline BasisSet basis_fields(const OrdinateGrid& g, const OracleOptions& opt) {
  const SlabSolver s(g, opt);
  return {s.solve(BasisElement::Density), s.solve(BasisElement::Temperature), s.solve(BasisElement::Drift)};
}

inline SlabField combine(const BasisSet& b, double eps_rho, double eps_T) {
  SlabField f = b.drift;
  for (std::size_t n = 0; n < f.h.size(); ++n) f.h[n] += eps_rho * b.rho.h[n] + eps_T * b.T.h[n];
  for (int j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < f.nx; ++k) f.m[j][k] += eps_rho * b.rho.m[j][k] + eps_T * b.T.m[j][k];
  f.iterations = b.rho.iterations + b.T.iterations + b.drift.iterations;
  return f;
}

// weighted rms: fast ordinates carry wall data across the slab but no mass
inline double farfield(const OrdinateGrid& g, const SlabField& f) {
  double r = 0.0;
  for (std::size_t i = 0; i < f.nmu; ++i) r += g.w[i] * f.at(f.nx - 1, i) * f.at(f.nx - 1, i);
  return std::sqrt(r * inv_sqrt_pi);
}

// weighted least squares on h(L, .) over the given unknown columns
inline Eigen::VectorXd far_fit(const OrdinateGrid& g, const std::vector<const SlabField*>& cols, const SlabField& rhs,
                               double max_condition) {
  const std::size_t n = cols.size(), last = g.x.size() - 1, nmu = g.mu.size();
  Eigen::MatrixXd M(nmu, n);
  Eigen::VectorXd r(nmu);
  for (std::size_t i = 0; i < nmu; ++i) {
    const double sw = std::sqrt(g.w[i]);
    for (std::size_t c = 0; c < n; ++c) M(i, c) = sw * cols[c]->at(last, i);
    r(i) = -sw * rhs.at(last, i);
  }
  const Eigen::MatrixXd N = M.transpose() * M;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(N);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(cond <= max_condition)) {
    throw IllConditioned("oracle: far-field normal system has condition " + std::to_string(cond) +
                             " (slab too short?)",
                         cond);
  }
  return N.ldlt().solve(M.transpose() * r);
}

inline void fit_once(double U, const OracleOptions& opt, OrdinateGrid& grid, SlabField& field, double& eps_T,
                     double& eps_rho, int& iterations) {
  grid = make_ordinate_grid(U, opt);
  const BasisSet b = basis_fields(grid, opt);
  const Eigen::VectorXd c = far_fit(grid, {&b.rho, &b.T}, b.drift, opt.max_condition);
  eps_rho = c(0);
  eps_T = c(1);
  field = combine(b, eps_rho, eps_T);
  iterations = field.iterations;
}

inline double rel_change(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

}  // namespace oracle_detail

/// Fits (eps_rho, eps_T) so that the slab field vanishes at x = L, then
/// repeats on a 2L slab (twice the cells) for the sensitivity report.
inline OracleSolution fit_jumps(double U, const OracleOptions& opt = {}) {
  if (!(U > 0.0)) {
    throw RegimeError("oracle: jump fit needs an evaporation speed U > 0 (condensation leaves free parameters)");
  }
  OracleSolution s;
  s.U = U;
  s.L = opt.L;
  s.nodes = opt.nodes;
  s.cells = opt.cells;
  s.method = opt.method == OracleMethod::Direct ? "direct" : "source-iteration";
  oracle_detail::fit_once(U, opt, s.grid, s.field, s.eps_T_fit, s.eps_rho_fit, s.iterations);
  s.farfield_residual = oracle_detail::farfield(s.grid, s.field);
  if (opt.double_L) {
    OracleOptions o2 = opt;
    o2.L = 2.0 * opt.L;
    o2.cells = 2 * opt.cells;
    OrdinateGrid g2;
    SlabField f2;
    int it2 = 0;
    oracle_detail::fit_once(U, o2, g2, f2, s.eps_T_2L, s.eps_rho_2L, it2);
    s.L_sensitivity = std::max(oracle_detail::rel_change(s.eps_T_fit, s.eps_T_2L),
                               oracle_detail::rel_change(s.eps_rho_fit, s.eps_rho_2L));
  }
  return s;
}

/// One-parameter condensation: eps_rho fixed, eps_T fitted.
inline OracleSolution fit_eps_T(double U, double eps_rho, const OracleOptions& opt = {}) {
  OracleSolution s;
  s.U = U;
  s.L = opt.L;
  s.nodes = opt.nodes;
  s.cells = opt.cells;
  s.method = opt.method == OracleMethod::Direct ? "direct" : "source-iteration";
  s.grid = make_ordinate_grid(U, opt);
  const auto b = oracle_detail::basis_fields(s.grid, opt);
  SlabField rhs = oracle_detail::combine(b, eps_rho, 0.0);
  const Eigen::VectorXd c = oracle_detail::far_fit(s.grid, {&b.T}, rhs, opt.max_condition);
  s.eps_rho_fit = eps_rho;
  s.eps_T_fit = c(0);
  s.field = oracle_detail::combine(b, eps_rho, s.eps_T_fit);
  s.iterations = s.field.iterations;
  s.farfield_residual = oracle_detail::farfield(s.grid, s.field);
  return s;
}

/// Slab field for a supplied pair; the far-field residual tells whether the pair decays.
inline OracleSolution check_pair(double U, double eps_T, double eps_rho, const OracleOptions& opt = {}) {
  OracleSolution s;
  s.U = U;
  s.L = opt.L;
  s.nodes = opt.nodes;
  s.cells = opt.cells;
  s.method = opt.method == OracleMethod::Direct ? "direct" : "source-iteration";
  s.grid = make_ordinate_grid(U, opt);
  const auto b = oracle_detail::basis_fields(s.grid, opt);
  s.eps_T_fit = eps_T;
  s.eps_rho_fit = eps_rho;
  s.field = oracle_detail::combine(b, eps_rho, eps_T);
  s.iterations = s.field.iterations;
  s.farfield_residual = oracle_detail::farfield(s.grid, s.field);
  return s;
}

struct OracleProfile {
  std::vector<double> x, rho_ratio, u, t_ratio, identity1_residual, identity2_residual;
};

/// Moments of the slab field: rho/rho_inf = 1 + m0, U(x) = U + m1, T/T_inf = 1 + 2 m2.
inline OracleProfile oracle_profiles(const OracleSolution& s) {
  OracleProfile p;
  const double U = s.U;
  for (std::size_t k = 0; k < s.field.nx; ++k) {
    const double rho = 1.0 + s.field.m[0][k];
    const double u = U + s.field.m[1][k];
    const double t = 1.0 + 2.0 * s.field.m[2][k];
    p.x.push_back(s.grid.x[k]);
    p.rho_ratio.push_back(rho);
    p.u.push_back(u);
    p.t_ratio.push_back(t);
    p.identity1_residual.push_back(rho + u / U - 2.0);
    p.identity2_residual.push_back(t - 1.0 - 2.0 * (U * U - 0.5) * (rho - 1.0));
  }
  return p;
}

/// Linear interpolation of an oracle profile column at x.
inline double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.begin()) return ys.front();
  if (it == xs.end()) return ys.back();
  const std::size_t k = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
  return ys[k - 1] + t * (ys[k] - ys[k - 1]);
}

}  // namespace knudsen
