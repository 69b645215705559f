#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "knudsen/errors.hpp"

namespace knudsen {

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_panels = 2000;
  /// Error estimate still accepted once max_panels is spent; covers integrands
  /// whose rounding noise sits above the requested tolerance.
  double floor = 0.0;
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  int panels = 0;
  bool converged = false;
};

namespace detail {

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
};

template <class F>
auto kronrod_panel(F& f, double a, double b) {
  using R = std::invoke_result_t<F&, double>;
  double err = 0.0;
  // the affine node map can round a node just outside a very short panel
  auto inside = [&f, a, b](double t) { return f(std::clamp(t, a, b)); };
  R v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(inside, a, b, 0, 0.0, &err);
  // the non-adaptive call reports |K - G| for the rule mapped to [-1, 1]
  return Panel<R>{a, b, v, err * 0.5 * (b - a)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration over [breaks.front(), breaks.back()],
/// with the interior breakpoints kept as panel boundaries. The panel with
/// the largest error estimate is bisected until the summed error falls below
/// max(abs_tol, rel_tol * |value|) or max_panels is reached.
template <class F>
auto integrate(F&& f, std::span<const double> breaks, const QuadOptions& opt = {})
    -> QuadResult<std::invoke_result_t<F&, double>> {
  using R = std::invoke_result_t<F&, double>;
  using detail::Panel;
  std::vector<Panel<R>> heap;
  auto by_error = [](const Panel<R>& x, const Panel<R>& y) { return x.error < y.error; };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) heap.push_back(detail::kronrod_panel(f, breaks[i], breaks[i + 1]));
  }
  std::make_heap(heap.begin(), heap.end(), by_error);

  auto totals = [&heap] {
    R v{};
    double e = 0.0;
    for (const auto& p : heap) {
      v += p.value;
      e += p.error;
    }
    return std::pair{v, e};
  };

  auto [value, error] = totals();
  while (!heap.empty() && error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value)) &&
         static_cast<int>(heap.size()) < opt.max_panels) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel<R> worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push_back(worst);
      break;  // panel width at machine resolution
    }
    const Panel<R> left = detail::kronrod_panel(f, worst.a, mid);
    const Panel<R> right = detail::kronrod_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
  std::tie(value, error) = totals();
  QuadResult<R> out;
  out.value = value;
  out.error = error;
  out.panels = static_cast<int>(heap.size());
  out.converged = error <= std::max({opt.abs_tol, opt.rel_tol * std::abs(value), opt.floor});
  return out;
}

template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  const double breaks[2] = {a, b};
  return integrate(std::forward<F>(f), std::span<const double>(breaks, 2), opt);
}

/// Returns the value or throws NumericalError carrying the achieved estimate.
template <class T>
T require_converged(const QuadResult<T>& r, const std::string& what) {
  if (!r.converged) {
    throw NumericalError(what + ": quadrature did not converge (error estimate " +
                             std::to_string(r.error) + ")",
                         r.error);
  }
  return r.value;
}

/// Int_a^b f(t) / (t - z) dt. For real z strictly inside (a, b) this is the
/// Cauchy principal value. Evaluated by subtracting f(z0), z0 = clamp(Re z),
/// and adding f(z0) times the closed-form log integral, so the remaining
/// integrand is bounded even when z approaches the segment.
template <class F>
std::complex<double> cauchy_integral(F&& f, double a, double b, std::complex<double> z,
                                     std::span<const double> extra_breaks,
                                     const QuadOptions& opt, const char* what = "cauchy_integral") {
  using C = std::complex<double>;
  const double z0 = std::clamp(z.real(), a, b);
  const auto f0 = f(z0);
  const bool on_segment = z.imag() == 0.0 && z.real() > a && z.real() < b;

  std::vector<double> breaks{a, b};
  for (double x : extra_breaks)
    if (x > a && x < b) breaks.push_back(x);
  if (z0 > a && z0 < b) breaks.push_back(z0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  C log_term;
  if (on_segment) {
    log_term = std::log((b - z.real()) / (z.real() - a));
  } else if (z.imag() == 0.0) {
    log_term = std::log((b - z.real()) / (a - z.real()));
  } else {
    log_term = std::log(C(b) - z) - std::log(C(a) - z);
  }

  if (z.imag() == 0.0) {
    using T = std::decay_t<decltype(f0)>;
    const double zr = z.real();
    auto g = [&](double t) -> T { return t == zr ? T{} : (f(t) - f0) / (t - zr); };
    const T v = require_converged(integrate(g, std::span<const double>(breaks), opt), what);
    return C(v) + C(f0) * log_term;
  }
  auto gc = [&](double t) { return C(f(t) - f0) / (C(t) - z); };
  const C v = require_converged(integrate(gc, std::span<const double>(breaks), opt), what);
  return v + C(f0) * log_term;
}

}  // namespace knudsen
