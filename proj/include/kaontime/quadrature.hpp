#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "kaontime/errors.hpp"

// Semi-infinite quadrature used as the independent numerical oracle for the
// closed-form integrals. The change of variables u = exp(-scale*t) maps
// [0,inf) to (0,1]; the transformed integrand is then handled by adaptive
// Gauss-Kronrod 15(7) bisection.

namespace kaontime {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 15(7) nodes and weights on [-1,1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Interval {
  double a, b, value, error;
};

template <typename F>
Interval gk15(const F& f, double a, double b, long& evaluations) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = 0.0, gauss = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double x = kKronrodNodes[i];
    double fsum;
    if (i == 7) {
      fsum = f(mid);
      ++evaluations;
    } else {
      fsum = f(mid - half * x) + f(mid + half * x);
      evaluations += 2;
    }
    kronrod += kKronrodWeights[i] * fsum;
    // odd Kronrod indices (plus the centre) are the embedded Gauss-7 nodes
    if (i % 2 == 1 || i == 7) gauss += kGaussWeights[i / 2] * fsum;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

// Adaptive bisection on [a,b]; refines the interval with the largest error
// estimate until the tolerance or the subdivision bound is hit.
template <typename F>
QuadratureResult adaptive(const F& f, double a, double b, double rel_tol,
                          double abs_tol, int max_intervals) {
  long evals = 0;
  std::vector<Interval> intervals;
  intervals.push_back(gk15(f, a, b, evals));
  for (;;) {
    double total = 0.0, err = 0.0;
    for (const auto& iv : intervals) {
      total += iv.value;
      err += iv.error;
    }
    if (err <= std::max(abs_tol, rel_tol * std::abs(total)))
      return {total, err, evals};
    if (static_cast<int>(intervals.size()) >= max_intervals)
      throw NonConvergenceError(
          "adaptive quadrature did not converge within the subdivision bound");
    auto worst = std::max_element(
        intervals.begin(), intervals.end(),
        [](const Interval& x, const Interval& y) { return x.error < y.error; });
    const Interval iv = *worst;
    const double mid = 0.5 * (iv.a + iv.b);
    *worst = gk15(f, iv.a, mid, evals);
    intervals.push_back(gk15(f, mid, iv.b, evals));
  }
}

}  // namespace detail

// Integral of f over [0,inf). f must decay at least exponentially at the
// given scale.
template <typename F>
QuadratureResult quad_semiinf_1d(const F& f, double scale,
                                 double rel_tol = 1e-11,
                                 double abs_tol = 1e-14,
                                 int max_intervals = 4000) {
  if (!(scale > 0.0)) throw std::invalid_argument("transform scale must be > 0");
  auto transformed = [&f, scale](double u) {
    const double t = -std::log(u) / scale;
    const double v = f(t);
    return v == 0.0 ? 0.0 : v / (scale * u);
  };
  return detail::adaptive(transformed, 0.0, 1.0, rel_tol, abs_tol,
                          max_intervals);
}

// Tensor-product analogue over [0,inf)^2. The inner integral runs at a
// tighter tolerance; its worst error estimate is folded into the reported
// estimate.
template <typename F>
QuadratureResult quad_semiinf_2d(const F& f, double scale_l, double scale_r,
                                 double rel_tol = 1e-10,
                                 double abs_tol = 1e-13,
                                 int max_intervals = 2000) {
  if (!(scale_l > 0.0) || !(scale_r > 0.0))
    throw std::invalid_argument("transform scales must be > 0");
  long evals = 0;
  double worst_inner = 0.0;
  auto outer = [&](double t_l) {
    auto inner = [&f, t_l](double t_r) { return f(t_l, t_r); };
    QuadratureResult r = quad_semiinf_1d(inner, scale_r, rel_tol * 0.25,
                                         abs_tol * 0.25, max_intervals);
    evals += r.evaluations;
    worst_inner = std::max(worst_inner, r.error_estimate);
    return r.value;
  };
  QuadratureResult out =
      quad_semiinf_1d(outer, scale_l, rel_tol, abs_tol, max_intervals);
  out.evaluations += evals;
  out.error_estimate += worst_inner / scale_l;
  return out;
}

}  // namespace kaontime
