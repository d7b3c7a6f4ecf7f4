#pragma once

#include <algorithm>
#include <stdexcept>

namespace kaontime {

// Central-difference oracles for the derivative-based prescriptions.
// Points within h of the domain boundary are shifted inward so all stencil
// evaluations stay in [0,inf).

inline constexpr double kDefaultFdStep = 1e-4;

// d^2 P / dt_l dt_r via the 4-point cross stencil, O(h^2).
template <typename F>
double finite_diff_mixed(const F& P, double t_l, double t_r, double h = kDefaultFdStep) {
  if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be > 0");
  t_l = std::max(t_l, h);
  t_r = std::max(t_r, h);
  const double v = P(t_l + h, t_r + h) - P(t_l + h, t_r - h) -
                   P(t_l - h, t_r + h) + P(t_l - h, t_r - h);
  return v / (4.0 * h * h);
}

// One Richardson step on the cross stencil, O(h^4).
template <typename F>
double finite_diff_mixed_richardson(const F& P, double t_l, double t_r,
                                    double h = kDefaultFdStep) {
  const double coarse = finite_diff_mixed(P, t_l, t_r, h);
  const double fine = finite_diff_mixed(P, t_l, t_r, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

template <typename F>
double finite_diff_grad_sum(const F& P, double t_l, double t_r,
                            double h = kDefaultFdStep);

// One Richardson step on the gradient sum, O(h^4).
template <typename F>
double finite_diff_grad_sum_richardson(const F& P, double t_l, double t_r,
                                       double h = kDefaultFdStep) {
  const double coarse = finite_diff_grad_sum(P, t_l, t_r, h);
  const double fine = finite_diff_grad_sum(P, t_l, t_r, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

// (d/dt_l + d/dt_r) P via central differences, O(h^2).
template <typename F>
double finite_diff_grad_sum(const F& P, double t_l, double t_r,
                            double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be > 0");
  t_l = std::max(t_l, h);
  t_r = std::max(t_r, h);
  const double dl = (P(t_l + h, t_r) - P(t_l - h, t_r)) / (2.0 * h);
  const double dr = (P(t_l, t_r + h) - P(t_l, t_r - h)) / (2.0 * h);
  return dl + dr;
}

}  // namespace kaontime
