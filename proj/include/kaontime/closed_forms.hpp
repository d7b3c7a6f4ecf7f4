#pragma once

#include <cmath>
#include <complex>

#include "kaontime/errors.hpp"
#include "kaontime/params.hpp"

namespace kaontime {

// Leading-order closed forms in |epsilon| for the alpha and beta state
// families, kept verbatim (including their |epsilon|^2 prefactors and
// unnormalized scale) as cross-checks of the exact engine. Combinations
// without a published closed form raise UnsupportedCombinationError.

enum class StateClass { alpha, beta };

namespace detail {

struct LoParts {
  double gs, gl, gbar, dm, eps2;
};

inline LoParts lo_parts(const KaonParams& p) {
  return {p.gamma_s, p.gamma_l, p.gamma_bar(), p.delta_m,
          std::norm(p.epsilon)};
}

}  // namespace detail

inline bool leading_order_supported(Approach approach, StateClass cls,
                                    Channel ch) {
  const bool same_sector = ch.left == ch.right;
  if (cls == StateClass::alpha) {
    if (same_sector) return true;  // all four prescriptions
    return approach != Approach::standard_old;
  }
  if (same_sector) return approach != Approach::standard_old;
  return approach != Approach::standard_new;
}

// Leading-order projected survival probability P^ij_S.
inline double leading_order_survival(StateClass cls, double phase, Channel ch,
                                     const KaonParams& p, double t_l,
                                     double t_r) {
  const auto q = detail::lo_parts(p);
  if (cls == StateClass::alpha) {
    if (ch.left == ch.right) {
      const double a = std::exp(-q.gl * t_l - q.gs * t_r);
      const double b = std::exp(-q.gs * t_l - q.gl * t_r);
      const double cross = std::exp(-q.gbar * (t_l + t_r)) *
                           std::cos(q.dm * (t_l - t_r) + phase);
      return q.eps2 * (a + b - 2.0 * cross);
    }
    // cross channels are pure products at order zero
    if (ch.left == 1) return std::exp(-q.gs * t_l - q.gl * t_r);
    return std::exp(-q.gl * t_l - q.gs * t_r);
  }
  const double sum = t_l + t_r;
  if (ch.left == ch.right) {
    const double g = ch.left == 1 ? q.gs : q.gl;
    return std::exp(-g * sum);
  }
  const double cross =
      std::exp(-q.gbar * sum) * std::cos(q.dm * sum + phase);
  return 0.5 * q.eps2 *
         (std::exp(-q.gl * sum) + std::exp(-q.gs * sum) - 2.0 * cross);
}

// Leading-order decay-time density, unnormalized.
inline double leading_order_density(Approach approach, StateClass cls,
                                    double phase, Channel ch,
                                    const KaonParams& p, double t_l,
                                    double t_r) {
  if (!leading_order_supported(approach, cls, ch))
    throw UnsupportedCombinationError(
        "no closed form for " + to_string(approach) + " on channel " +
        to_string(ch) + (cls == StateClass::alpha ? " (alpha)" : " (beta)"));
  const auto q = detail::lo_parts(p);
  if (cls == StateClass::alpha) {
    if (ch.left == ch.right) {
      const double a = std::exp(-q.gl * t_l - q.gs * t_r);
      const double b = std::exp(-q.gs * t_l - q.gl * t_r);
      const double cross = std::exp(-q.gbar * (t_l + t_r)) *
                           std::cos(q.dm * (t_l - t_r) + phase);
      switch (approach) {
        case Approach::standard_new:
          return q.eps2 * (q.gs * q.gl * (a + b) -
                           2.0 * (q.gbar * q.gbar + q.dm * q.dm) * cross);
        case Approach::hybrid:
        case Approach::time_operator:
          return q.gs * q.gl * q.eps2 * (a + b - 2.0 * cross);
        case Approach::standard_old:
          return (q.gs + q.gl) * q.eps2 * (a + b - 2.0 * cross);
      }
    }
    return q.gs * q.gl *
           leading_order_survival(cls, phase, ch, p, t_l, t_r);
  }
  const double sum = t_l + t_r;
  if (ch.left == ch.right) {
    const double g = ch.left == 1 ? q.gs : q.gl;
    return g * g * std::exp(-g * sum);
  }
  const double env = std::exp(-q.gbar * sum);
  const double cosb = std::cos(q.dm * sum + phase);
  switch (approach) {
    case Approach::hybrid:
      return q.eps2 * (std::exp(-q.gl * sum) + std::exp(-q.gs * sum) -
                       2.0 * env * cosb);
    case Approach::time_operator:
      return q.eps2 * (q.gl * q.gl * std::exp(-q.gl * sum) +
                       q.gs * q.gs * std::exp(-q.gs * sum) -
                       2.0 * q.gs * q.gl * env * cosb);
    case Approach::standard_old: {
      const double sinb = std::sin(q.dm * sum + phase);
      return 0.5 * q.eps2 *
             (2.0 * q.gl * std::exp(-q.gl * sum) +
              2.0 * q.gs * std::exp(-q.gs * sum) +
              2.0 * env * ((q.gs + q.gl) * cosb - q.dm * sinb));
    }
    default:
      throw UnsupportedCombinationError("unreachable");
  }
}

}  // namespace kaontime
