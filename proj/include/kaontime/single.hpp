#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "kaontime/errors.hpp"
#include "kaontime/params.hpp"

namespace kaontime {

// Coherent superposition of two decaying modes: amplitudes amp1, amp2,
// energy splitting delta_e = E_2 - E_1 and rates gamma1, gamma2.
struct SuperpositionSpec {
  std::complex<double> amp1{1.0, 0.0};
  std::complex<double> amp2{0.0, 0.0};
  double delta_e = 0.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;

  double gamma_bar() const { return 0.5 * (gamma1 + gamma2); }
  double delta_phi() const {
    if (std::abs(amp1) == 0.0 || std::abs(amp2) == 0.0) return 0.0;
    return std::arg(amp2 / amp1);
  }

  void validate(double norm_tol = 1e-9) const {
    if (!(gamma1 > 0.0) || !(gamma2 > 0.0))
      throw std::invalid_argument("decay rates must be positive");
    const double n = std::norm(amp1) + std::norm(amp2);
    if (std::abs(n - 1.0) > norm_tol)
      throw std::invalid_argument(
          "superposition amplitudes must satisfy |a1|^2 + |a2|^2 = 1");
  }
};

// Polar form of gamma_bar - i*delta_e; R and theta set the amplitude and
// phase shift of the beat term in the standard density.
struct BeatPolar {
  double R = 0.0;
  double theta = 0.0;
};

inline BeatPolar beat_polar(const SuperpositionSpec& spec) {
  const std::complex<double> w(spec.gamma_bar(), -spec.delta_e);
  return {std::abs(w), std::arg(w)};
}

// Closed form of int_0^inf e^{-g t} cos(w t + phi) dt.
inline double exp_cos_integral(double g, double w, double phi) {
  return (g * std::cos(phi) - w * std::sin(phi)) / (g * g + w * w);
}

namespace detail {

struct BeatParts {
  double w1, w2, cross;  // weights of e^{-g1 t}, e^{-g2 t} and the beat term
  double omega, phi;     // beat frequency and phase offset
  double gbar;
};

// The three prescriptions share the structure
//   w1 e^{-g1 t} + w2 e^{-g2 t} + cross e^{-gbar t} cos(omega t + phi)
// and differ only in the weights.
inline BeatParts beat_parts(Approach approach, const SuperpositionSpec& s) {
  const double a1 = std::abs(s.amp1), a2 = std::abs(s.amp2);
  const double dphi = s.delta_phi();
  BeatParts p{};
  p.omega = s.delta_e;
  p.gbar = s.gamma_bar();
  switch (approach) {
    case Approach::standard_new:
    case Approach::standard_old: {
      // single-particle decay has one time variable, so both standard
      // variants reduce to -dP/dt
      const BeatPolar rp = beat_polar(s);
      p.w1 = a1 * a1 * s.gamma1;
      p.w2 = a2 * a2 * s.gamma2;
      p.cross = 2.0 * a1 * a2 * rp.R;
      p.phi = dphi + rp.theta;
      break;
    }
    case Approach::hybrid:
      p.w1 = a1 * a1;
      p.w2 = a2 * a2;
      p.cross = 2.0 * a1 * a2;
      p.phi = dphi;
      break;
    case Approach::time_operator:
      p.w1 = a1 * a1 * s.gamma1;
      p.w2 = a2 * a2 * s.gamma2;
      p.cross = 2.0 * a1 * a2 * std::sqrt(s.gamma1 * s.gamma2);
      p.phi = dphi;
      break;
  }
  return p;
}

}  // namespace detail

inline double density_single_unnormalized(Approach approach,
                                          const SuperpositionSpec& spec,
                                          double t) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  spec.validate();
  const auto p = detail::beat_parts(approach, spec);
  return p.w1 * std::exp(-spec.gamma1 * t) + p.w2 * std::exp(-spec.gamma2 * t) +
         p.cross * std::exp(-p.gbar * t) * std::cos(p.omega * t + p.phi);
}

// 1 / int_0^inf of the unnormalized density, in closed form.
inline double single_norm_constant(Approach approach,
                                   const SuperpositionSpec& spec) {
  spec.validate();
  const auto p = detail::beat_parts(approach, spec);
  const double total = p.w1 / spec.gamma1 + p.w2 / spec.gamma2 +
                       p.cross * exp_cos_integral(p.gbar, p.omega, p.phi);
  if (!(std::abs(total) > 1e-14))
    throw NumericalError("density integrates to zero; cannot normalize");
  return 1.0 / total;
}

// Normalized decay-time density. The standard beat formula can dip below
// zero for extreme parameters; the value is returned as is, never clipped.
inline double density_single(Approach approach, const SuperpositionSpec& spec,
                             double t) {
  return single_norm_constant(approach, spec) *
         density_single_unnormalized(approach, spec, t);
}

// Survival probability summed over the two decay sectors,
// P_s(t) = |a1|^2 e^{-g1 t} + |a2|^2 e^{-g2 t}.
inline double survival_single(const SuperpositionSpec& spec, double t) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  spec.validate();
  return std::norm(spec.amp1) * std::exp(-spec.gamma1 * t) +
         std::norm(spec.amp2) * std::exp(-spec.gamma2 * t);
}

// Coherent survival amplitude |a1 e^{(iE1-g1/2)t} + a2 e^{(iE2-g2/2)t}|^2,
// whose negative time derivative is exactly the unnormalized standard
// density above (the incoherent survival_single drops the beat).
inline double survival_single_coherent(const SuperpositionSpec& spec,
                                       double t) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> s =
      spec.amp1 * std::exp(-0.5 * spec.gamma1 * t) +
      spec.amp2 * std::exp((i * spec.delta_e - 0.5 * spec.gamma2) * t);
  return std::norm(s);
}

}  // namespace kaontime
