#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "kaontime/biexp.hpp"
#include "kaontime/params.hpp"

namespace kaontime {

// Propagation mode index used for state coefficients.
enum class Mode { S = 0, L = 1 };

// Two-kaon state written in the {S,L} x {S,L} product basis,
// psi = sum_{a,b} C_ab |K_a>_l |K_b>_r, with C Frobenius-normalized.
//
// Named families (relative phase in radians):
//   singlet      (|K_S K_L> - |K_L K_S>)/sqrt(2), the phi-resonance state
//   alpha(a)     (|K_L K_S> - e^{ia}|K_S K_L>)/sqrt(2); alpha(0) is the
//                singlet up to a global sign
//   beta(b)      (|K_L K_L> - e^{ib}|K_S K_S>)/sqrt(2)
class EntangledState {
 public:
  enum class Kind { alpha, beta, general };

  static EntangledState singlet() {
    EntangledState s;
    s.kind_ = Kind::alpha;
    s.phase_ = 0.0;
    s.set(Mode::S, Mode::L, 1.0 / std::sqrt(2.0));
    s.set(Mode::L, Mode::S, -1.0 / std::sqrt(2.0));
    return s;
  }

  static EntangledState alpha_state(double alpha) {
    EntangledState s;
    s.kind_ = Kind::alpha;
    s.phase_ = alpha;
    s.set(Mode::L, Mode::S, 1.0 / std::sqrt(2.0));
    s.set(Mode::S, Mode::L, -std::polar(1.0, alpha) / std::sqrt(2.0));
    return s;
  }

  static EntangledState beta_state(double beta) {
    EntangledState s;
    s.kind_ = Kind::beta;
    s.phase_ = beta;
    s.set(Mode::L, Mode::L, 1.0 / std::sqrt(2.0));
    s.set(Mode::S, Mode::S, -std::polar(1.0, beta) / std::sqrt(2.0));
    return s;
  }

  // Coefficients in the order C_SS, C_SL, C_LS, C_LL; normalized here.
  static EntangledState general(const std::array<std::complex<double>, 4>& c) {
    double norm2 = 0.0;
    for (const auto& v : c) norm2 += std::norm(v);
    if (!(norm2 > 0.0))
      throw std::invalid_argument("state coefficients must have nonzero norm");
    const double inv = 1.0 / std::sqrt(norm2);
    EntangledState s;
    s.kind_ = Kind::general;
    s.c_ = {c[0] * inv, c[1] * inv, c[2] * inv, c[3] * inv};
    return s;
  }

  Kind kind() const { return kind_; }
  double phase() const { return phase_; }

  std::complex<double> coeff(Mode a, Mode b) const {
    return c_[static_cast<int>(a) * 2 + static_cast<int>(b)];
  }

  std::string label() const {
    switch (kind_) {
      case Kind::alpha: return "alpha:" + std::to_string(phase_);
      case Kind::beta: return "beta:" + std::to_string(phase_);
      case Kind::general: {
        std::string s = "general:";
        for (std::size_t i = 0; i < c_.size(); ++i) {
          if (i > 0) s += ",";
          s += std::to_string(c_[i].real()) + "," + std::to_string(c_[i].imag());
        }
        return s;
      }
    }
    return "?";
  }

 private:
  Kind kind_ = Kind::general;
  double phase_ = 0.0;
  std::array<std::complex<double>, 4> c_{};

  void set(Mode a, Mode b, std::complex<double> v) {
    c_[static_cast<int>(a) * 2 + static_cast<int>(b)] = v;
  }
};

namespace detail {

// Complex decay exponents with the common phase removed: only the mass
// splitting delta_m is observable, so the S mode carries no oscillation.
inline std::complex<double> mode_rate(Mode a, const KaonParams& p) {
  if (a == Mode::S) return {0.5 * p.gamma_s, 0.0};
  return {0.5 * p.gamma_l, p.delta_m};
}

inline double mode_gamma(Mode a, const KaonParams& p) {
  return a == Mode::S ? p.gamma_s : p.gamma_l;
}

}  // namespace detail

// psi_ij(t_l,t_r) = sum_{a,b} C_ab M[i][a] M[j][b] e^{-z_a t_l} e^{-z_b t_r},
// one BiExpSum per channel, indexed by Channel::index().
inline std::array<BiExpSum, 4> survival_amplitude_matrix(
    const EntangledState& state, const KaonParams& params) {
  params.validate();
  const MixingMatrix mm = mixing_matrix(params);
  std::array<BiExpSum, 4> out;
  for (const Channel ch : all_channels()) {
    std::vector<BiExpTerm> terms;
    for (Mode a : {Mode::S, Mode::L}) {
      for (Mode b : {Mode::S, Mode::L}) {
        const std::complex<double> c = state.coeff(a, b) *
                                       mm.at(ch.left, static_cast<int>(a)) *
                                       mm.at(ch.right, static_cast<int>(b));
        terms.push_back({c, detail::mode_rate(a, params),
                         detail::mode_rate(b, params)});
      }
    }
    out[ch.index()] = BiExpSum(std::move(terms));
  }
  return out;
}

// Temporal wave function of the pair: each mode factor is weighted by
// sqrt(gamma) so that |psi|^2 carries the decay rates.
inline std::array<BiExpSum, 4> temporal_wavefunction_matrix(
    const EntangledState& state, const KaonParams& params) {
  params.validate();
  const MixingMatrix mm = mixing_matrix(params);
  std::array<BiExpSum, 4> out;
  for (const Channel ch : all_channels()) {
    std::vector<BiExpTerm> terms;
    for (Mode a : {Mode::S, Mode::L}) {
      for (Mode b : {Mode::S, Mode::L}) {
        const double w = std::sqrt(detail::mode_gamma(a, params) *
                                   detail::mode_gamma(b, params));
        const std::complex<double> c = w * state.coeff(a, b) *
                                       mm.at(ch.left, static_cast<int>(a)) *
                                       mm.at(ch.right, static_cast<int>(b));
        terms.push_back({c, detail::mode_rate(a, params),
                         detail::mode_rate(b, params)});
      }
    }
    out[ch.index()] = BiExpSum(std::move(terms));
  }
  return out;
}

// ||psi(0,0)||^2 = sum_ij |psi_ij(0,0)|^2, the survival normalization.
inline double initial_norm_sq(const EntangledState& state,
                              const KaonParams& params) {
  const auto amps = survival_amplitude_matrix(state, params);
  double n = 0.0;
  for (const auto& a : amps) n += std::norm(a.eval(0.0, 0.0));
  if (!(n > 0.0)) throw NumericalError("state has vanishing initial norm");
  return n;
}

// P^ij_S(t_l,t_r) = |psi_ij|^2 / ||psi(0,0)||^2. Summed over the four
// channels this is 1 at the origin and nonincreasing along both axes.
inline double joint_survival(const EntangledState& state,
                             const KaonParams& params, Channel channel,
                             double t_l, double t_r) {
  if (t_l < 0.0 || t_r < 0.0)
    throw std::invalid_argument("times must be nonnegative");
  const auto amps = survival_amplitude_matrix(state, params);
  const double n0 = initial_norm_sq(state, params);
  return std::norm(amps[channel.index()].eval(t_l, t_r)) / n0;
}

}  // namespace kaontime
