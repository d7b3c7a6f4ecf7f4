#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace kaontime {

// Internal units: times in units of the short lifetime tau_S, rates in
// 1/tau_S, so gamma_s = 1 by default. delta_m = m_L - m_S is an angular
// frequency in the same units (natural units, h = c = 1).

// SI reference constants used for the defaults and by the CLI unit
// conversion.
inline constexpr double kTauSSeconds = 8.92e-11;
inline constexpr double kTauLSeconds = 5.17e-8;
inline constexpr double kEpsilonAbs = 2.27e-3;
inline constexpr double kEpsilonArgDeg = 43.37;

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }

inline std::complex<double> default_epsilon() {
  return std::polar(kEpsilonAbs, deg_to_rad(kEpsilonArgDeg));
}

struct KaonParams {
  double gamma_s = 1.0;
  double gamma_l = kTauSSeconds / kTauLSeconds;  // lifetime ratio
  double delta_m = 0.5;                          // approximation gamma_s/2
  std::complex<double> epsilon = default_epsilon();

  // CP-sector rates entering the hybrid rule. Unset means gamma_s and
  // gamma_l; they are exposed separately because the identification of the
  // CP eigenstates with the decay modes holds only to leading order.
  std::optional<double> gamma_cp1;
  std::optional<double> gamma_cp2;

  double cp_rate(int sector) const {
    if (sector == 1) return gamma_cp1.value_or(gamma_s);
    if (sector == 2) return gamma_cp2.value_or(gamma_l);
    throw std::invalid_argument("CP sector must be 1 or 2");
  }

  double gamma_bar() const { return 0.5 * (gamma_s + gamma_l); }

  void validate() const {
    if (!(gamma_s > 0.0) || !(gamma_l > 0.0))
      throw std::invalid_argument("decay rates must be positive");
    if (gamma_s < gamma_l)
      throw std::invalid_argument("gamma_s must not be smaller than gamma_l");
    if (delta_m < 0.0)
      throw std::invalid_argument("delta_m must be nonnegative (m_L > m_S)");
    if (std::abs(epsilon) >= 1.0)
      throw std::invalid_argument("|epsilon| must be < 1");
    if (gamma_cp1 && !(*gamma_cp1 > 0.0))
      throw std::invalid_argument("gamma_cp1 must be positive");
    if (gamma_cp2 && !(*gamma_cp2 > 0.0))
      throw std::invalid_argument("gamma_cp2 must be positive");
  }
};

// Joint detection channel: CP sector (1 or 2) on the left and right
// trajectories. (1,1) is the joint two-pion-type detection.
struct Channel {
  int left = 1;
  int right = 1;

  int index() const { return (left - 1) * 2 + (right - 1); }
  bool operator==(const Channel&) const = default;
};

inline constexpr std::array<Channel, 4> all_channels() {
  return {Channel{1, 1}, Channel{1, 2}, Channel{2, 1}, Channel{2, 2}};
}

inline std::string to_string(Channel c) {
  return std::to_string(c.left) + std::to_string(c.right);
}

// The four decay-time prescriptions.
enum class Approach {
  standard_new,   // mixed derivative of the survival probability
  hybrid,         // survival probability times the channel decay rates
  time_operator,  // modulus squared of the temporal wave function
  standard_old,   // first-order (gradient-sum) variation of the survival
};

inline constexpr std::array<Approach, 4> all_approaches() {
  return {Approach::standard_new, Approach::hybrid, Approach::time_operator,
          Approach::standard_old};
}

inline std::string to_string(Approach a) {
  switch (a) {
    case Approach::standard_new: return "standard-new";
    case Approach::hybrid: return "hybrid";
    case Approach::time_operator: return "time-operator";
    case Approach::standard_old: return "standard-old";
  }
  throw std::logic_error("unknown approach");
}

inline Approach approach_from_string(const std::string& s) {
  if (s == "standard-new" || s == "standard") return Approach::standard_new;
  if (s == "hybrid") return Approach::hybrid;
  if (s == "time-operator" || s == "to") return Approach::time_operator;
  if (s == "standard-old") return Approach::standard_old;
  throw std::invalid_argument("unknown approach: " + s);
}

// M[i][a] = <K_i|K_a> for CP sector i in {1,2} and mode a in {S,L}.
// Columns are unit vectors; at epsilon = 0 the matrix is the identity.
struct MixingMatrix {
  std::array<std::array<std::complex<double>, 2>, 2> m{};

  // sector: 1 or 2; mode: 0 = S, 1 = L
  std::complex<double> at(int sector, int mode) const {
    return m[sector - 1][mode];
  }
};

inline MixingMatrix mixing_matrix(const KaonParams& p) {
  if (std::abs(p.epsilon) >= 1.0)
    throw std::invalid_argument("|epsilon| must be < 1");
  const double norm = 1.0 / std::sqrt(1.0 + std::norm(p.epsilon));
  MixingMatrix mm;
  mm.m[0][0] = norm;              // <K_1|K_S>
  mm.m[1][0] = p.epsilon * norm;  // <K_2|K_S>
  mm.m[0][1] = p.epsilon * norm;  // <K_1|K_L>
  mm.m[1][1] = norm;              // <K_2|K_L>
  return mm;
}

}  // namespace kaontime
