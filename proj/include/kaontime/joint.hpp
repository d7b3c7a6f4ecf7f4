#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kaontime/biexp.hpp"
#include "kaontime/errors.hpp"
#include "kaontime/format.hpp"
#include "kaontime/params.hpp"
#include "kaontime/states.hpp"

namespace kaontime {

// Evaluation grid: n points per axis on [0, t_max] (uniform) or a geometric
// ladder ending at t_max (log spacing, starting at t_min > 0).
struct GridSpec {
  double t_max = 10.0;
  int n = 50;
  enum class Spacing { uniform, log_spaced } spacing = Spacing::uniform;
  double t_min = 0.0;  // honored for log spacing; must then be > 0

  void validate() const {
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be > 0");
    if (n < 2) throw std::invalid_argument("grid needs at least 2 points");
    if (spacing == Spacing::log_spaced && !(t_min > 0.0) )
      throw std::invalid_argument("log spacing needs t_min > 0");
    if (spacing == Spacing::log_spaced && !(t_min < t_max))
      throw std::invalid_argument("log spacing needs t_min < t_max");
  }

  std::vector<double> points() const {
    validate();
    std::vector<double> pts(n);
    if (spacing == Spacing::uniform) {
      for (int k = 0; k < n; ++k)
        pts[k] = t_max * static_cast<double>(k) / (n - 1);
    } else {
      const double ratio = std::log(t_max / t_min) / (n - 1);
      for (int k = 0; k < n; ++k) pts[k] = t_min * std::exp(ratio * k);
    }
    return pts;
  }
};

// Normalization policy (the calibration constant):
//   global       one constant for all four channels, total probability 1
//   per_channel  each channel's density integrates to 1 on its own
enum class NormPolicy { global, per_channel };

inline std::string to_string(NormPolicy p) {
  return p == NormPolicy::global ? "global" : "per-channel";
}

struct Negativity {
  bool present = false;
  double min_value = 0.0;
  double at_t_l = 0.0;
  double at_t_r = 0.0;
};

// Detection efficiency multipliers per channel (the detector-calibration
// factor converting sector decay rate into detection rate); defaults to 1.
struct ChannelEfficiency {
  std::array<double, 4> factor{1.0, 1.0, 1.0, 1.0};
};

// Negativity scan defaults.
inline constexpr int kNegativityScanPoints = 200;
inline constexpr double kNegativityScanTMax = 10.0;
inline constexpr double kNegativityTol = 1e-12;

namespace detail {

inline Negativity scan_negativity(const BiExpSum& carrier) {
  Negativity neg;
  neg.min_value = std::numeric_limits<double>::infinity();
  const int n = kNegativityScanPoints;
  for (int i = 0; i < n; ++i) {
    const double t_l = kNegativityScanTMax * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double t_r = kNegativityScanTMax * j / (n - 1);
      const double v = carrier.eval_real(t_l, t_r);
      if (v < neg.min_value) {
        neg.min_value = v;
        neg.at_t_l = t_l;
        neg.at_t_r = t_r;
      }
    }
  }
  neg.present = neg.min_value < -kNegativityTol;
  return neg;
}

// Exact (unnormalized) carriers of all four channels for one prescription.
inline std::array<BiExpSum, 4> density_carriers(
    Approach approach, const EntangledState& state, const KaonParams& params,
    const ChannelEfficiency& eff = {}) {
  const auto amps = approach == Approach::time_operator
                        ? temporal_wavefunction_matrix(state, params)
                        : survival_amplitude_matrix(state, params);
  const double inv_n0 = 1.0 / initial_norm_sq(state, params);
  std::array<BiExpSum, 4> out;
  for (const Channel ch : all_channels()) {
    const int k = ch.index();
    switch (approach) {
      case Approach::standard_new:
        out[k] = amps[k].modsq().scaled(inv_n0).mixed_derivative();
        break;
      case Approach::hybrid:
        out[k] = amps[k].modsq().scaled(
            inv_n0 * params.cp_rate(ch.left) * params.cp_rate(ch.right));
        break;
      case Approach::time_operator:
        out[k] = amps[k].modsq().scaled(inv_n0);
        break;
      case Approach::standard_old:
        out[k] = amps[k].modsq().scaled(inv_n0).sum_derivative();
        break;
    }
    if (eff.factor[k] != 1.0) out[k] = out[k].scaled(eff.factor[k]);
  }
  return out;
}

}  // namespace detail

// One channel's exact decay-time density under one prescription. The
// carrier is the unnormalized term sum; value() applies the policy constant.
class JointDensity {
 public:
  JointDensity(Approach approach, EntangledState state, KaonParams params,
               Channel channel, NormPolicy policy, BiExpSum carrier,
               double norm_constant, Negativity negativity)
      : approach_(approach),
        state_(std::move(state)),
        params_(params),
        channel_(channel),
        policy_(policy),
        carrier_(std::move(carrier)),
        norm_constant_(norm_constant),
        negativity_(negativity) {}

  double value(double t_l, double t_r) const {
    return norm_constant_ * carrier_.eval_real(t_l, t_r);
  }
  double unnormalized(double t_l, double t_r) const {
    return carrier_.eval_real(t_l, t_r);
  }

  const BiExpSum& carrier() const { return carrier_; }
  double norm_constant() const { return norm_constant_; }
  const Negativity& negativity() const { return negativity_; }
  Approach approach() const { return approach_; }
  Channel channel() const { return channel_; }
  NormPolicy policy() const { return policy_; }
  const KaonParams& params() const { return params_; }
  const EntangledState& state() const { return state_; }
  bool is_zero() const { return carrier_.is_zero(); }

  // Unnormalized mass of this channel, exact.
  double channel_mass() const {
    return carrier_.is_zero() ? 0.0 : carrier_.integral().real();
  }

  std::string descriptor() const {
    return to_string(approach_) + "|" + state_.label() + "|ch" +
           to_string(channel_) + "|gs=" + format_double(params_.gamma_s) +
           ",gl=" + format_double(params_.gamma_l) +
           ",dm=" + format_double(params_.delta_m) +
           ",eps=" + format_complex(params_.epsilon) + "|" +
           to_string(policy_);
  }

 private:
  Approach approach_;
  EntangledState state_;
  KaonParams params_;
  Channel channel_;
  NormPolicy policy_;
  BiExpSum carrier_;
  double norm_constant_;
  Negativity negativity_;
};

inline JointDensity joint_density(Approach approach,
                                  const EntangledState& state,
                                  const KaonParams& params, Channel channel,
                                  NormPolicy policy = NormPolicy::global,
                                  const ChannelEfficiency& eff = {}) {
  const auto carriers = detail::density_carriers(approach, state, params, eff);
  double norm;
  if (policy == NormPolicy::global) {
    double total = 0.0;
    for (const auto& c : carriers)
      if (!c.is_zero()) total += c.integral().real();
    if (!(std::abs(total) > 1e-13))
      throw NumericalError("total decay probability vanishes; cannot normalize");
    norm = 1.0 / total;
  } else {
    const auto& c = carriers[channel.index()];
    const double mass = c.is_zero() ? 0.0 : c.integral().real();
    if (!(std::abs(mass) > 1e-13))
      throw NumericalError(
          "channel mass vanishes; per-channel normalization undefined for " +
          to_string(approach) + " on channel " + to_string(channel));
    norm = 1.0 / mass;
  }
  const auto& carrier = carriers[channel.index()];
  return JointDensity(approach, state, params, channel, policy, carrier, norm,
                      detail::scan_negativity(carrier));
}

// Shape comparison of the prescriptions on one channel. Each approach's
// values are scaled to unit sup-norm on the grid, so the pairwise deviation
// is scale-free: two densities are proportional iff it vanishes.
inline constexpr double kProportionalityTol = 1e-10;

struct ComparisonRow {
  double t_l, t_r;
  std::array<double, 4> normalized;  // indexed like all_approaches()
};

struct PairVerdict {
  Approach a, b;
  double max_deviation = 0.0;
  bool proportional = false;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::array<bool, 4> identically_zero{};
  std::vector<PairVerdict> verdicts;
};

inline ComparisonTable approach_comparison(const EntangledState& state,
                                           const KaonParams& params,
                                           Channel channel,
                                           const GridSpec& grid) {
  const auto pts = grid.points();
  ComparisonTable table;
  std::array<std::vector<double>, 4> values;
  std::array<double, 4> sup{};
  for (int ai = 0; ai < 4; ++ai) {
    const auto carriers = detail::density_carriers(all_approaches()[ai], state, params);
    const auto& c = carriers[channel.index()];
    values[ai].reserve(pts.size() * pts.size());
    for (double t_l : pts)
      for (double t_r : pts) {
        const double v = c.is_zero() ? 0.0 : c.eval_real(t_l, t_r);
        values[ai].push_back(v);
        sup[ai] = std::max(sup[ai], std::abs(v));
      }
    table.identically_zero[ai] = !(sup[ai] > 0.0);
    if (!table.identically_zero[ai])
      for (double& v : values[ai]) v /= sup[ai];
  }
  std::size_t idx = 0;
  for (double t_l : pts)
    for (double t_r : pts) {
      ComparisonRow row{t_l, t_r, {}};
      for (int ai = 0; ai < 4; ++ai) row.normalized[ai] = values[ai][idx];
      table.rows.push_back(row);
      ++idx;
    }
  for (int ai = 0; ai < 4; ++ai)
    for (int bi = ai + 1; bi < 4; ++bi) {
      PairVerdict v{all_approaches()[ai], all_approaches()[bi], 0.0, false};
      for (std::size_t k = 0; k < values[ai].size(); ++k)
        v.max_deviation =
            std::max(v.max_deviation, std::abs(values[ai][k] - values[bi][k]));
      v.proportional = v.max_deviation <= kProportionalityTol;
      table.verdicts.push_back(v);
    }
  return table;
}

}  // namespace kaontime
