#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "kaontime/errors.hpp"
#include "kaontime/format.hpp"
#include "kaontime/joint.hpp"
#include "kaontime/quadrature.hpp"
#include "kaontime/sampling.hpp"

namespace kaontime {

// Upper-tail probability of the chi-square distribution.
inline double chi_square_tail(double chi2, int dof) {
  if (dof < 1) throw std::invalid_argument("dof must be >= 1");
  if (chi2 <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * chi2);
}

// KL values below this are indistinguishable from zero at the quadrature
// resolution and are reported as exactly 0.
inline constexpr double kKlZeroTol = 1e-12;

namespace detail {

// Channel mass of the positive part. Exact term sum for nonnegative
// carriers; quadrature of max(f,0) when the carrier dips negative.
inline double positive_mass(const JointDensity& d, double scale_l,
                            double scale_r) {
  if (d.is_zero())
    throw NumericalError("cannot compare an identically zero density");
  if (!d.negativity().present) return d.carrier().integral().real();
  auto pos = [&d](double t_l, double t_r) {
    return std::max(d.unnormalized(t_l, t_r), 0.0);
  };
  return quad_semiinf_2d(pos, scale_l, scale_r, 1e-8, 1e-13).value;
}

// Sup of |f| on the standard scan box; sets the scale below which values
// count as numerical zero.
inline double carrier_sup(const BiExpSum& f) {
  double sup = 0.0;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j)
      sup = std::max(sup, std::abs(f.eval_real(0.1 * i + 0.05, 0.1 * j + 0.05)));
  return sup;
}

}  // namespace detail

// KL divergence between the shapes of two densities on one channel,
// int p ln(p/q) with both renormalized to unit mass over the quadrant.
// Negative-density regions of a sign-indefinite prescription carry no
// events and contribute zero. Errors if q vanishes where p does not.
inline double kl_divergence(const JointDensity& p, const JointDensity& q,
                            double rel_tol = 1e-9) {
  if (!(p.channel() == q.channel()))
    throw std::invalid_argument("KL requires densities on the same channel");
  const double scale_l =
      0.9 * std::min(p.carrier().min_rate_l(), q.carrier().min_rate_l());
  // slightly detuned so tensor nodes never land exactly on t_l = t_r,
  // where proportional densities cancel to rounding residue
  const double scale_r =
      0.9 * 1.0037 * std::min(p.carrier().min_rate_r(), q.carrier().min_rate_r());
  const double mass_p = detail::positive_mass(p, scale_l, scale_r);
  const double mass_q = detail::positive_mass(q, scale_l, scale_r);
  if (!(mass_p > 0.0) || !(mass_q > 0.0))
    throw NumericalError("density has no positive mass");

  // p values this far below the density's own scale are numerical zeros
  // (diagonal cancellation residue, deep-tail underflow) and contribute
  // nothing; q must vanish under an appreciable p to count as a hole
  const double sup_p = detail::carrier_sup(p.carrier());
  const double p_skip = 1e-13 * sup_p;
  const double p_appreciable = 1e-8 * sup_p;
  auto integrand = [&](double t_l, double t_r) {
    const double a = p.unnormalized(t_l, t_r);
    if (!(a > p_skip)) return 0.0;
    const double b = q.unnormalized(t_l, t_r);
    if (!(b > 0.0)) {
      if (a > p_appreciable)
        throw SupportMismatchError(
            "q vanishes on the support of p near t_l=" + format_double(t_l) +
            ", t_r=" + format_double(t_r));
      return 0.0;
    }
    const double ph = a / mass_p;
    return ph * std::log(ph / (b / mass_q));
  };
  const QuadratureResult r =
      quad_semiinf_2d(integrand, scale_l, scale_r, rel_tol, 1e-13);
  if (r.value < -1e-9)
    throw NumericalError("KL integral came out significantly negative");
  return std::max(r.value, 0.0);
}

// ceil(z^2 / (2 kl)); no finite sample discriminates identical shapes.
inline std::optional<std::uint64_t> required_sample_size(double kl, double z) {
  if (!(z > 0.0)) throw std::invalid_argument("z must be > 0");
  if (kl < 0.0) throw std::invalid_argument("kl must be >= 0");
  if (kl == 0.0) return std::nullopt;
  return static_cast<std::uint64_t>(std::ceil(z * z / (2.0 * kl)));
}

struct ChiSquareResult {
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

inline constexpr double kMinExpectedPerBin = 5.0;

// Pearson chi-square of a batch against a model on a square binning of
// [0, t_max]^2 whose outermost row/column extend to infinity. Bins with
// expected count below the minimum are pooled.
inline ChiSquareResult chi_square_binned(const EventBatch& events,
                                         const JointDensity& model,
                                         const GridSpec& bins) {
  bins.validate();
  if (bins.spacing != GridSpec::Spacing::uniform)
    throw std::invalid_argument("chi-square binning must be uniform");
  if (events.events.empty()) throw TooFewEventsError("empty event batch");
  if (model.negativity().present)
    throw NumericalError("cannot bin against a sign-indefinite model");

  const int n = bins.n;
  const double width = bins.t_max / n;
  const double total_mass = model.channel_mass();
  if (!(total_mass > 0.0))
    throw NumericalError("model channel mass vanishes");
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> expected(n * n, 0.0);
  std::vector<double> observed(n * n, 0.0);
  const double n_events = static_cast<double>(events.events.size());
  for (int i = 0; i < n; ++i) {
    const double a_l = i * width;
    const double b_l = (i + 1 == n) ? inf : (i + 1) * width;
    for (int j = 0; j < n; ++j) {
      const double a_r = j * width;
      const double b_r = (j + 1 == n) ? inf : (j + 1) * width;
      const double mass =
          model.carrier().box_integral(a_l, b_l, a_r, b_r).real();
      expected[i * n + j] = n_events * std::max(mass, 0.0) / total_mass;
    }
  }
  for (const Event& e : events.events) {
    const int i = std::min(n - 1, static_cast<int>(e.t_l / width));
    const int j = std::min(n - 1, static_cast<int>(e.t_r / width));
    observed[i * n + j] += 1.0;
  }

  // pool sparse bins (ascending expected count) into one tail bin
  std::vector<int> order(expected.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (expected[a] != expected[b]) return expected[a] < expected[b];
    return a < b;
  });
  double pooled_exp = 0.0, pooled_obs = 0.0;
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  std::size_t k = 0;
  for (; k < order.size(); ++k) {
    if (pooled_exp >= kMinExpectedPerBin) break;
    pooled_exp += expected[order[k]];
    pooled_obs += observed[order[k]];
  }
  for (; k < order.size(); ++k) {
    if (expected[order[k]] < kMinExpectedPerBin) {
      pooled_exp += expected[order[k]];
      pooled_obs += observed[order[k]];
    } else {
      cells.emplace_back(observed[order[k]], expected[order[k]]);
    }
  }
  if (pooled_exp > 0.0) {
    if (pooled_exp < kMinExpectedPerBin) {
      if (cells.empty())
        throw TooFewEventsError(
            "bin merging cannot reach the minimum expected count");
      cells.front().first += pooled_obs;
      cells.front().second += pooled_exp;
    } else {
      cells.emplace_back(pooled_obs, pooled_exp);
    }
  }
  if (cells.size() < 2)
    throw TooFewEventsError("fewer than two usable bins after merging");

  double chi2 = 0.0;
  for (const auto& [obs, exp] : cells) {
    const double d = obs - exp;
    chi2 += d * d / exp;
  }
  const int dof = static_cast<int>(cells.size()) - 1;
  return {chi2, dof, chi_square_tail(chi2, dof)};
}

struct DiscriminationReport {
  double kl_pq = 0.0;
  double kl_qp = 0.0;
  std::optional<double> chi2;
  std::optional<int> dof;
  std::optional<double> p_value;
  std::optional<std::uint64_t> n_required;  // nullopt = infinite
  std::string model_p;
  std::string model_q;
};

// Assembles the headline figures; KL values below the numerical floor are
// snapped to zero so n_required is infinite exactly when the shapes agree.
inline DiscriminationReport discriminate(const JointDensity& p,
                                         const JointDensity& q, double z,
                                         const EventBatch* events = nullptr,
                                         const GridSpec* bins = nullptr) {
  DiscriminationReport rep;
  rep.model_p = p.descriptor();
  rep.model_q = q.descriptor();
  rep.kl_pq = kl_divergence(p, q);
  rep.kl_qp = kl_divergence(q, p);
  if (rep.kl_pq < kKlZeroTol) rep.kl_pq = 0.0;
  if (rep.kl_qp < kKlZeroTol) rep.kl_qp = 0.0;
  rep.n_required = required_sample_size(rep.kl_pq, z);
  if (events != nullptr && bins != nullptr) {
    const ChiSquareResult c = chi_square_binned(*events, q, *bins);
    rep.chi2 = c.chi2;
    rep.dof = c.dof;
    rep.p_value = c.p_value;
  }
  return rep;
}

}  // namespace kaontime
