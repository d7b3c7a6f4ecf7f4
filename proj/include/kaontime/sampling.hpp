#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kaontime/errors.hpp"
#include "kaontime/joint.hpp"
#include "kaontime/params.hpp"

namespace kaontime {

// Reproducibility contract. Batches are generated in chunks of fixed size;
// chunk c uses an mt19937_64 engine seeded with
// chunk_seed(seed, c) = splitmix64(seed XOR c * 0x9E3779B97F4A7C15), and
// uniforms are drawn as (x >> 11) * 2^-53. A parallel implementation that
// assigns whole chunks to threads reproduces the sequential batch exactly.
inline constexpr char kRngAlgorithmId[] =
    "mt19937_64/canonical53/chunk4096/splitmix64";
inline constexpr std::size_t kSampleChunkSize = 4096;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) {
  return splitmix64(seed ^ (chunk * 0x9E3779B97F4A7C15ull));
}

inline double canonical53(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

struct Event {
  double t_l;
  double t_r;
  Channel channel;
};

struct EventBatch {
  std::vector<Event> events;
  std::uint64_t seed = 0;
  std::string model;
  std::string rng_algorithm = kRngAlgorithmId;
  double acceptance_rate = 1.0;
};

namespace detail {

// Term-wise envelope: env(t_l,t_r) = sum_k |c_k| e^{-Re(zl_k) t_l - Re(zr_k) t_r}
// dominates |f| pointwise and is sampled per term by inverse transform.
struct Envelope {
  struct Part {
    double amp, rate_l, rate_r, cum_weight;
  };
  std::vector<Part> parts;
  double total_weight = 0.0;

  explicit Envelope(const BiExpSum& f) {
    for (const auto& t : f.terms()) {
      const double rl = t.rate_l.real(), rr = t.rate_r.real();
      if (!(rl > 0.0) || !(rr > 0.0))
        throw EnvelopeDegenerateError(
            "envelope term with nonpositive decay rate");
      const double amp = std::abs(t.coeff);
      total_weight += amp / (rl * rr);
      parts.push_back({amp, rl, rr, total_weight});
    }
    if (parts.empty())
      throw NumericalError("cannot sample an identically zero density");
  }

  double value(double t_l, double t_r) const {
    double s = 0.0;
    for (const auto& p : parts)
      s += p.amp * std::exp(-p.rate_l * t_l - p.rate_r * t_r);
    return s;
  }

  const Part& pick(double u) const {
    const double target = u * total_weight;
    for (const auto& p : parts)
      if (target <= p.cum_weight) return p;
    return parts.back();
  }
};

}  // namespace detail

// Rejection sampling of a nonnegative joint density. Deterministic given
// (seed, n); refuses negativity-flagged carriers.
inline EventBatch sample_events(const JointDensity& density, std::size_t n,
                                std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one event");
  if (density.negativity().present)
    throw NegativeDensityError(
        "density is negative (" + to_string(density.approach()) +
        "); sampling refused");
  const detail::Envelope env(density.carrier());

  EventBatch batch;
  batch.seed = seed;
  batch.model = density.descriptor();
  batch.events.reserve(n);

  std::uint64_t proposals = 0;
  const std::size_t chunks = (n + kSampleChunkSize - 1) / kSampleChunkSize;
  for (std::size_t c = 0; c < chunks; ++c) {
    std::mt19937_64 eng(chunk_seed(seed, c));
    const std::size_t begin = c * kSampleChunkSize;
    const std::size_t end = std::min(n, begin + kSampleChunkSize);
    for (std::size_t k = begin; k < end; ++k) {
      for (;;) {
        ++proposals;
        const auto& part = env.pick(canonical53(eng));
        const double t_l = -std::log1p(-canonical53(eng)) / part.rate_l;
        const double t_r = -std::log1p(-canonical53(eng)) / part.rate_r;
        const double bound = env.value(t_l, t_r);
        const double f = density.unnormalized(t_l, t_r);
        if (canonical53(eng) * bound <= std::max(f, 0.0)) {
          batch.events.push_back({t_l, t_r, density.channel()});
          break;
        }
      }
    }
  }
  batch.acceptance_rate =
      static_cast<double>(n) / static_cast<double>(proposals);
  return batch;
}

}  // namespace kaontime
