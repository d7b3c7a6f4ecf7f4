#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "kaontime/errors.hpp"

namespace kaontime {

// f(t_l,t_r) = sum_k c_k * exp(-z_{l,k} t_l) * exp(-z_{r,k} t_r).
//
// Every density and survival probability in the model is exactly of this
// form, which makes differentiation and normalization closed-form term
// algebra. Terms must have Re(z) >= 0 so the semi-infinite integrals exist.

struct BiExpTerm {
  std::complex<double> coeff;
  std::complex<double> rate_l;
  std::complex<double> rate_r;
};

class BiExpSum {
 public:
  // Exponent pairs equal within this tolerance are merged.
  static constexpr double kMergeTol = 1e-12;
  // Coefficients below this fraction of the largest are dropped.
  static constexpr double kDropRel = 1e-16;

  BiExpSum() = default;
  explicit BiExpSum(std::vector<BiExpTerm> terms) : terms_(std::move(terms)) {
    merge();
  }

  static BiExpSum term(std::complex<double> c, std::complex<double> zl,
                       std::complex<double> zr) {
    return BiExpSum({BiExpTerm{c, zl, zr}});
  }

  const std::vector<BiExpTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  std::complex<double> eval(double t_l, double t_r) const {
    std::complex<double> s = 0.0;
    for (const auto& t : terms_)
      s += t.coeff * std::exp(-t.rate_l * t_l - t.rate_r * t_r);
    return s;
  }

  double eval_real(double t_l, double t_r) const { return eval(t_l, t_r).real(); }

  // f * conj(f); real-valued pointwise.
  BiExpSum modsq() const {
    std::vector<BiExpTerm> out;
    out.reserve(terms_.size() * terms_.size());
    for (const auto& a : terms_)
      for (const auto& b : terms_)
        out.push_back({a.coeff * std::conj(b.coeff),
                       a.rate_l + std::conj(b.rate_l),
                       a.rate_r + std::conj(b.rate_r)});
    return BiExpSum(std::move(out));
  }

  // d^2/dt_l dt_r, exact: each coefficient picks up z_l * z_r.
  BiExpSum mixed_derivative() const {
    std::vector<BiExpTerm> out = terms_;
    for (auto& t : out) t.coeff *= t.rate_l * t.rate_r;
    return BiExpSum(std::move(out));
  }

  // -(d/dt_l + d/dt_r), exact: each coefficient picks up z_l + z_r.
  BiExpSum sum_derivative() const {
    std::vector<BiExpTerm> out = terms_;
    for (auto& t : out) t.coeff *= t.rate_l + t.rate_r;
    return BiExpSum(std::move(out));
  }

  // Integral over [0,inf)^2 = sum_k c_k / (z_{l,k} z_{r,k}).
  std::complex<double> integral() const {
    std::complex<double> s = 0.0;
    for (const auto& t : terms_) {
      if (!(t.rate_l.real() > 0.0) || !(t.rate_r.real() > 0.0))
        throw NumericalError("non-integrable term: Re(rate) <= 0");
      s += t.coeff / (t.rate_l * t.rate_r);
    }
    return s;
  }

  // Integral over [a_l,b_l] x [a_r,b_r]; either upper bound may be
  // infinity (requires Re(rate) > 0 on that axis).
  std::complex<double> box_integral(double a_l, double b_l, double a_r,
                                    double b_r) const {
    std::complex<double> s = 0.0;
    for (const auto& t : terms_)
      s += t.coeff * axis_integral(t.rate_l, a_l, b_l) *
           axis_integral(t.rate_r, a_r, b_r);
    return s;
  }

  BiExpSum scaled(std::complex<double> factor) const {
    std::vector<BiExpTerm> out = terms_;
    for (auto& t : out) t.coeff *= factor;
    return BiExpSum(std::move(out));
  }

  friend BiExpSum operator+(const BiExpSum& a, const BiExpSum& b) {
    std::vector<BiExpTerm> out = a.terms_;
    out.insert(out.end(), b.terms_.begin(), b.terms_.end());
    return BiExpSum(std::move(out));
  }

  // Slowest decay rate along each axis; drives transform scales and the
  // sampling envelope.
  double min_rate_l() const { return min_rate([](const BiExpTerm& t) { return t.rate_l.real(); }); }
  double min_rate_r() const { return min_rate([](const BiExpTerm& t) { return t.rate_r.real(); }); }

 private:
  std::vector<BiExpTerm> terms_;

  template <typename Sel>
  double min_rate(Sel sel) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& t : terms_) m = std::min(m, sel(t));
    return m;
  }

  static std::complex<double> axis_integral(std::complex<double> z, double a,
                                            double b) {
    if (std::isinf(b)) {
      if (!(z.real() > 0.0))
        throw NumericalError("non-integrable term: Re(rate) <= 0");
      return std::exp(-z * a) / z;
    }
    if (std::abs(z) < 1e-300) return std::complex<double>(b - a, 0.0);
    return (std::exp(-z * a) - std::exp(-z * b)) / z;
  }

  void merge() {
    std::vector<BiExpTerm> merged;
    merged.reserve(terms_.size());
    for (const auto& t : terms_) {
      bool found = false;
      for (auto& m : merged) {
        if (std::abs(m.rate_l - t.rate_l) <= kMergeTol &&
            std::abs(m.rate_r - t.rate_r) <= kMergeTol) {
          m.coeff += t.coeff;
          found = true;
          break;
        }
      }
      if (!found) merged.push_back(t);
    }
    double largest = 0.0;
    for (const auto& m : merged) largest = std::max(largest, std::abs(m.coeff));
    terms_.clear();
    for (const auto& m : merged)
      if (std::abs(m.coeff) > kDropRel * largest) terms_.push_back(m);
  }
};

}  // namespace kaontime
