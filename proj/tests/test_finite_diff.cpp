#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "kaontime/finite_diff.hpp"

using namespace kaontime;

TEST_CASE("mixed stencil on a product exponential") {
  auto P = [](double tl, double tr) { return std::exp(-tl - tr); };
  const double v = finite_diff_mixed(P, 0.5, 0.5, 1e-4);
  CHECK(std::abs(v - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("mixed stencil is exact on bilinear functions") {
  auto P = [](double tl, double tr) { return tl * tr; };
  CHECK(finite_diff_mixed(P, 1.0, 1.0, 1e-3) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("points near the boundary are shifted inward") {
  auto P = [](double tl, double tr) { return std::exp(-tl - tr); };
  // evaluates at (h,h) instead of (0,0); all stencil points stay in range
  const double v = finite_diff_mixed(P, 0.0, 0.0, 1e-3);
  CHECK(std::abs(v - std::exp(-2e-3)) < 1e-6);
}

TEST_CASE("second-order convergence") {
  auto P = [](double tl, double tr) {
    return std::exp(-1.3 * tl - 0.7 * tr) * std::cos(0.5 * (tl - tr));
  };
  auto exact_mixed = [&P](double tl, double tr) {
    // d^2/dtl dtr of Re[e^{-(1.3+0.5i)tl}e^{-(0.7-0.5i)tr}]
    const std::complex<double> zl(1.3, 0.5), zr(0.7, -0.5);
    return (zl * zr * std::exp(-zl * tl - zr * tr)).real();
  };
  const double tl = 0.8, tr = 1.7;
  const double e1 = std::abs(finite_diff_mixed(P, tl, tr, 2e-3) - exact_mixed(tl, tr));
  const double e2 = std::abs(finite_diff_mixed(P, tl, tr, 1e-3) - exact_mixed(tl, tr));
  CHECK(e2 < e1 / 3.0);  // ~4x reduction expected
}

TEST_CASE("richardson refinement improves the estimate") {
  auto P = [](double tl, double tr) { return std::exp(-1.7 * tl - 0.3 * tr); };
  const double exact = 1.7 * 0.3 * std::exp(-1.7 * 0.9 - 0.3 * 1.1);
  const double plain = std::abs(finite_diff_mixed(P, 0.9, 1.1, 1e-2) - exact);
  const double rich = std::abs(finite_diff_mixed_richardson(P, 0.9, 1.1, 1e-2) - exact);
  CHECK(rich < plain);
}

TEST_CASE("gradient sum stencil") {
  auto P = [](double tl, double tr) { return std::exp(-2.0 * tl - 3.0 * tr); };
  const double v = finite_diff_grad_sum(P, 0.4, 0.6, 1e-4);
  const double exact = (-2.0 - 3.0) * std::exp(-2.0 * 0.4 - 3.0 * 0.6);
  CHECK(std::abs(v - exact) < 1e-7);
}

TEST_CASE("nonpositive step rejected") {
  auto P = [](double, double) { return 0.0; };
  CHECK_THROWS_AS(finite_diff_mixed(P, 1.0, 1.0, 0.0), std::invalid_argument);
}
