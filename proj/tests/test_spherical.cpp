#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qsm/errors.hpp"
#include "qsm/numerics.hpp"
#include "qsm/spherical.hpp"

using namespace qsm;
using namespace qsm::spherical;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed forms for d = 1, x = 1 + w = cosh(theta):
//   limit  = theta - log 2
//   finite = limit + (2 / L) log(1 - e^{-L theta})
double d1_limit(double w) { return std::acosh(1.0 + w) - std::log(2.0); }
double d1_finite(int L, double w) {
  const double theta = std::acosh(1.0 + w);
  return d1_limit(w) + 2.0 / L * std::log1p(-std::exp(-L * theta));
}

// Trapezoid rule on an n x n grid; spectrally accurate for a smooth periodic
// integrand.
double d2_grid_average(double w, int n) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      sum += std::log(w + 2.0 - std::cos(2.0 * kPi * i / n) - std::cos(2.0 * kPi * j / n));
    }
  }
  return sum / (static_cast<double>(n) * n);
}

double closed_ground(double J, double B, int d) {
  return B <= 2.0 * J * d ? -(J * d + B * B / (4.0 * J * d)) : -B;
}

}  // namespace

TEST_SUITE("spherical") {
  TEST_CASE("spectrum_term_finite: hand-enumerated lattices") {
    const auto l4 = LatticeSpec::make(1, 4);
    CHECK(spectrum_term_finite(l4, 1.0) ==
          doctest::Approx((std::log(1.0) + 2.0 * std::log(2.0) + std::log(3.0)) / 4.0).epsilon(1e-14));
    CHECK(std::abs(spectrum_term_finite(l4, 1.0) - 0.62122) < 1e-5);
    const auto l3 = LatticeSpec::make(1, 3);
    CHECK(spectrum_term_finite(l3, 2.0) ==
          doctest::Approx((std::log(2.0) + 2.0 * std::log(3.5)) / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(spectrum_term_finite(l3, 0.0), DomainError);
  }

  TEST_CASE("spectrum_term_finite: agrees with the d = 1 product formula") {
    for (int L : {3, 4, 7, 16, 33}) {
      for (double w : {1e-3, 0.2, 1.0, 9.0}) {
        CHECK(spectrum_term_finite(LatticeSpec::make(1, L), w) == doctest::Approx(d1_finite(L, w)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("spectrum term approaches log w for large w") {
    for (int d : {1, 2, 3}) {
      const auto lattice = LatticeSpec::make(d, 5);
      CHECK(std::abs(spectrum_term_finite(lattice, 1e8) - std::log(1e8)) < 1e-7);
      CHECK(std::abs(spectrum_term_limit(d, 1e8) - std::log(1e8)) < 1e-7);
    }
  }

  TEST_CASE("spectrum_term_limit: d = 1 closed form") {
    CHECK(spectrum_term_limit(1, 1.0) == doctest::Approx(std::log(2.0 + std::sqrt(3.0)) - std::log(2.0)).epsilon(1e-12));
    for (double w : {1e-6, 1e-2, 0.5, 3.0, 100.0}) {
      CHECK(spectrum_term_limit(1, w) == doctest::Approx(d1_limit(w)).epsilon(1e-11));
      CHECK(spectrum_term_limit_derivative(1, w) ==
            doctest::Approx(1.0 / std::sqrt(w * (2.0 + w))).epsilon(1e-10));
    }
    // Brute-force quadrature of the full angular integral.
    auto f = [](double t) { return std::log(2.0 - std::cos(t)); };
    const double q = numerics::integrate(f, 0.0, 2.0 * kPi).value / (2.0 * kPi);
    CHECK(spectrum_term_limit(1, 1.0) == doctest::Approx(q).epsilon(1e-12));
  }

  TEST_CASE("spectrum_term_limit: d = 2 against grid quadrature and Monte Carlo") {
    const double value = spectrum_term_limit(2, 1.0);
    CHECK(value == doctest::Approx(d2_grid_average(1.0, 256)).epsilon(1e-11));

    numerics::RandomStream rng(2024, 1);
    const int samples = 10'000'000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double x = std::log(3.0 - std::cos(2.0 * kPi * rng.uniform()) - std::cos(2.0 * kPi * rng.uniform()));
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sum_sq / samples - mean * mean) / (samples - 1));
    CHECK(std::abs(mean - value) < 3.0 * se);
  }

  TEST_CASE("spectrum_term_limit: d = 3 against grid quadrature") {
    const int n = 48;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          sum += std::log(1.5 + 3.0 - std::cos(2.0 * kPi * i / n) - std::cos(2.0 * kPi * j / n) -
                          std::cos(2.0 * kPi * k / n));
    CHECK(spectrum_term_limit(3, 1.5) == doctest::Approx(sum / (n * n * n)).epsilon(1e-10));
  }

  TEST_CASE("finite lattices converge to the limit") {
    CHECK(std::abs(spectrum_term_finite(LatticeSpec::make(1, 64), 1.0) - spectrum_term_limit(1, 1.0)) < 1e-3);
    CHECK(std::abs(spectrum_term_finite(LatticeSpec::make(1, 256), 1.0) - spectrum_term_limit(1, 1.0)) < 1e-5);
    // The gap is exponentially small at w = 1; probe close to the edge where
    // it is resolvable.
    const double w = 0.01;
    const double limit = spectrum_term_limit(1, w);
    double previous = INFINITY;
    for (int L : {8, 16, 32, 64}) {
      const double gap = std::abs(spectrum_term_finite(LatticeSpec::make(1, L), w) - limit);
      CHECK(gap < previous);
      CHECK(gap == doctest::Approx(std::abs(d1_finite(L, w) - d1_limit(w))).epsilon(1e-8));
      previous = gap;
    }
  }

  TEST_CASE("spectrum: dimension cap") {
    CHECK_THROWS_AS(Spectrum::limit(4), DimensionCap);
    CHECK_THROWS_AS(spectrum_term_limit(4, 1.0), DimensionCap);
    CHECK_THROWS_AS(LatticeSpec::make(1, 2), InvalidArgument);
    CHECK_THROWS_AS(LatticeSpec::make(64, 1000), CapExceeded);
  }

  TEST_CASE("phi: convex, linear at large w, pole at the edge for H > 0") {
    const SphericalParams p{1.0, 1.0, 0.01, 1, 2.0};
    const auto s = Spectrum::limit(1);
    for (double w : {0.1, 0.5, 1.0, 5.0}) {
      const double h = 1e-3 * w;
      CHECK(phi(p, s, w + h) - 2.0 * phi(p, s, w) + phi(p, s, w - h) > 0.0);
    }
    CHECK(phi(p, s, 1e6) / (p.beta * p.J * 1e6) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(phi(p, s, 1e-12) > 1e7);
    CHECK(phi(p, s, 1e-12) > phi(p, s, 1e-10));
    CHECK_THROWS_AS(phi(p, s, 0.0), DomainError);
  }

  TEST_CASE("phi_derivative matches a central difference") {
    const SphericalParams p{1.3, 0.7, 0.2, 2, 1.7};
    for (const auto& s : {Spectrum::limit(2), Spectrum::finite(LatticeSpec::make(2, 9))}) {
      for (double w : {0.05, 0.8, 4.0}) {
        const double h = 1e-5 * w;
        const double fd = (phi(p, s, w + h) - phi(p, s, w - h)) / (2.0 * h);
        CHECK(phi_derivative(p, s, w) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("phi: dimension mismatch is rejected") {
    const SphericalParams p{1.0, 1.0, 0.1, 2, 1.0};
    CHECK_THROWS_AS(phi(p, Spectrum::limit(1), 1.0), InvalidArgument);
  }

  TEST_CASE("property: phi is convex for random parameters") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto s1 = Spectrum::limit(1);
    for (int trial = 0; trial < 100; ++trial) {
      const SphericalParams p{0.2 + 2.0 * u(rng), 3.0 * u(rng), 2.0 * u(rng), 1, 0.1 + 5.0 * u(rng)};
      const double w = std::exp(-4.0 + 7.0 * u(rng));
      const double h = 1e-3 * w;
      const double second = phi(p, s1, w + h) - 2.0 * phi(p, s1, w) + phi(p, s1, w - h);
      CHECK(second > 0.0);
    }
  }

  TEST_CASE("solve_saddle: u0 -> B / 2J as beta grows") {
    const auto s = Spectrum::limit(1);
    double previous = INFINITY;
    for (double beta : {5.0, 50.0, 1000.0}) {
      const auto sol = solve_saddle({1.0, 4.0, 0.0, 1, beta}, s);
      CHECK(sol.status == SaddleStatus::interior);
      const double gap = std::abs(sol.w0 + 1.0 - 2.0);
      CHECK(gap < previous);
      previous = gap;
    }
    CHECK(std::abs(solve_saddle({1.0, 4.0, 0.0, 1, 50.0}, s).w0 - 1.0) < 0.05);
  }

  TEST_CASE("solve_saddle: w0 -> 0 as H -> 0 below the branch point") {
    const auto s1 = Spectrum::limit(1);
    const auto a = solve_saddle({1.0, 1.0, 1e-3, 1, 1e4}, s1);
    const auto b = solve_saddle({1.0, 1.0, 1e-4, 1, 1e4}, s1);
    CHECK(a.w0 < 0.02);
    CHECK(b.w0 < a.w0);

    const auto s2 = Spectrum::limit(2);
    double previous = INFINITY;
    for (double H : {1e-2, 1e-3, 1e-4}) {
      const double w0 = solve_saddle({1.0, 0.0, H, 2, 1e4}, s2).w0;
      CHECK(w0 > 0.0);
      CHECK(w0 < previous);
      previous = w0;
    }
  }

  TEST_CASE("solve_saddle: edge collapse is reported") {
    const auto sol = solve_saddle({1.0, 0.5, 0.0, 3, 50.0}, Spectrum::limit(3));
    CHECK(sol.status == SaddleStatus::edge);
    CHECK(sol.w0 > 0.0);
  }

  TEST_CASE("solve_saddle: the solution is a local minimum") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto s = Spectrum::limit(1);
    const numerics::RootSpec spec;
    for (int trial = 0; trial < 30; ++trial) {
      const SphericalParams p{0.5 + u(rng), 4.0 * u(rng), 0.05 + u(rng), 1, 0.2 + 10.0 * u(rng)};
      const auto sol = solve_saddle(p, s, spec);
      REQUIRE(sol.status == SaddleStatus::interior);
      const double delta = 10.0 * spec.x_tol * std::max(1.0, sol.w0);
      const double slack = 1e-14 * std::abs(sol.phi_at_w0);
      CHECK(sol.phi_at_w0 <= phi(p, s, sol.w0 + delta) + slack);
      if (sol.w0 > delta) CHECK(sol.phi_at_w0 <= phi(p, s, sol.w0 - delta) + slack);
      CHECK(sol.phi_at_w0 == doctest::Approx(phi(p, s, sol.w0)).epsilon(1e-14));
    }
  }

  TEST_CASE("ground_energy: closed-form values") {
    CHECK(std::abs(ground_energy_zero_field(1.0, 0.0, 3) + 3.0) < 1e-6);
    CHECK(std::abs(ground_energy_zero_field(1.0, 5.0, 1) + 5.0) < 1e-6);
    CHECK(std::abs(ground_energy_zero_field(1.0, 1.0, 1) + 1.25) < 1e-6);
    CHECK(ground_energy(1.0, 1.0, 0.0, 1).energy == doctest::Approx(-1.25).epsilon(1e-14));
    CHECK(ground_energy(1.0, 1.0, 0.0, 1).at_edge);
    CHECK(ground_energy(1.0, 5.0, 0.0, 1).energy == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(ground_energy(1.0, 5.0, 0.0, 1).u0 == doctest::Approx(2.5).epsilon(1e-10));
    for (int d : {1, 2, 3}) {
      CHECK(std::abs(ground_energy(1.0, 2.0 * d, 0.0, d).energy + 2.0 * d) < 1e-12);
    }
  }

  TEST_CASE("ground_energy: reproduces the phase diagram on a grid") {
    double worst = 0.0;
    for (double J : {0.5, 1.0, 2.0}) {
      for (int d : {1, 2, 3}) {
        for (double r : {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0}) {
          const double B = 2.0 * J * d * r;
          worst = std::max(worst, std::abs(ground_energy_zero_field(J, B, d) - closed_ground(J, B, d)));
        }
      }
    }
    CHECK(worst < 1e-6);
  }

  TEST_CASE("ground_energy: value and slope are continuous at B = 2Jd") {
    for (int d : {1, 2, 3}) {
      for (double J : {0.5, 1.0, 2.0}) {
        const double Bc = 2.0 * J * d;
        const double h = 1e-7;
        const double left = ground_energy(J, Bc - h, 0.0, d).energy;
        const double mid = ground_energy(J, Bc, 0.0, d).energy;
        const double right = ground_energy(J, Bc + h, 0.0, d).energy;
        CHECK(std::abs(left - mid) < 1e-5);
        CHECK(std::abs(right - mid) < 1e-5);
        const double slope_left = (mid - left) / h;
        const double slope_right = (right - mid) / h;
        CHECK(std::abs(slope_left - slope_right) < 1e-5);
        CHECK(slope_left == doctest::Approx(-1.0).epsilon(1e-5));
      }
    }
  }

  TEST_CASE("ground_energy: nonincreasing in B") {
    for (int d : {1, 2}) {
      for (double H : {0.0, 0.3}) {
        double previous = INFINITY;
        for (int i = 0; i <= 40; ++i) {
          const double e = ground_energy(1.0, 0.2 * i, H, d).energy;
          CHECK(e <= previous);
          previous = e;
        }
      }
    }
  }

  TEST_CASE("ground_energy with H > 0 lies below the H = 0 value") {
    CHECK(ground_energy(1.0, 1.0, 0.1, 1).energy < ground_energy(1.0, 1.0, 0.0, 1).energy);
    CHECK(!ground_energy(1.0, 1.0, 0.1, 1).at_edge);
  }

  TEST_CASE("free_energy_finite_beta: approach to the ground state") {
    const auto s = Spectrum::limit(1);
    double previous = INFINITY;
    for (double beta : {10.0, 20.0, 40.0}) {
      const auto f = free_energy_finite_beta({1.0, 5.0, 0.0, 1, beta}, s);
      const double gap = std::abs(f.value + 5.0);
      CHECK(gap < previous);
      previous = gap;
      CHECK(f.method == Method::saddle);
    }
    CHECK(previous < 0.2);
    CHECK(std::abs(free_energy_finite_beta({1.0, 1.0, 1e-4, 1, 1e4}, s).value + 1.25) < 1e-2);
  }

  TEST_CASE("free_energy_finite_beta: finite lattice close to the limit") {
    const SphericalParams p{1.0, 3.0, 0.0, 1, 5.0};
    const double finite = free_energy_finite_beta(p, Spectrum::finite(LatticeSpec::make(1, 64))).value;
    const double limit = free_energy_finite_beta(p, Spectrum::limit(1)).value;
    CHECK(std::abs(finite - limit) < 1e-3);
  }

  TEST_CASE("log_partition_per_site and free energy are consistent") {
    const SphericalParams p{1.0, 1.0, 0.5, 1, 0.5};
    const auto s = Spectrum::limit(1);
    CHECK(-log_partition_per_site(p, s) / p.beta == doctest::Approx(free_energy_finite_beta(p, s).value).epsilon(1e-14));
  }

  TEST_CASE("susceptibility at zero field is 1 / 2Jd") {
    CHECK(std::abs(susceptibility_at_zero_field(1.0, 1) - 0.5) < 1e-6);
    CHECK(std::abs(susceptibility_at_zero_field(1.0, 3) - 1.0 / 6.0) < 1e-6);
    CHECK(std::abs(susceptibility_at_zero_field(2.0, 2) - 0.125) < 1e-6);
  }

  TEST_CASE("invalid parameters are rejected") {
    const auto s = Spectrum::limit(1);
    CHECK_THROWS_AS(solve_saddle({0.0, 1.0, 0.0, 1, 1.0}, s), InvalidArgument);
    CHECK_THROWS_AS(solve_saddle({1.0, -1.0, 0.0, 1, 1.0}, s), InvalidArgument);
    CHECK_THROWS_AS(solve_saddle({1.0, 1.0, -0.1, 1, 1.0}, s), InvalidArgument);
    CHECK_THROWS_AS(solve_saddle({1.0, 1.0, 0.0, 1, 0.0}, s), InvalidArgument);
    CHECK_THROWS_AS(ground_energy(1.0, 1.0, 0.0, 0), InvalidArgument);
  }
}
