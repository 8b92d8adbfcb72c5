#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "qsm/kernels.hpp"

using namespace qsm;
using namespace qsm::kernels;

TEST_SUITE("kernels") {
  TEST_CASE("mode table enumerates d - sum cos") {
    const ModeTable t(5, 2);
    CHECK(t.modes == 25);
    for (std::int64_t m = 0; m < t.modes; ++m) {
      const double w1 = 2.0 * std::numbers::pi * (m % 5) / 5.0;
      const double w2 = 2.0 * std::numbers::pi * (m / 5) / 5.0;
      CHECK(t.edge_distance(m) == doctest::Approx(2.0 - std::cos(w1) - std::cos(w2)).epsilon(1e-14));
    }
    CHECK(t.edge_distance(0) == 0.0);
  }

  TEST_CASE("bond table lists each periodic bond once") {
    const BondTable b(4, 2);
    CHECK(b.sites == 16);
    CHECK(b.neighbours.size() == 32);
    // site (3, 1) = 3 + 4: +x neighbour wraps to (0, 1), +y neighbour is (3, 2).
    CHECK(b.neighbours[7 * 2 + 0] == 4);
    CHECK(b.neighbours[7 * 2 + 1] == 11);
  }

  TEST_CASE("omp mode sums agree with the serial reference") {
    for (auto [L, d] : {std::pair{4, 1}, {64, 1}, {17, 2}, {24, 3}}) {
      const ModeTable t(L, d);
      for (double w : {1e-6, 0.3, 5.0}) {
        CHECK(omp::mode_log_mean(t, w) == doctest::Approx(serial::mode_log_mean(t, w)).epsilon(1e-13));
        CHECK(omp::mode_inverse_mean(t, w) == doctest::Approx(serial::mode_inverse_mean(t, w)).epsilon(1e-13));
        CHECK(omp::mode_inverse_square_mean(t, w) ==
              doctest::Approx(serial::mode_inverse_square_mean(t, w)).epsilon(1e-13));
      }
      const std::complex<double> z{0.7, 3.2};
      CHECK(std::abs(omp::mode_log_mean(t, z) - serial::mode_log_mean(t, z)) < 1e-13);
    }
  }

  TEST_CASE("omp mode sums do not depend on the thread count") {
    const ModeTable t(40, 3);
    set_thread_count(1);
    const double one = omp::mode_log_mean(t, 0.2);
    set_thread_count(4);
    const double four = omp::mode_log_mean(t, 0.2);
    set_thread_count(0);
    CHECK(one == four);
  }

  TEST_CASE("fourier coefficients: serial and omp are bitwise equal") {
    const int nodes = 256;
    std::vector<std::complex<double>> samples(nodes);
    for (int j = 0; j < nodes; ++j) {
      const double t = 2.0 * std::numbers::pi * j / nodes;
      samples[j] = {std::exp(std::cos(t)), std::sin(3.0 * t)};
    }
    const auto a = serial::fourier_coefficients(samples, 20);
    const auto b = omp::fourier_coefficients(samples, 20);
    REQUIRE(a.size() == 41);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    // exp(cos t) has c_m = I_m(1); i sin(3t) adds +1/2 at m = 3 and -1/2 at m = -3.
    const double i3 = std::cyl_bessel_i(3.0, 1.0);
    CHECK(a[20].real() == doctest::Approx(std::cyl_bessel_i(0.0, 1.0)).epsilon(1e-14));
    CHECK(a[23].real() == doctest::Approx(i3 + 0.5).epsilon(1e-13));
    CHECK(a[17].real() == doctest::Approx(i3 - 0.5).epsilon(1e-13));
    CHECK(std::abs(a[23].imag()) < 1e-15);
  }

  TEST_CASE("sphere batches: serial and omp are bitwise equal across thread counts") {
    const BondTable bonds(4, 1);
    SphereWeights w{0.5, 0.5, 0.25, 2.0};
    const numerics::RandomStream stream(123, 9);
    const auto ref = serial::sphere_batches(bonds, w, stream, 5000, 700);
    for (int threads : {1, 3}) {
      set_thread_count(threads);
      const auto par = omp::sphere_batches(bonds, w, stream, 5000, 700);
      REQUIRE(par.size() == ref.size());
      for (std::size_t b = 0; b < ref.size(); ++b) {
        CHECK(par[b].sum == ref[b].sum);
        CHECK(par[b].sum_sq == ref[b].sum_sq);
        CHECK(par[b].count == ref[b].count);
      }
    }
    set_thread_count(0);
    std::int64_t total = 0;
    for (const auto& b : ref) total += b.count;
    CHECK(total == 5000);
    CHECK(ref.back().count == 5000 - 7 * 700);
  }

  TEST_CASE("sphere batches: zero couplings give the constant integrand") {
    const BondTable bonds(3, 1);
    const auto r = omp::sphere_batches(bonds, SphereWeights{}, numerics::RandomStream(1, 1), 1000, 100);
    for (const auto& b : r) {
      CHECK(b.sum == 100.0);
      CHECK(b.sum_sq == 100.0);
    }
  }
}
