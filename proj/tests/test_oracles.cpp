#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qsm/errors.hpp"
#include "qsm/ising_chain.hpp"
#include "qsm/kernels.hpp"
#include "qsm/oracles.hpp"
#include "qsm/spherical.hpp"
#include "qsm/toeplitz.hpp"

using namespace qsm;
using namespace qsm::oracles;
using spherical::LatticeSpec;
using spherical::SphericalParams;

namespace {

constexpr double kPi = std::numbers::pi;

// Decoupled sites (J = 0): the exponent is a . r with |a| = beta N hypot(B, H)
// / sqrt(N), and the sphere average of exp(a . r) over radius sqrt(N) in
// n = 3N dimensions is Gamma(n/2) (2/x)^{n/2-1} I_{n/2-1}(x), x = beta N hypot(B, H).
double decoupled_log_Z(int N, double beta, double B, double H) {
  const double n = 3.0 * N;
  const double measure = 1.5 * N * std::log(kPi) + (1.5 * N - 1.0) * std::log(N) - std::lgamma(1.5 * N);
  const double x = beta * N * std::hypot(B, H);
  if (x == 0.0) return measure;
  const double nu = n / 2.0 - 1.0;
  return measure + std::lgamma(n / 2.0) + nu * std::log(2.0 / x) + std::log(std::cyl_bessel_i(nu, x));
}

}  // namespace

TEST_SUITE("oracles") {
  TEST_CASE("ed: decoupled spins") {
    const double f = ed_free_energy({4, 0.0, 1.0, 1.0});
    CHECK(f == doctest::Approx(-std::log(2.0 * std::cosh(1.0))).epsilon(1e-13));
  }

  TEST_CASE("ed: classical ferromagnet ground energy") {
    for (int L : {4, 7, 10}) {
      const auto e = ed_spectrum({L, 1.0, 0.0, 1.0});
      CHECK(e.size() == (std::size_t{1} << L));
      CHECK(e.front() / L == doctest::Approx(-1.0).epsilon(1e-13));
      CHECK(e[1] == doctest::Approx(e[0]).epsilon(1e-13));
    }
  }

  TEST_CASE("ed: spectrum is even in B") {
    for (double B : {0.3, 1.0, 2.2}) {
      const auto plus = ed_spectrum({8, 1.0, B, 1.0});
      const auto minus = ed_spectrum({8, 1.0, -B, 1.0});
      for (std::size_t i = 0; i < plus.size(); ++i) CHECK(plus[i] == doctest::Approx(minus[i]).epsilon(1e-12));
      CHECK(ed_free_energy({8, 1.0, B, 0.7}) == doctest::Approx(ed_free_energy({8, 1.0, -B, 0.7})).epsilon(1e-13));
    }
  }

  TEST_CASE("ed: trace of H is zero and the spectrum bounds are sane") {
    const auto e = ed_spectrum({6, 1.0, 0.8, 1.0});
    double trace = 0.0;
    for (double v : e) trace += v;
    CHECK(std::abs(trace) < 1e-10);
    CHECK(e.front() >= -6.0 * (1.0 + 0.8) - 1e-12);
  }

  TEST_CASE("ed: correlation limits") {
    const auto ordered = ed_correlation({8, 1.0, 0.0, 50.0}, 0, 3);
    CHECK(ordered.value == doctest::Approx(1.0).epsilon(1e-12));
    const auto paramagnet = ed_correlation({8, 0.0, 1.0, 50.0}, 0, 1);
    CHECK(std::abs(paramagnet.value) < 1e-12);
    CHECK(paramagnet.ground_dominated);
    CHECK_THROWS_AS(ed_correlation({8, 1.0, 0.0, 1.0}, 3, 3), InvalidArgument);
  }

  TEST_CASE("ed: L = 12 chain against the infinite-chain ground energy") {
    const double f = ed_free_energy({12, 1.0, 0.5, 20.0});
    CHECK(std::abs(f - ising::ground_energy(1.0, 0.5).value) < 5e-3);
  }

  TEST_CASE("ed: finite chains converge geometrically to the infinite chain") {
    const double f_inf = ising::free_energy({1.0, 0.5, 1.0}).value;
    double previous = INFINITY;
    for (int L : {6, 8, 10, 12}) {
      const double gap = std::abs(ed_free_energy({L, 1.0, 0.5, 1.0}) - f_inf);
      CHECK(gap < 0.6 * previous);
      previous = gap;
    }
    CHECK(previous < 3e-3);
  }

  TEST_CASE("ed: L = 12 correlation against the Toeplitz determinant") {
    const auto c = ed_correlation({12, 1.0, 0.6, 50.0}, 0, 2);
    const double det = toeplitz::correlation_determinant({0.6, 2}).det_value;
    CHECK(std::abs(c.value - det) < 1e-2);
  }

  TEST_CASE("ed: size cap") {
    CHECK_THROWS_AS(ed_spectrum({13, 1.0, 0.5, 1.0}), DimensionCap);
    CHECK_THROWS_AS(ed_spectrum({3, 1.0, 0.5, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(ed_spectrum({6, -1.0, 0.5, 1.0}), InvalidArgument);
  }

  TEST_CASE("sphere measure closed form") {
    CHECK(log_sphere_measure(4) == doctest::Approx(std::log(std::pow(kPi, 6) * std::pow(4.0, 5) / 120.0)).epsilon(1e-14));
  }

  TEST_CASE("contour: decoupled sites reproduce the closed form") {
    const auto lattice = LatticeSpec::make(1, 4);
    const auto bare = contour_partition({0.0, 0.0, 0.0, 1, 1.0}, lattice);
    CHECK(std::abs(bare.log_Z - log_sphere_measure(4)) < 1e-10);
    for (auto [B, H] : {std::pair{1.0, 0.0}, {0.3, 0.5}}) {
      const auto r = contour_partition({0.0, B, H, 1, 0.5}, lattice);
      CHECK(std::abs(r.log_Z - decoupled_log_Z(4, 0.5, B, H)) < 1e-10);
    }
  }

  TEST_CASE("contour: independent of the abscissa") {
    const SphericalParams p{1.0, 1.0, 0.5, 1, 0.5};
    const auto lattice = LatticeSpec::make(1, 4);
    const auto a = contour_partition(p, lattice);
    const auto b = contour_partition(p, lattice, ContourOptions{1.5});
    CHECK(b.abscissa > a.abscissa);
    CHECK(std::abs(a.log_Z - b.log_Z) < 1e-8);
    const auto c = contour_partition({0.0, 1.0, 0.5, 1, 0.5}, lattice, ContourOptions{1.5});
    CHECK(std::abs(c.log_Z - contour_partition({0.0, 1.0, 0.5, 1, 0.5}, lattice).log_Z) < 1e-8);
  }

  TEST_CASE("monte carlo: decoupled sites") {
    const auto lattice = LatticeSpec::make(1, 4);
    MCSpec mc;
    mc.samples = 10'000;
    mc.batch_size = 1'000;
    const auto bare = sphere_mc_partition({0.0, 0.0, 0.0, 1, 1.0}, lattice, mc);
    CHECK(bare.log_Z == doctest::Approx(log_sphere_measure(4)).epsilon(1e-14));
    CHECK(bare.std_err == 0.0);

    mc.samples = 200'000;
    const auto field = sphere_mc_partition({0.0, 0.3, 0.5, 1, 0.5}, lattice, mc);
    CHECK(std::abs(field.log_Z - decoupled_log_Z(4, 0.5, 0.3, 0.5)) < 4.0 * field.std_err);
  }

  TEST_CASE("monte carlo agrees with the contour integral") {
    const SphericalParams p{1.0, 1.0, 0.5, 1, 0.5};
    const auto lattice = LatticeSpec::make(1, 4);
    MCSpec mc;
    mc.samples = 1'000'000;
    mc.stream = numerics::RandomStream(7, 0);
    const auto m = sphere_mc_partition(p, lattice, mc);
    const auto c = contour_partition(p, lattice);
    CHECK(std::abs(m.log_Z - c.log_Z) < 3.0 * std::hypot(m.std_err, c.err_est));
    CHECK(m.std_err < 1e-2);
  }

  TEST_CASE("monte carlo: deterministic for any thread count") {
    const SphericalParams p{1.0, 0.7, 0.2, 2, 0.4};
    const auto lattice = LatticeSpec::make(2, 3);
    MCSpec mc;
    mc.samples = 50'000;
    mc.batch_size = 3'000;
    mc.stream = numerics::RandomStream(99, 4);
    kernels::set_thread_count(1);
    const auto one = sphere_mc_partition(p, lattice, mc);
    kernels::set_thread_count(3);
    const auto three = sphere_mc_partition(p, lattice, mc);
    kernels::set_thread_count(0);
    CHECK(one.log_Z == three.log_Z);
    CHECK(one.std_err == three.std_err);
    CHECK(one.batch_means == three.batch_means);
    const auto again = sphere_mc_partition(p, lattice, mc);
    CHECK(again.log_Z == one.log_Z);
  }

  TEST_CASE("monte carlo: standard error scales as samples^-1/2") {
    const SphericalParams p{1.0, 1.0, 0.5, 1, 0.5};
    const auto lattice = LatticeSpec::make(1, 4);
    MCSpec mc;
    mc.samples = 100'000;
    mc.batch_size = 5'000;
    const double small = sphere_mc_partition(p, lattice, mc).std_err;
    mc.samples = 400'000;
    const double large = sphere_mc_partition(p, lattice, mc).std_err;
    const double ratio = small / large;
    CHECK(ratio > 1.0);
    CHECK(ratio < 4.0);
  }

  TEST_CASE("monte carlo: argument checks") {
    MCSpec mc;
    mc.samples = 1;
    CHECK_THROWS_AS(sphere_mc_partition({1.0, 1.0, 0.5, 1, 0.5}, LatticeSpec::make(1, 4), mc), InvalidArgument);
    CHECK_THROWS_AS(sphere_mc_partition({1.0, 1.0, 0.5, 1, 0.5}, LatticeSpec::make(1, 65), MCSpec{}), DimensionCap);
    CHECK_THROWS_AS(sphere_mc_partition({1.0, 1.0, 0.5, 2, 0.5}, LatticeSpec::make(1, 4), MCSpec{}), InvalidArgument);
  }

  TEST_CASE("contour per-site log Z approaches the saddle value as L grows") {
    const SphericalParams p{1.0, 1.0, 0.5, 1, 0.5};
    const double saddle = spherical::log_partition_per_site(p, spherical::Spectrum::limit(1));
    double previous = INFINITY;
    for (int L : {4, 8, 16}) {
      const double per_site = contour_partition(p, LatticeSpec::make(1, L)).log_Z / L;
      const double gap = std::abs(per_site - saddle);
      CHECK(gap < previous);
      previous = gap;
    }
  }
}
