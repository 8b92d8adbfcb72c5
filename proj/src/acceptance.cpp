#include "qsm/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <numbers>
#include <random>

#include "qsm/ising_chain.hpp"
#include "qsm/numerics.hpp"
#include "qsm/oracles.hpp"
#include "qsm/spherical.hpp"
#include "qsm/toeplitz.hpp"

namespace qsm::acceptance {

namespace {

std::string printf_string(const char* fmt, ...) {
  char buffer[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buffer, sizeof buffer, fmt, args);
  va_end(args);
  return buffer;
}

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    if (!ok) {
      passed = false;
      detail += " FAILED";
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  std::vector<std::string> tags;
  double budget_seconds;
  Outcome (*body)();
};

Outcome tfim_ground_energy() {
  Outcome o;
  const double e0 = ising::ground_energy(1.0, 0.0).value;
  const double e1 = ising::ground_energy(1.0, 1.0).value;
  o.require(std::abs(e0 + 1.0) < 1e-12, printf_string("|f(B=0) + 1| = %.2e < 1e-12", std::abs(e0 + 1.0)));
  const double err1 = std::abs(e1 + 4.0 / std::numbers::pi);
  o.require(err1 < 1e-10, printf_string("|f(B=1) + 4/pi| = %.2e < 1e-10", err1));
  return o;
}

Outcome tfim_duality() {
  Outcome o;
  const double values[] = {0.2, 0.5, 1.0, 1.7, 3.0};
  double worst = 0.0;
  for (double J : values)
    for (double B : values)
      for (double beta : {0.3, 1.0, 4.0})
        worst = std::max(worst, std::abs(ising::free_energy({J, B, beta}).value - ising::free_energy({B, J, beta}).value));
  o.require(worst < 1e-10, printf_string("max |f(J,B) - f(B,J)| = %.2e < 1e-10 over 75 points", worst));
  return o;
}

Outcome toeplitz_szego() {
  Outcome o;
  const auto ordered = toeplitz::correlation_determinant({0.6, 20});
  const double gap = std::abs(ordered.det_value - std::pow(1.0 - 0.36, 0.25));
  o.require(gap < 1e-3, printf_string("|D_20(0.6) - 0.64^(1/4)| = %.2e < 1e-3", gap));
  const double disordered = std::abs(toeplitz::correlation_determinant({1.2, 64}).det_value);
  o.require(disordered < 1e-3, printf_string("|D_64(1.2)| = %.2e < 1e-3", disordered));
  return o;
}

Outcome ed_cross_check() {
  Outcome o;
  const double f_ed = oracles::ed_free_energy({12, 1.0, 0.5, 20.0});
  const double f_inf = ising::ground_energy(1.0, 0.5).value;
  o.require(std::abs(f_ed - f_inf) < 5e-3, printf_string("|f_ED(L=12) - f_inf| = %.2e < 5e-3", std::abs(f_ed - f_inf)));
  const auto c = oracles::ed_correlation({12, 1.0, 0.6, 50.0}, 0, 2);
  const double det = toeplitz::correlation_determinant({0.6, 2}).det_value;
  o.require(std::abs(c.value - det) < 1e-2,
            printf_string("|C_ED(2) - D_2(0.6)| = %.2e < 1e-2 (beta*gap %.2g)", std::abs(c.value - det), c.beta_gap));
  return o;
}

double closed_ground(double J, double B, int d) { return B <= 2.0 * J * d ? -(J * d + B * B / (4.0 * J * d)) : -B; }

Outcome spherical_phase_diagram() {
  Outcome o;
  double worst = 0.0;
  for (double J : {0.5, 1.0, 2.0})
    for (int d : {1, 2, 3})
      for (double r : {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0}) {
        const double B = 2.0 * J * d * r;
        worst = std::max(worst, std::abs(spherical::ground_energy_zero_field(J, B, d) - closed_ground(J, B, d)));
      }
  o.require(worst < 1e-6, printf_string("max |f - closed form| = %.2e < 1e-6 over 63 points", worst));

  double jump = 0.0, kink = 0.0;
  const double h = 1e-7;
  for (double J : {0.5, 1.0, 2.0})
    for (int d : {1, 2, 3}) {
      const double Bc = 2.0 * J * d;
      const double left = spherical::ground_energy(J, Bc - h, 0.0, d).energy;
      const double mid = spherical::ground_energy(J, Bc, 0.0, d).energy;
      const double right = spherical::ground_energy(J, Bc + h, 0.0, d).energy;
      jump = std::max({jump, std::abs(mid - left), std::abs(right - mid)});
      kink = std::max(kink, std::abs((mid - left) / h - (right - mid) / h));
    }
  o.require(jump < 1e-5, printf_string("continuity at B=2Jd %.2e < 1e-5", jump));
  o.require(kink < 1e-5, printf_string("slope jump at B=2Jd %.2e < 1e-5", kink));
  return o;
}

Outcome spherical_saddle_limit() {
  Outcome o;
  const auto sol = spherical::solve_saddle({1.0, 4.0, 0.0, 1, 1e3}, spherical::Spectrum::limit(1));
  const double u0 = sol.w0 + 1.0;
  o.require(std::abs(u0 - 2.0) < 1e-3 && sol.status == spherical::SaddleStatus::interior,
            printf_string("|u0 - B/2J| = %.2e < 1e-3 at beta=1e3", std::abs(u0 - 2.0)));
  return o;
}

Outcome susceptibility() {
  Outcome o;
  for (auto [J, d] : {std::pair{1.0, 1}, {1.0, 3}, {2.0, 2}}) {
    const double target = 1.0 / (2.0 * J * d);
    const double s = spherical::susceptibility_at_zero_field(J, d);
    o.require(std::abs(s - target) < 1e-6, printf_string("spherical chi(J=%g,d=%d) err %.1e", J, d, std::abs(s - target)));
    const double c = ising::susceptibility_at_zero_field(J);
    o.require(std::abs(c - 1.0 / (2.0 * J)) < 1e-4, printf_string("chain chi(J=%g) err %.1e", J, std::abs(c - 1.0 / (2.0 * J))));
  }
  const double gap = std::abs(ising::susceptibility_at_zero_field(1.0) - spherical::susceptibility_at_zero_field(1.0, 1));
  o.require(gap < 1e-4, printf_string("chain vs spherical at d=1 %.1e < 1e-4", gap));
  return o;
}

Outcome spherical_oracles() {
  Outcome o;
  const spherical::SphericalParams p{1.0, 1.0, 0.5, 1, 0.5};
  const auto lattice = spherical::LatticeSpec::make(1, 4);
  const auto contour = oracles::contour_partition(p, lattice);
  oracles::MCSpec mc;
  mc.samples = 1'000'000;
  const auto sample = oracles::sphere_mc_partition(p, lattice, mc);
  const double sigma = std::hypot(contour.err_est, sample.std_err);
  const double diff = std::abs(contour.log_Z - sample.log_Z);
  o.require(diff < 3.0 * sigma, printf_string("|contour - MC| = %.2e < 3 sigma = %.2e", diff, 3.0 * sigma));

  const auto shifted = oracles::contour_partition(p, lattice, oracles::ContourOptions{1.5});
  const double shift = std::abs(shifted.log_Z - contour.log_Z);
  o.require(shift < 1e-8, printf_string("abscissa invariance %.1e < 1e-8", shift));

  const auto bare = oracles::contour_partition({0.0, 0.0, 0.0, 1, 1.0}, lattice);
  const double exact = std::abs(bare.log_Z - oracles::log_sphere_measure(4));
  o.require(exact < 1e-10, printf_string("J=0 sphere measure %.1e < 1e-10", exact));
  return o;
}

Outcome finite_beta() {
  Outcome o;
  const auto s = spherical::Spectrum::limit(1);
  double previous = INFINITY;
  bool monotone = true;
  double last = 0.0;
  for (double beta : {10.0, 20.0, 40.0}) {
    last = std::abs(spherical::free_energy_finite_beta({1.0, 5.0, 0.0, 1, beta}, s).value + 5.0);
    monotone = monotone && last < previous;
    previous = last;
  }
  o.require(monotone && last < 0.2, printf_string("spherical |f(40) + 5| = %.3f < 0.2, monotone", last));
  const double tfim = std::abs(ising::free_energy({1.0, 0.5, 20.0}).value - ising::ground_energy(1.0, 0.5).value);
  o.require(tfim < 1e-6, printf_string("TFIM |f(20) - f_inf| = %.1e < 1e-6", tfim));
  return o;
}

Outcome property_suites() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int trials = 100;

  int convexity = 0;
  const auto s1 = spherical::Spectrum::limit(1);
  for (int t = 0; t < trials; ++t) {
    const spherical::SphericalParams p{0.2 + 2.0 * u(rng), 3.0 * u(rng), 2.0 * u(rng), 1, 0.1 + 5.0 * u(rng)};
    const double w = std::exp(-4.0 + 7.0 * u(rng));
    const double h = 1e-3 * w;
    if (!(spherical::phi(p, s1, w + h) - 2.0 * spherical::phi(p, s1, w) + spherical::phi(p, s1, w - h) > 0.0))
      ++convexity;
  }
  o.require(convexity == 0, printf_string("phi convexity %d/%d failures", convexity, trials));

  int monotone = 0;
  for (int t = 0; t < trials; ++t) {
    const auto seq = toeplitz::correlation_sequence(0.95 * u(rng), 32);
    for (std::size_t i = 1; i < seq.size(); ++i) {
      if (seq[i].det_value > seq[i - 1].det_value + 1e-13) {
        ++monotone;
        break;
      }
    }
  }
  o.require(monotone == 0, printf_string("determinant monotonicity %d/%d failures", monotone, trials));

  int linearity = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> p(1 + static_cast<int>(9.0 * u(rng))), q(1 + static_cast<int>(9.0 * u(rng)));
    for (auto& c : p) c = 2.0 * u(rng) - 1.0;
    for (auto& c : q) c = 2.0 * u(rng) - 1.0;
    auto eval = [](const std::vector<double>& c, double x) {
      double acc = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
      return acc;
    };
    const double alpha = 6.0 * u(rng) - 3.0, beta = 6.0 * u(rng) - 3.0;
    const double a = -2.0 * u(rng), b = a + 0.1 + 3.0 * u(rng);
    const double lhs = numerics::integrate([&](double x) { return alpha * eval(p, x) + beta * eval(q, x); }, a, b).value;
    const double rhs = alpha * numerics::integrate([&](double x) { return eval(p, x); }, a, b).value +
                       beta * numerics::integrate([&](double x) { return eval(q, x); }, a, b).value;
    if (!(std::abs(lhs - rhs) <= 1e-11)) ++linearity;
  }
  o.require(linearity == 0, printf_string("quadrature linearity %d/%d failures", linearity, trials));

  int determinism = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed = rng(), stream = rng() % 1000;
    numerics::RandomStream a(seed, stream), b(seed, stream);
    for (int i = 0; i < 100; ++i) {
      if (a.normal() != b.normal() || a.uniform() != b.uniform()) {
        ++determinism;
        break;
      }
    }
  }
  o.require(determinism == 0, printf_string("RandomStream determinism %d/%d failures", determinism, trials));
  return o;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "tfim-ground-energy", {"tfim", "ising_chain"}, 1.0, tfim_ground_energy},
      {2, "tfim-duality", {"tfim", "ising_chain"}, 5.0, tfim_duality},
      {3, "toeplitz-szego-limit", {"tfim", "toeplitz"}, 5.0, toeplitz_szego},
      {4, "tfim-exact-diagonalisation", {"tfim", "oracles"}, 60.0, ed_cross_check},
      {5, "spherical-phase-diagram", {"spherical"}, 60.0, spherical_phase_diagram},
      {6, "spherical-saddle-limit", {"spherical"}, 1.0, spherical_saddle_limit},
      {7, "zero-field-susceptibility", {"tfim", "spherical"}, 10.0, susceptibility},
      {8, "spherical-oracle-consistency", {"spherical", "oracles"}, 120.0, spherical_oracles},
      {9, "finite-beta-approach", {"tfim", "spherical"}, 10.0, finite_beta},
      {10, "property-suites", {"properties"}, 60.0, property_suites},
  };
  return all;
}

bool matches(const Criterion& c, std::string_view filter) {
  if (filter.empty() || std::string_view(c.name).find(filter) != std::string_view::npos) return true;
  return std::any_of(c.tags.begin(), c.tags.end(), [&](const std::string& t) { return t.find(filter) != std::string::npos; });
}

}  // namespace

std::vector<CriterionResult> run(std::string_view filter, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> results;
  for (const auto& c : criteria()) {
    if (!matches(c, filter)) continue;
    CriterionResult r{c.id, c.name, c.tags, false, {}, 0.0, c.budget_seconds};
    const auto start = std::chrono::steady_clock::now();
    try {
      const Outcome o = c.body();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > r.budget_seconds) {
      r.passed = false;
      r.detail += printf_string("; over runtime budget (%.1f s > %.0f s)", r.seconds, r.budget_seconds);
    }
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_line(const CriterionResult& r) {
  return printf_string("%s %2d %-30s %7.2f s / %3.0f s  ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                       r.budget_seconds) +
         r.detail;
}

}  // namespace qsm::acceptance
