#include "qsm/spherical.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qsm/errors.hpp"

namespace qsm::spherical {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEdgeFloor = 1e-14;

double half_gap(double angle) {
  const double s = std::sin(0.5 * angle);
  return 2.0 * s * s;
}

// (1/2 pi) int_0^{2 pi} log(1 + t + 1 - cos w) dw = acosh(1 + t) - log 2.
double inner_log(double t) { return std::log1p(t + std::sqrt(t * (2.0 + t))) - std::numbers::ln2; }

// d/dt of inner_log.
double inner_inverse(double t) { return 1.0 / std::sqrt(t * (2.0 + t)); }

numerics::QuadratureSpec tighter(const numerics::QuadratureSpec& spec) {
  numerics::QuadratureSpec inner = spec;
  inner.abs_tol = spec.abs_tol * 1e-2;
  inner.rel_tol = spec.rel_tol * 1e-2;
  return inner;
}

// Brillouin-zone average of kernel(w + e(omega)) with the last angle in
// closed form. Symmetry omega -> -omega halves each remaining range.
template <typename Kernel>
double zone_average(int d, double w, const numerics::QuadratureSpec& spec, Kernel kernel) {
  if (d > kMaxLimitDimension) {
    throw DimensionCap("thermodynamic-limit spectrum implemented for d <= 3, got d = " + std::to_string(d));
  }
  if (d < 1) throw InvalidArgument("dimension must be >= 1");
  if (!(w > 0.0)) throw DomainError("spectrum term requires w > 0");

  if (d == 1) return kernel(w);
  if (d == 2) {
    auto f = [&](double a) { return kernel(w + half_gap(a)); };
    return numerics::integrate(f, 0.0, kPi, spec).value / kPi;
  }
  const auto inner_spec = tighter(spec);
  auto outer = [&](double a) {
    const double wa = w + half_gap(a);
    auto f = [&](double b) { return kernel(wa + half_gap(b)); };
    return numerics::integrate(f, 0.0, kPi, inner_spec).value / kPi;
  };
  return numerics::integrate(outer, 0.0, kPi, spec).value / kPi;
}

void check_w(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("saddle variable w must be finite and > 0");
}

}  // namespace

void SphericalParams::validate() const {
  if (!(J > 0.0) || !std::isfinite(J)) throw InvalidArgument("SphericalParams: J must be > 0");
  if (!(B >= 0.0) || !std::isfinite(B)) throw InvalidArgument("SphericalParams: B must be >= 0");
  if (!(H >= 0.0) || !std::isfinite(H)) throw InvalidArgument("SphericalParams: H must be >= 0");
  if (d < 1) throw InvalidArgument("SphericalParams: d must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("SphericalParams: beta must be > 0");
}

LatticeSpec LatticeSpec::make(int d, int L) {
  if (d < 1) throw InvalidArgument("LatticeSpec: d must be >= 1");
  if (L < 3) throw InvalidArgument("LatticeSpec: L must be >= 3");
  std::int64_t n = 1;
  for (int j = 0; j < d; ++j) {
    if (n > std::numeric_limits<std::int64_t>::max() / L) {
      throw CapExceeded("LatticeSpec: L^d overflows");
    }
    n *= L;
  }
  return {d, L, n};
}

Spectrum Spectrum::finite(const LatticeSpec& lattice) {
  Spectrum s(SpectrumMode::finite_N, lattice.d);
  s.lattice_ = lattice;
  s.table_.emplace(lattice.L, lattice.d);
  return s;
}

Spectrum Spectrum::limit(int d, const numerics::QuadratureSpec& spec) {
  if (d > kMaxLimitDimension) {
    throw DimensionCap("thermodynamic-limit spectrum implemented for d <= 3, got d = " + std::to_string(d));
  }
  if (d < 1) throw InvalidArgument("dimension must be >= 1");
  spec.validate();
  Spectrum s(SpectrumMode::thermodynamic, d);
  s.quad_ = spec;
  return s;
}

double Spectrum::term(double w) const {
  if (mode_ == SpectrumMode::finite_N) {
    check_w(w);
    return kernels::omp::mode_log_mean(*table_, w);
  }
  return spectrum_term_limit(d_, w, quad_);
}

double Spectrum::derivative(double w) const {
  if (mode_ == SpectrumMode::finite_N) {
    check_w(w);
    return kernels::omp::mode_inverse_mean(*table_, w);
  }
  return spectrum_term_limit_derivative(d_, w, quad_);
}

double spectrum_term_finite(const LatticeSpec& lattice, double w) {
  check_w(w);
  return kernels::omp::mode_log_mean(kernels::ModeTable(lattice.L, lattice.d), w);
}

double spectrum_term_limit(int d, double w, const numerics::QuadratureSpec& spec) {
  return zone_average(d, w, spec, inner_log);
}

double spectrum_term_limit_derivative(int d, double w, const numerics::QuadratureSpec& spec) {
  return zone_average(d, w, spec, inner_inverse);
}

namespace {

void check_dimensions(const SphericalParams& params, const Spectrum& spectrum) {
  params.validate();
  if (spectrum.d() != params.d) {
    throw InvalidArgument("spectrum dimension " + std::to_string(spectrum.d()) +
                          " does not match params.d = " + std::to_string(params.d));
  }
}

}  // namespace

double phi(const SphericalParams& params, const Spectrum& spectrum, double w) {
  check_dimensions(params, spectrum);
  check_w(w);
  const auto [J, B, H, d, beta] = params;
  const double u = w + d;
  const double bj = beta * J;
  double value = bj * u + beta * B * B / (4.0 * J * u) - std::log(bj * u) -
                 0.5 * (std::log(bj) + spectrum.term(w));
  if (H > 0.0) value += beta * H * H / (4.0 * J * w);
  return value;
}

double phi_derivative(const SphericalParams& params, const Spectrum& spectrum, double w) {
  check_dimensions(params, spectrum);
  check_w(w);
  const auto [J, B, H, d, beta] = params;
  const double u = w + d;
  double value = beta * J - beta * B * B / (4.0 * J * u * u) - 1.0 / u - 0.5 * spectrum.derivative(w);
  if (H > 0.0) value -= beta * H * H / (4.0 * J * w * w);
  return value;
}

SaddleSolution solve_saddle(const SphericalParams& params, const Spectrum& spectrum,
                            const numerics::RootSpec& spec) {
  check_dimensions(params, spectrum);
  spec.validate();
  auto g = [&](double w) { return phi(params, spectrum, w); };
  auto dg = [&](double w) { return phi_derivative(params, spectrum, w); };

  const double J = params.J;
  double hi = 1.0 + params.B / J + params.H / J + 3.0 / (params.beta * J);
  for (int i = 0; dg(hi) <= 0.0; ++i) {
    if (i > 60) throw BracketError("solve_saddle: no upper bracket for the saddle");
    hi *= 2.0;
  }

  SaddleSolution out;
  out.mode = spectrum.mode();

  double lo = 0.25 * hi;
  while (dg(lo) >= 0.0) {
    hi = lo;
    lo *= 1e-2;
    if (lo < kEdgeFloor) {
      out.w0 = kEdgeFloor;
      out.phi_at_w0 = g(out.w0);
      out.derivative = dg(out.w0);
      out.status = SaddleStatus::edge;
      out.f_per_site = -(1.5 * std::log(kPi) + out.phi_at_w0) / params.beta;
      return out;
    }
  }

  const auto m = numerics::find_min_convex(g, dg, lo, hi, spec);
  out.w0 = m.x_min;
  out.phi_at_w0 = m.g_min;
  out.derivative = m.derivative;
  out.iterations = m.iterations;
  out.f_per_site = -(1.5 * std::log(kPi) + out.phi_at_w0) / params.beta;
  return out;
}

double log_partition_per_site(const SphericalParams& params, const Spectrum& spectrum) {
  return 1.5 * std::log(kPi) + solve_saddle(params, spectrum).phi_at_w0;
}

FreeEnergyResult free_energy_finite_beta(const SphericalParams& params, const Spectrum& spectrum) {
  const auto s = solve_saddle(params, spectrum);
  // phi is stationary at w0, so the location error enters at second order;
  // the error is dominated by the quadrature tolerance of S(w0).
  double err = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(s.phi_at_w0);
  if (spectrum.mode() == SpectrumMode::thermodynamic) {
    const numerics::QuadratureSpec q{};
    err += 0.5 * std::max(q.abs_tol, q.rel_tol * std::abs(spectrum.term(s.w0)));
  }
  return {s.f_per_site, err / params.beta, Method::saddle};
}

namespace {

// Minimum over u = w + d of the beta -> infinity exponent per beta. B enters
// squared, so negative B is accepted for difference stencils.
GroundState minimise_ground_exponent(double J, double B, double H, int d) {
  auto e = [=](double w) {
    const double u = w + d;
    double value = J * u + B * B / (4.0 * J * u);
    if (H > 0.0) value += H * H / (4.0 * J * w);
    return value;
  };
  auto de = [=](double w) {
    const double u = w + d;
    double value = J - B * B / (4.0 * J * u * u);
    if (H > 0.0) value -= H * H / (4.0 * J * w * w);
    return value;
  };

  if (H == 0.0 && de(0.0) >= 0.0) return {-e(0.0), static_cast<double>(d), true};

  const double lo = H > 0.0 ? H / (4.0 * J) : 0.0;
  const double hi = std::abs(B) / J + H / J + 1.0;
  const auto m = numerics::find_min_convex(e, de, lo, hi);
  return {-m.g_min, m.x_min + d, false};
}

}  // namespace

GroundState ground_energy(double J, double B, double H, int d) {
  SphericalParams{J, B, H, d, 1.0}.validate();
  return minimise_ground_exponent(J, B, H, d);
}

double ground_energy_zero_field(double J, double B, int d, const std::array<double, 3>& fields) {
  for (double h : fields) {
    if (!(h > 0.0)) throw InvalidArgument("extrapolation fields must be > 0");
  }
  std::array<double, 3> values{};
  for (std::size_t i = 0; i < fields.size(); ++i) values[i] = ground_energy(J, B, fields[i], d).energy;

  // Lagrange interpolation evaluated at H = 0.
  double limit = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    double weight = 1.0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j != i) weight *= fields[j] / (fields[j] - fields[i]);
    }
    limit += weight * values[i];
  }
  return limit;
}

double susceptibility_at_zero_field(double J, int d) {
  SphericalParams{J, 0.0, 0.0, d, 1.0}.validate();
  const double h = 1e-3 * std::max(1.0, J * d);
  auto f = [&](double B) { return minimise_ground_exponent(J, B, 0.0, d).energy; };
  return -(f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
}

}  // namespace qsm::spherical
