#include "qsm/oracles.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>

#include "qsm/errors.hpp"
#include "qsm/kernels.hpp"

namespace qsm::oracles {

namespace {

constexpr double kPi = std::numbers::pi;

// One s^z-parity block of the chain Hamiltonian.
struct ParitySector {
  std::vector<std::uint32_t> states;  // basis states, bit set = spin down
  std::vector<std::int32_t> index;    // full state -> position in block, -1 if absent
  Eigen::MatrixXd vectors;            // eigenvectors by column when requested
  Eigen::VectorXd energies;
};

ParitySector diagonalise_sector(const ChainSpec& spec, int parity, bool want_vectors) {
  const std::uint32_t dim = 1u << spec.L;
  ParitySector sector;
  sector.index.assign(dim, -1);
  for (std::uint32_t s = 0; s < dim; ++s) {
    if (std::popcount(s) % 2 == parity) {
      sector.index[s] = static_cast<std::int32_t>(sector.states.size());
      sector.states.push_back(s);
    }
  }

  const auto n = static_cast<Eigen::Index>(sector.states.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const std::uint32_t s = sector.states[a];
    h(a, a) = spec.B * (spec.L - 2 * std::popcount(s));
    for (int site = 0; site < spec.L; ++site) {
      const std::uint32_t flip = (1u << site) | (1u << ((site + 1) % spec.L));
      h(sector.index[s ^ flip], a) -= spec.J;
    }
  }

  sector.energies.resize(n);
  const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', static_cast<int>(n),
                                  h.data(), static_cast<int>(n), sector.energies.data());
  if (info != 0) throw NonConvergence("dsyevd failed with info = " + std::to_string(info));
  if (want_vectors) sector.vectors = std::move(h);
  return sector;
}

}  // namespace

void ChainSpec::validate() const {
  if (L > kMaxChain) throw DimensionCap("chain length " + std::to_string(L) + " exceeds cap 12");
  if (L < kMinChain) throw InvalidArgument("chain length must be >= 4");
  if (!(J >= 0.0) || !std::isfinite(J)) throw InvalidArgument("ChainSpec: J must be >= 0");
  if (!std::isfinite(B)) throw InvalidArgument("ChainSpec: B must be finite");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("ChainSpec: beta must be > 0");
}

std::vector<double> ed_spectrum(const ChainSpec& spec) {
  spec.validate();
  std::vector<double> all;
  all.reserve(std::size_t{1} << spec.L);
  for (int parity : {0, 1}) {
    const auto sector = diagonalise_sector(spec, parity, false);
    all.insert(all.end(), sector.energies.begin(), sector.energies.end());
  }
  std::sort(all.begin(), all.end());
  return all;
}

double ed_free_energy(const ChainSpec& spec) {
  const auto energies = ed_spectrum(spec);
  const double e0 = energies.front();
  double z = 0.0;
  for (double e : energies) z += std::exp(-spec.beta * (e - e0));
  return (e0 - std::log(z) / spec.beta) / spec.L;
}

EdCorrelation ed_correlation(const ChainSpec& spec, int i, int j) {
  spec.validate();
  if (!(0 <= i && i < j && j < spec.L)) throw InvalidArgument("ed_correlation requires 0 <= i < j < L");

  const std::uint32_t mask = (1u << i) | (1u << j);
  std::array<ParitySector, 2> sectors = {diagonalise_sector(spec, 0, true), diagonalise_sector(spec, 1, true)};

  std::vector<double> energies;
  for (const auto& s : sectors) energies.insert(energies.end(), s.energies.begin(), s.energies.end());
  std::sort(energies.begin(), energies.end());
  const double e0 = energies[0];

  double z = 0.0;
  double weighted = 0.0;
  for (const auto& sector : sectors) {
    const Eigen::Index n = sector.energies.size();
    for (Eigen::Index k = 0; k < n; ++k) {
      const double boltzmann = std::exp(-spec.beta * (sector.energies[k] - e0));
      z += boltzmann;
      if (boltzmann < 1e-300) continue;
      // s^x_i s^x_j maps basis state s to s ^ mask within the same sector.
      double expectation = 0.0;
      for (Eigen::Index a = 0; a < n; ++a) {
        const auto b = sector.index[sector.states[a] ^ mask];
        expectation += sector.vectors(a, k) * sector.vectors(b, k);
      }
      weighted += boltzmann * expectation;
    }
  }

  EdCorrelation out;
  out.value = weighted / z;
  out.beta_gap = spec.beta * (energies[1] - energies[0]);
  out.ground_dominated = out.beta_gap > 20.0;
  return out;
}

void validate_oracle_params(const spherical::SphericalParams& params) {
  if (params.J == 0.0) {
    spherical::SphericalParams shifted = params;
    shifted.J = 1.0;
    shifted.validate();
    return;
  }
  params.validate();
}

namespace {

// Exponent F of the contour representation and its real-axis derivatives.
class ContourExponent {
 public:
  ContourExponent(const spherical::SphericalParams& p, const spherical::LatticeSpec& lattice)
      : bJ_(p.beta * p.J),
        bB2_(p.beta * p.beta * p.B * p.B),
        bH2_(p.beta * p.beta * p.H * p.H),
        edge_(p.beta * p.J * p.d),
        table_(lattice.L, lattice.d) {}

  double edge() const { return std::max(0.0, edge_); }

  std::complex<double> value(std::complex<double> z) const {
    std::complex<double> f = z + bB2_ / (4.0 * z) - std::log(z) - 0.5 * mode_log(z);
    if (bH2_ > 0.0) f += bH2_ / (4.0 * (z - edge_));
    return f;
  }

  double derivative(double z) const {
    double df = 1.0 - bB2_ / (4.0 * z * z) - 1.0 / z - 0.5 * mode_inverse(z);
    if (bH2_ > 0.0) df -= bH2_ / (4.0 * (z - edge_) * (z - edge_));
    return df;
  }

  double second_derivative(double z) const {
    double d2 = bB2_ / (2.0 * z * z * z) + 1.0 / (z * z) + 0.5 * mode_inverse_square(z);
    if (bH2_ > 0.0) d2 += bH2_ / (2.0 * std::pow(z - edge_, 3));
    return d2;
  }

  // Bound on Re F(a + i t) for all t >= T, used for the tail.
  double tail_exponent(double a, double T) const {
    double c = a + bB2_ * a / (4.0 * (a * a + T * T)) - 1.5 * std::log(T);
    if (bH2_ > 0.0) {
      const double x = a - edge_;
      c += bH2_ * x / (4.0 * (x * x + T * T));
    }
    return c;
  }

 private:
  // Mean over modes of log(z - bJ sum cos) written as log(bJ) + log(w + e_m).
  std::complex<double> mode_log(std::complex<double> z) const {
    if (bJ_ == 0.0) return std::log(z);
    return std::log(bJ_) + kernels::omp::mode_log_mean(table_, z / bJ_ - static_cast<double>(table_.d));
  }
  double mode_inverse(double z) const {
    if (bJ_ == 0.0) return 1.0 / z;
    return kernels::omp::mode_inverse_mean(table_, z / bJ_ - table_.d) / bJ_;
  }
  double mode_inverse_square(double z) const {
    if (bJ_ == 0.0) return 1.0 / (z * z);
    return kernels::omp::mode_inverse_square_mean(table_, z / bJ_ - table_.d) / (bJ_ * bJ_);
  }

  double bJ_;
  double bB2_;
  double bH2_;
  double edge_;
  kernels::ModeTable table_;
};

}  // namespace

ContourResult contour_partition(const spherical::SphericalParams& params, const spherical::LatticeSpec& lattice,
                                const ContourOptions& options) {
  validate_oracle_params(params);
  if (lattice.d != params.d) throw InvalidArgument("lattice dimension does not match params.d");
  if (!(options.abscissa_scale > 0.0)) throw InvalidArgument("abscissa_scale must be > 0");

  const ContourExponent F(params, lattice);
  const auto N = static_cast<double>(lattice.N);
  const double edge = F.edge();

  // Real saddle in x = z - edge > 0; F' -> -inf at the edge for finite N.
  auto real_f = [&](double x) { return F.value({edge + x, 0.0}).real(); };
  auto real_df = [&](double x) { return F.derivative(edge + x); };
  double hi = 1.0 + params.beta * (params.J * params.d + params.B + params.H);
  while (real_df(hi) <= 0.0) hi *= 2.0;
  double lo = 0.5 * hi;
  while (real_df(lo) >= 0.0) {
    lo *= 0.5;
    if (lo < 1e-300) throw BracketError("contour_partition: saddle collapsed onto the edge");
  }
  const double x_saddle = numerics::find_min_convex(real_f, real_df, lo, hi).x_min;

  ContourResult out;
  out.saddle = edge + x_saddle;
  out.abscissa = edge + options.abscissa_scale * x_saddle;
  const double a = out.abscissa;
  const std::complex<double> f0 = F.value({a, 0.0});

  // Gaussian width at the saddle sets the first panel.
  const double width = 1.0 / std::sqrt(N * F.second_derivative(out.saddle));

  auto integrand = [&](double t) { return std::exp(N * (F.value({a, t}) - f0)).real(); };

  const double power = 1.5 * N - 1.0;
  double total = 0.0;
  double err = 0.0;
  double t0 = 0.0;
  double panel = 4.0 * width;
  numerics::QuadratureSpec quad;
  quad.rel_tol = options.rel_tol * 0.5;
  quad.abs_tol = 1e-300;
  quad.max_subdivisions = 4096;

  while (true) {
    const double t1 = t0 + panel;
    // After the first panel the target is relative to the running total;
    // the geometric panels number at most a few dozen.
    if (t0 > 0.0) {
      quad.rel_tol = 1e-2 * options.rel_tol;
      quad.abs_tol = std::max(1e-2 * options.rel_tol * std::abs(total), 1e-300);
    }
    const auto piece = numerics::integrate(integrand, t0, t1, quad);
    total += piece.value;
    err += piece.err_est;
    t0 = t1;
    panel *= 2.0;

    const double tail = std::exp(N * (F.tail_exponent(a, t0) - f0.real())) * t0 / power;
    if (tail <= options.rel_tol * std::abs(total)) {
      err += tail;
      break;
    }
    if (t0 > options.t_max) throw NonConvergence("contour_partition: tail bound not met by t_max");
  }
  out.cutoff = t0;

  // Both halves of the line contribute equally: F(conj z) = conj F(z).
  const double integral = 2.0 * total;
  if (!(integral > 0.0)) throw NonConvergence("contour_partition: non-positive integral");
  out.log_Z = 1.5 * N * std::log(kPi) - std::log(2.0 * kPi) + N * f0.real() + std::log(integral);
  out.err_est = err / std::abs(total);
  return out;
}

void MCSpec::validate() const {
  if (samples < 2) throw InvalidArgument("MCSpec: samples must be >= 2");
  if (batch_size < 1) throw InvalidArgument("MCSpec: batch_size must be >= 1");
}

double log_sphere_measure(std::int64_t N) {
  const double n = static_cast<double>(N);
  return 1.5 * n * std::log(kPi) + (1.5 * n - 1.0) * std::log(n) - std::lgamma(1.5 * n);
}

MCResult sphere_mc_partition(const spherical::SphericalParams& params, const spherical::LatticeSpec& lattice,
                             const MCSpec& mc) {
  validate_oracle_params(params);
  mc.validate();
  if (lattice.d != params.d) throw InvalidArgument("lattice dimension does not match params.d");
  if (lattice.N > 64) throw DimensionCap("sphere Monte Carlo is limited to N <= 64 sites");

  const kernels::BondTable bonds(lattice.L, lattice.d);
  const double n = static_cast<double>(lattice.N);
  kernels::SphereWeights weights;
  weights.beta_J = params.beta * params.J;
  weights.beta_B = params.beta * params.B;
  weights.beta_H = params.beta * params.H;
  // Upper bound of the exponent: sum_<jk> z_j z_k <= d |z|^2 and
  // sum (B x + H z) <= sqrt(N (B^2 + H^2)) |r|, with |r|^2 = N.
  weights.shift = params.beta * n * (params.J * params.d + std::hypot(params.B, params.H));

  const auto batches = kernels::omp::sphere_batches(bonds, weights, mc.stream, mc.samples, mc.batch_size);

  MCResult out;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& b : batches) {
    sum += b.sum;
    sum_sq += b.sum_sq;
    out.samples += b.count;
    out.batch_means.push_back(b.sum / static_cast<double>(b.count));
  }
  const double count = static_cast<double>(out.samples);
  const double mean = sum / count;
  const double variance = std::max(0.0, (sum_sq / count - mean * mean) * count / (count - 1.0));
  out.log_Z = log_sphere_measure(lattice.N) + weights.shift + std::log(mean);
  out.std_err = std::sqrt(variance / count) / mean;
  return out;
}

}  // namespace qsm::oracles
