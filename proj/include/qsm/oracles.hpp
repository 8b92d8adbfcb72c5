#pragma once

// Independent finite-size ground truth: dense exact diagonalisation of the
// transverse-field Ising chain, the exact one-dimensional contour integral for
// the spherical-model partition function, and direct Monte Carlo on the
// constraint sphere.

#include <cstdint>
#include <vector>

#include "qsm/numerics.hpp"
#include "qsm/spherical.hpp"

namespace qsm::oracles {

inline constexpr int kMinChain = 4;
inline constexpr int kMaxChain = 12;

/// Periodic chain H = -J sum s^x_n s^x_{n+1} + B sum s^z_n of L sites.
struct ChainSpec {
  int L = 8;
  double J = 1.0;
  double B = 0.0;
  double beta = 1.0;

  /// J >= 0, beta > 0, 4 <= L <= 12 (DimensionCap above).
  void validate() const;
};

/// All 2^L eigenvalues in ascending order. The Hamiltonian is block diagonal
/// in the s^z parity; each block is diagonalised densely.
std::vector<double> ed_spectrum(const ChainSpec& spec);

/// -(1 / beta L) log tr e^{-beta H}.
double ed_free_energy(const ChainSpec& spec);

struct EdCorrelation {
  double value = 0.0;
  double beta_gap = 0.0;  // beta * (E_1 - E_0)
  bool ground_dominated = false;  // beta_gap > 20
};

/// Thermal <s^x_i s^x_j>, 0 <= i < j < L, by full spectral decomposition.
/// In the ordered phase the two lowest states are nearly degenerate and both
/// enter with their thermal weights, which gives the symmetrised value.
EdCorrelation ed_correlation(const ChainSpec& spec, int i, int j);

// Parameters for the spherical-model oracles. J = 0 is admitted here (the
// decoupled case has a closed form); otherwise the SphericalParams invariants
// apply.
void validate_oracle_params(const spherical::SphericalParams& params);

struct ContourOptions {
  /// Abscissa as a multiple of the saddle's distance from the rightmost
  /// singularity. Any value > 0 gives the same integral, but away from 1 the
  /// integrand cancels more and the quadrature works harder; keep it in
  /// roughly [1, 2].
  double abscissa_scale = 1.0;
  double rel_tol = 1e-12;
  double t_max = 1e12;
};

struct ContourResult {
  double log_Z = 0.0;
  double err_est = 0.0;     // absolute, in log Z
  double abscissa = 0.0;    // real part of the contour, in units of the multiplier a + i s
  double saddle = 0.0;      // real saddle point in the same units
  double cutoff = 0.0;      // truncation point of the t integral
};

/// log Z_N from Z_N = (pi^{3N/2} / 2 pi) int ds exp(N F(a + i s)),
/// F(z) = z + (bB)^2 / 4z + (bH)^2 / 4(z - bJd) - log z
///        - (1/2N) sum_modes log(z - bJ sum_j cos w_j),
/// all prefactors kept. With C_T >= Re F(a + i t) for t >= T, a bound that
/// falls off as -(3/2) log t, the tail beyond the cutoff T is at most
/// exp(N (C_T - F(a))) T / (3N/2 - 1). NonConvergence if the bound is not met
/// by t_max.
ContourResult contour_partition(const spherical::SphericalParams& params,
                                const spherical::LatticeSpec& lattice,
                                const ContourOptions& options = {});

struct MCSpec {
  std::int64_t samples = 1'000'000;
  numerics::RandomStream stream{0, 0};
  std::int64_t batch_size = 10'000;

  void validate() const;
};

struct MCResult {
  double log_Z = 0.0;
  double std_err = 0.0;  // standard error of log_Z
  std::int64_t samples = 0;
  std::vector<double> batch_means;  // of exp(E - shift), in batch order
};

/// log of the exact sphere measure normalisation
/// int delta(|r|^2 - N) d^{3N} r = A_{3N}(sqrt N) / (2 sqrt N)
///                               = pi^{3N/2} N^{3N/2 - 1} / Gamma(3N/2).
double log_sphere_measure(std::int64_t N);

/// Z_N = log_sphere_measure * E[exp(bJ sum_<jk> z_j z_k + b sum_j (B x_j + H z_j))]
/// over the uniform distribution on the radius-sqrt(N) sphere in 3N
/// dimensions, sampled by normalising isotropic Gaussian vectors.
MCResult sphere_mc_partition(const spherical::SphericalParams& params, const spherical::LatticeSpec& lattice,
                             const MCSpec& mc);

}  // namespace qsm::oracles
