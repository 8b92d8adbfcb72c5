#pragma once

// Quantum spherical model with transverse field B and longitudinal field H on
// a periodic d-dimensional hypercube, solved by steepest descent.
//
// All saddle-point quantities use the shifted variable w, the distance of the
// contour from the spectral edge: the Fourier-mode eigenvalue of the
// quadratic form is beta*J*(w + e(omega)), e(omega) = sum_j (1 - cos omega_j)
// >= 0, and u = w + d is the unshifted variable. The exponent is
//
//   phi(w) = bJ (w + d) + bH^2 / (4 J w) + bB^2 / (4 J (w + d))
//            - log(bJ (w + d)) - (1/2) [log(bJ) + S(w)],     b = beta,
//
// with S(w) the mean of log(w + e(omega)) over the modes (finite lattice) or
// over the Brillouin zone (thermodynamic limit). With this normalisation
// Z_N = (beta J / 2 pi i) pi^{3N/2} * int e^{N phi(w)} dw exactly, hence
// -beta f = (3/2) log(pi) + phi(w0) per site as N -> infinity.

#include <array>
#include <cstdint>
#include <optional>

#include "qsm/kernels.hpp"
#include "qsm/numerics.hpp"
#include "qsm/types.hpp"

namespace qsm::spherical {

inline constexpr int kMaxLimitDimension = 3;

struct SphericalParams {
  double J = 1.0;
  double B = 0.0;
  double H = 0.0;
  int d = 1;
  double beta = 1.0;

  void validate() const;
};

struct LatticeSpec {
  int d = 1;
  int L = 3;
  std::int64_t N = 3;

  /// Checks L >= 3, d >= 1 and that L^d fits in 63 bits.
  static LatticeSpec make(int d, int L);
};

enum class SpectrumMode { finite_N, thermodynamic };

/// The mode-averaged log term S(w), on a finite lattice or in the limit.
class Spectrum {
 public:
  static Spectrum finite(const LatticeSpec& lattice);
  /// Throws DimensionCap for d > 3.
  static Spectrum limit(int d, const numerics::QuadratureSpec& spec = {});

  SpectrumMode mode() const { return mode_; }
  int d() const { return d_; }
  const std::optional<LatticeSpec>& lattice() const { return lattice_; }

  double term(double w) const;
  double derivative(double w) const;

 private:
  Spectrum(SpectrumMode mode, int d) : mode_(mode), d_(d) {}

  SpectrumMode mode_;
  int d_;
  std::optional<LatticeSpec> lattice_;
  std::optional<kernels::ModeTable> table_;
  numerics::QuadratureSpec quad_{};
};

/// (1/N) sum over the N = L^d modes of log(w + d - sum_j cos omega_j),
/// omega_j in {2 pi k / L}. DomainError for w <= 0.
double spectrum_term_finite(const LatticeSpec& lattice, double w);

/// (2 pi)^{-d} int log(w + d - sum_j cos omega_j) d^d omega for d <= 3, with
/// the innermost angle done in closed form and the rest by nested adaptive
/// quadrature.
double spectrum_term_limit(int d, double w, const numerics::QuadratureSpec& spec = {});
double spectrum_term_limit_derivative(int d, double w, const numerics::QuadratureSpec& spec = {});

double phi(const SphericalParams& params, const Spectrum& spectrum, double w);
double phi_derivative(const SphericalParams& params, const Spectrum& spectrum, double w);

enum class SaddleStatus { interior, edge };

struct SaddleSolution {
  double w0 = 0.0;
  double phi_at_w0 = 0.0;
  double f_per_site = 0.0;
  double derivative = 0.0;
  int iterations = 0;
  SpectrumMode mode = SpectrumMode::thermodynamic;
  SaddleStatus status = SaddleStatus::interior;
};

/// Minimises phi on (0, inf). When phi' stays positive down to w ~ 1e-14 the
/// minimiser has collapsed onto the spectral edge; the solution is returned
/// with status edge rather than thrown.
SaddleSolution solve_saddle(const SphericalParams& params, const Spectrum& spectrum,
                            const numerics::RootSpec& spec = {});

/// -(1/N) log Z_N / beta in the saddle-point approximation,
/// -[(3/2) log pi + phi(w0)] / beta.
FreeEnergyResult free_energy_finite_beta(const SphericalParams& params, const Spectrum& spectrum);

/// (3/2) log pi + phi(w0): the saddle-point estimate of (1/N) log Z_N.
double log_partition_per_site(const SphericalParams& params, const Spectrum& spectrum);

struct GroundState {
  double energy = 0.0;  // per site
  double u0 = 0.0;      // minimiser in the unshifted variable
  bool at_edge = false;
};

/// beta -> infinity energy: minus the minimum of
/// e(u) = J u + H^2 / (4 J (u - d)) + B^2 / (4 J u) over u > d (u >= d when H = 0).
GroundState ground_energy(double J, double B, double H, int d);

inline constexpr std::array<double, 3> kExtrapolationFields = {1e-3, 1e-4, 1e-5};

/// H -> 0 limit of ground_energy by polynomial extrapolation through the
/// given fields (quadratic for three fields).
double ground_energy_zero_field(double J, double B, int d,
                                const std::array<double, 3>& fields = kExtrapolationFields);

/// -d^2 f / dB^2 at B = 0 and H = 0, from a central second difference of
/// ground_energy. Expected value 1 / (2 J d).
double susceptibility_at_zero_field(double J, int d);

}  // namespace qsm::spherical
