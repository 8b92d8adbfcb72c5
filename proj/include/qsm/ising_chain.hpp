#pragma once

// Closed-form thermodynamics of the transverse-field Ising chain
//   H = -J sum s^x_n s^x_{n+1} + B sum s^z_n
// at zero longitudinal field, in the thermodynamic limit.

#include "qsm/numerics.hpp"
#include "qsm/types.hpp"

namespace qsm::ising {

struct IsingParams {
  double J = 1.0;     // coupling, > 0
  double B = 0.0;     // transverse field, >= 0
  double beta = 1.0;  // inverse temperature, > 0

  void validate() const;
};

/// Single-mode excitation energy sqrt(J^2 + B^2 - 2 B J cos x).
double dispersion(double J, double B, double x);

/// f(beta, J, B) = -(1 / 2 pi beta) * int_0^{2 pi} log(2 cosh(beta * dispersion)) dx.
FreeEnergyResult free_energy(const IsingParams& params, const numerics::QuadratureSpec& spec = {});

/// Zero-temperature energy per site, -(1 / 2 pi) * int_0^{2 pi} dispersion dx,
/// integrated directly rather than as a large-beta limit.
FreeEnergyResult ground_energy(double J, double B, const numerics::QuadratureSpec& spec = {});

/// -d^2 f_ground / dB^2 at B = 0 from a five-point central difference with
/// step 1e-3 * max(J, 1). Expected value 1 / (2 J).
double susceptibility_at_zero_field(double J, const numerics::QuadratureSpec& spec = {});

}  // namespace qsm::ising
