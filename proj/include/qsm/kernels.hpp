#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference in kernels::serial and an OpenMP version in kernels::omp with the
// same signature. The OpenMP versions reduce over fixed-size blocks in block
// order, so their output does not depend on the thread count.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qsm/numerics.hpp"

namespace qsm::kernels {

/// Mode table of the periodic hypercube of side L in d dimensions.
/// gaps[k] = 1 - cos(2*pi*k/L) = 2 sin^2(pi*k/L), so that
/// d - sum_j cos(w_j) = sum_j gaps[k_j] without cancellation near k = 0.
struct ModeTable {
  int L = 0;
  int d = 0;
  std::int64_t modes = 0;
  std::vector<double> gaps;

  ModeTable(int side, int dim);
  double edge_distance(std::int64_t flat) const;
};

/// Nearest-neighbour structure for the sphere Monte Carlo: neighbours[i*d + j]
/// is the +1 neighbour of site i along axis j (periodic), so each unordered
/// bond appears exactly once.
struct BondTable {
  int L = 0;
  int d = 0;
  std::int64_t sites = 0;
  std::vector<std::int64_t> neighbours;

  BondTable(int side, int dim);
};

struct SphereWeights {
  double beta_J = 0.0;
  double beta_B = 0.0;
  double beta_H = 0.0;
  double shift = 0.0;  // subtracted from every exponent before exp()
};

struct BatchMoments {
  double sum = 0.0;     // sum of exp(E - shift)
  double sum_sq = 0.0;  // sum of exp(E - shift)^2
  std::int64_t count = 0;
};

namespace serial {

double mode_log_mean(const ModeTable& table, double w);
double mode_inverse_mean(const ModeTable& table, double w);
double mode_inverse_square_mean(const ModeTable& table, double w);
std::complex<double> mode_log_mean(const ModeTable& table, std::complex<double> w);

/// c_m = (1/M) sum_j samples[j] exp(-i m 2 pi j / M) for m in [-m_max, m_max],
/// returned at index m + m_max.
std::vector<std::complex<double>> fourier_coefficients(std::span<const std::complex<double>> samples,
                                                       int m_max);

/// Uniform sampling of the radius-sqrt(N) sphere in 3N dimensions; batch b
/// draws from stream.substream(b).
std::vector<BatchMoments> sphere_batches(const BondTable& bonds, const SphereWeights& weights,
                                         const numerics::RandomStream& stream,
                                         std::int64_t samples, std::int64_t batch_size);

}  // namespace serial

namespace omp {

double mode_log_mean(const ModeTable& table, double w);
double mode_inverse_mean(const ModeTable& table, double w);
double mode_inverse_square_mean(const ModeTable& table, double w);
std::complex<double> mode_log_mean(const ModeTable& table, std::complex<double> w);

std::vector<std::complex<double>> fourier_coefficients(std::span<const std::complex<double>> samples,
                                                       int m_max);

std::vector<BatchMoments> sphere_batches(const BondTable& bonds, const SphereWeights& weights,
                                         const numerics::RandomStream& stream,
                                         std::int64_t samples, std::int64_t batch_size);

}  // namespace omp

/// Thread count used by the omp kernels; 0 restores the runtime default.
void set_thread_count(int threads);
int thread_count();

}  // namespace qsm::kernels
