#include <omp.h>

#include <algorithm>

#include "kernels_common.hpp"
#include "qsm/errors.hpp"
#include "qsm/kernels.hpp"

namespace qsm::kernels {

namespace {

constexpr std::int64_t kBlock = 2048;

// Sums body(m) over all modes: each fixed block is reduced serially and the
// block partials are added in block order.
template <typename T, typename Body>
T blocked_mode_sum(std::int64_t modes, Body body) {
  const std::int64_t blocks = (modes + kBlock - 1) / kBlock;
  std::vector<T> partial(blocks, T{});
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    T acc{};
    const std::int64_t end = std::min(modes, (b + 1) * kBlock);
    for (std::int64_t m = b * kBlock; m < end; ++m) acc += body(m);
    partial[b] = acc;
  }
  T total{};
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace

void set_thread_count(int threads) {
  if (threads > 0) {
    omp_set_num_threads(threads);
  } else {
    omp_set_num_threads(omp_get_num_procs());
  }
}

int thread_count() { return omp_get_max_threads(); }

namespace omp {

double mode_log_mean(const ModeTable& table, double w) {
  const double sum = blocked_mode_sum<double>(
      table.modes, [&](std::int64_t m) { return std::log(w + table.edge_distance(m)); });
  return sum / static_cast<double>(table.modes);
}

double mode_inverse_mean(const ModeTable& table, double w) {
  const double sum = blocked_mode_sum<double>(
      table.modes, [&](std::int64_t m) { return 1.0 / (w + table.edge_distance(m)); });
  return sum / static_cast<double>(table.modes);
}

double mode_inverse_square_mean(const ModeTable& table, double w) {
  const double sum = blocked_mode_sum<double>(table.modes, [&](std::int64_t m) {
    const double v = w + table.edge_distance(m);
    return 1.0 / (v * v);
  });
  return sum / static_cast<double>(table.modes);
}

std::complex<double> mode_log_mean(const ModeTable& table, std::complex<double> w) {
  const auto sum = blocked_mode_sum<std::complex<double>>(
      table.modes, [&](std::int64_t m) { return std::log(w + table.edge_distance(m)); });
  return sum / static_cast<double>(table.modes);
}

std::vector<std::complex<double>> fourier_coefficients(std::span<const std::complex<double>> samples,
                                                       int m_max) {
  const auto table = detail::twiddles(samples.size());
  std::vector<std::complex<double>> out(2 * static_cast<std::size_t>(m_max) + 1);
#pragma omp parallel for schedule(dynamic, 4)
  for (int m = -m_max; m <= m_max; ++m) out[m + m_max] = detail::fourier_coefficient(samples, table, m);
  return out;
}

std::vector<BatchMoments> sphere_batches(const BondTable& bonds, const SphereWeights& weights,
                                         const numerics::RandomStream& stream, std::int64_t samples,
                                         std::int64_t batch_size) {
  if (samples <= 0 || batch_size <= 0) throw InvalidArgument("sphere_batches needs positive sizes");
  const std::int64_t batches = detail::batch_count(samples, batch_size);
  std::vector<BatchMoments> out(batches);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < batches; ++b) {
    out[b] = detail::sphere_batch(bonds, weights, stream.substream(b),
                                  detail::batch_length(b, samples, batch_size));
  }
  return out;
}

}  // namespace omp
}  // namespace qsm::kernels
