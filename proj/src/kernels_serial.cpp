#include <stdexcept>

#include "kernels_common.hpp"
#include "qsm/errors.hpp"
#include "qsm/kernels.hpp"

namespace qsm::kernels {

ModeTable::ModeTable(int side, int dim) : L(side), d(dim), modes(1), gaps(side) {
  if (side < 1 || dim < 1) throw InvalidArgument("ModeTable requires L >= 1 and d >= 1");
  for (int k = 0; k < side; ++k) {
    const double s = std::sin(std::numbers::pi * k / side);
    gaps[k] = 2.0 * s * s;
  }
  for (int j = 0; j < dim; ++j) modes *= side;
}

double ModeTable::edge_distance(std::int64_t flat) const {
  double e = 0.0;
  for (int j = 0; j < d; ++j) {
    e += gaps[flat % L];
    flat /= L;
  }
  return e;
}

BondTable::BondTable(int side, int dim) : L(side), d(dim), sites(1) {
  if (side < 3 || dim < 1) throw InvalidArgument("BondTable requires L >= 3 and d >= 1");
  for (int j = 0; j < dim; ++j) sites *= side;
  neighbours.resize(static_cast<std::size_t>(sites * dim));
  for (std::int64_t i = 0; i < sites; ++i) {
    std::int64_t stride = 1;
    for (int j = 0; j < dim; ++j) {
      const std::int64_t coord = (i / stride) % side;
      const std::int64_t next = (coord + 1) % side;
      neighbours[i * dim + j] = i + (next - coord) * stride;
      stride *= side;
    }
  }
}

namespace serial {

double mode_log_mean(const ModeTable& table, double w) {
  double acc = 0.0;
  for (std::int64_t m = 0; m < table.modes; ++m) acc += std::log(w + table.edge_distance(m));
  return acc / static_cast<double>(table.modes);
}

double mode_inverse_mean(const ModeTable& table, double w) {
  double acc = 0.0;
  for (std::int64_t m = 0; m < table.modes; ++m) acc += 1.0 / (w + table.edge_distance(m));
  return acc / static_cast<double>(table.modes);
}

double mode_inverse_square_mean(const ModeTable& table, double w) {
  double acc = 0.0;
  for (std::int64_t m = 0; m < table.modes; ++m) {
    const double v = w + table.edge_distance(m);
    acc += 1.0 / (v * v);
  }
  return acc / static_cast<double>(table.modes);
}

std::complex<double> mode_log_mean(const ModeTable& table, std::complex<double> w) {
  std::complex<double> acc{0.0, 0.0};
  for (std::int64_t m = 0; m < table.modes; ++m) acc += std::log(w + table.edge_distance(m));
  return acc / static_cast<double>(table.modes);
}

std::vector<std::complex<double>> fourier_coefficients(std::span<const std::complex<double>> samples,
                                                       int m_max) {
  const auto table = detail::twiddles(samples.size());
  std::vector<std::complex<double>> out(2 * static_cast<std::size_t>(m_max) + 1);
  for (int m = -m_max; m <= m_max; ++m) out[m + m_max] = detail::fourier_coefficient(samples, table, m);
  return out;
}

std::vector<BatchMoments> sphere_batches(const BondTable& bonds, const SphereWeights& weights,
                                         const numerics::RandomStream& stream, std::int64_t samples,
                                         std::int64_t batch_size) {
  if (samples <= 0 || batch_size <= 0) throw InvalidArgument("sphere_batches needs positive sizes");
  const std::int64_t batches = detail::batch_count(samples, batch_size);
  std::vector<BatchMoments> out(batches);
  for (std::int64_t b = 0; b < batches; ++b) {
    out[b] = detail::sphere_batch(bonds, weights, stream.substream(b),
                                  detail::batch_length(b, samples, batch_size));
  }
  return out;
}

}  // namespace serial
}  // namespace qsm::kernels
