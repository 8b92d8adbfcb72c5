#pragma once

// Per-element bodies shared by the serial and OpenMP kernel translation units.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "qsm/kernels.hpp"

namespace qsm::kernels::detail {

inline std::vector<std::complex<double>> twiddles(std::size_t nodes) {
  std::vector<std::complex<double>> table(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(nodes);
    table[k] = {std::cos(angle), std::sin(angle)};
  }
  return table;
}

inline std::complex<double> fourier_coefficient(std::span<const std::complex<double>> samples,
                                                std::span<const std::complex<double>> table,
                                                std::int64_t m) {
  const auto nodes = static_cast<std::int64_t>(samples.size());
  const std::int64_t step = ((m % nodes) + nodes) % nodes;
  std::complex<double> acc{0.0, 0.0};
  std::int64_t phase = 0;
  for (std::int64_t j = 0; j < nodes; ++j) {
    acc += samples[j] * table[phase];
    phase += step;
    if (phase >= nodes) phase -= nodes;
  }
  return acc / static_cast<double>(nodes);
}

inline BatchMoments sphere_batch(const BondTable& bonds, const SphereWeights& weights,
                                 numerics::RandomStream stream, std::int64_t samples) {
  const std::int64_t n = bonds.sites;
  std::vector<double> x(n), y(n), z(n);
  BatchMoments out;
  for (std::int64_t s = 0; s < samples; ++s) {
    double norm_sq = 0.0;
    for (auto* v : {&x, &y, &z}) {
      for (auto& c : *v) {
        c = stream.normal();
        norm_sq += c * c;
      }
    }
    const double scale = std::sqrt(static_cast<double>(n) / norm_sq);
    double bond_sum = 0.0;
    double field_sum = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      for (int j = 0; j < bonds.d; ++j) bond_sum += z[i] * z[bonds.neighbours[i * bonds.d + j]];
      field_sum += weights.beta_B * x[i] + weights.beta_H * z[i];
    }
    const double exponent = weights.beta_J * scale * scale * bond_sum + scale * field_sum;
    const double value = std::exp(exponent - weights.shift);
    out.sum += value;
    out.sum_sq += value * value;
    ++out.count;
  }
  return out;
}

inline std::int64_t batch_count(std::int64_t samples, std::int64_t batch_size) {
  return (samples + batch_size - 1) / batch_size;
}

inline std::int64_t batch_length(std::int64_t b, std::int64_t samples, std::int64_t batch_size) {
  const std::int64_t start = b * batch_size;
  return std::min(batch_size, samples - start);
}

}  // namespace qsm::kernels::detail
