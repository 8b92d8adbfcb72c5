#include "qsm/toeplitz.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "qsm/errors.hpp"
#include "qsm/kernels.hpp"

namespace qsm::toeplitz {

namespace {

constexpr int kMaxNodes = 1 << 22;

void check_k(double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw InvalidArgument("k_ratio must be finite and >= 0");
}

void check_order(int n) {
  if (n < 1) throw InvalidArgument("Toeplitz order must be >= 1");
  if (n > kMaxOrder) {
    throw CapExceeded("Toeplitz order " + std::to_string(n) + " exceeds cap " + std::to_string(kMaxOrder));
  }
}

// Node count at which trapezoid aliasing, ~rho^(M - n), is below rounding.
int initial_nodes(double k, int n) {
  int extra = 64;
  const double rho = k < 1.0 ? k : 1.0 / k;
  if (rho > 0.0) extra = std::max(extra, static_cast<int>(std::ceil(std::log(1e-17) / std::log(rho))));
  const auto want = static_cast<unsigned>(std::min(kMaxNodes / 2, 2 * n + 2 + extra));
  return static_cast<int>(std::bit_ceil(want));
}

std::vector<std::complex<double>> trapezoid_coefficients(double k, int n, int nodes) {
  std::vector<std::complex<double>> samples(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) samples[j] = symbol(k, 2.0 * std::numbers::pi * j / nodes);
  return kernels::omp::fourier_coefficients(samples, n);
}

}  // namespace

void CorrelationQuery::validate() const {
  check_k(k_ratio);
  check_order(n);
}

std::complex<double> symbol(double k, double theta) {
  // z = 1 - k e^{i theta}; the continuous square root of conj(z)/z is conj(z)/|z|.
  const std::complex<double> z = 1.0 - k * std::polar(1.0, theta);
  const double r = std::abs(z);
  if (r == 0.0) return {0.0, 0.0};  // k = 1, theta = 0: midpoint of the jump
  return std::conj(z) / r;
}

SymbolCoefficients::SymbolCoefficients(double k_ratio, int n, const numerics::QuadratureSpec& spec)
    : k_ratio_(k_ratio), n_(n) {
  check_k(k_ratio);
  if (n < 0) throw InvalidArgument("coefficient range must be >= 0");
  spec.validate();

  if (k_ratio == 1.0) {
    // Symbol i e^{-i theta/2} on (0, 2 pi): c_m = 1 / (pi (m + 1/2)) exactly.
    raw_.resize(2 * static_cast<std::size_t>(n) + 1);
    for (int m = -n; m <= n; ++m) raw_[m + n] = 1.0 / (std::numbers::pi * (m + 0.5));
  } else {
    int nodes = initial_nodes(k_ratio, n);
    raw_ = trapezoid_coefficients(k_ratio, n, nodes);
    while (true) {
      auto refined = trapezoid_coefficients(k_ratio, n, 2 * nodes);
      double diff = 0.0;
      double scale = 0.0;
      for (std::size_t i = 0; i < raw_.size(); ++i) {
        diff = std::max(diff, std::abs(refined[i] - raw_[i]));
        scale = std::max(scale, std::abs(refined[i]));
      }
      raw_ = std::move(refined);
      nodes *= 2;
      err_est_ = diff;
      if (diff <= std::max(spec.abs_tol, spec.rel_tol * scale)) break;
      if (2 * nodes > kMaxNodes) throw NonConvergence("symbol coefficients: node budget exhausted");
    }
    nodes_ = nodes;
  }

  real_.reserve(raw_.size());
  for (const auto& c : raw_) {
    real_.push_back(c.real());
    max_imag_ = std::max(max_imag_, std::abs(c.imag()));
  }
}

SymbolCoefficients symbol_fourier_coefficients(double k_ratio, int n, const numerics::QuadratureSpec& spec) {
  return SymbolCoefficients(k_ratio, n, spec);
}

double determinant(const SymbolCoefficients& coeffs, int n) {
  check_order(n);
  if (n > coeffs.order() + 1) throw InvalidArgument("coefficient table too short for requested order");
  Eigen::MatrixXd t(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) t(i, j) = coeffs(i - j);
  }
  return t.partialPivLu().determinant();
}

double szego_limit(double k_ratio) {
  check_k(k_ratio);
  if (k_ratio >= 1.0) return 0.0;
  return std::pow(1.0 - k_ratio * k_ratio, 0.25);
}

CorrelationResult correlation_determinant(const CorrelationQuery& query) {
  query.validate();
  const SymbolCoefficients coeffs(query.k_ratio, query.n);
  return {query.n, determinant(coeffs, query.n), szego_limit(query.k_ratio)};
}

std::vector<CorrelationResult> correlation_sequence(double k_ratio, int n_max) {
  check_k(k_ratio);
  check_order(n_max);
  const SymbolCoefficients coeffs(k_ratio, n_max);
  const double limit = szego_limit(k_ratio);
  std::vector<CorrelationResult> out;
  out.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) out.push_back({n, determinant(coeffs, n), limit});
  return out;
}

}  // namespace qsm::toeplitz
