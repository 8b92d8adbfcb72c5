#pragma once

// Zero-temperature s^x s^x correlation of the transverse-field Ising chain as
// a Toeplitz determinant, and its infinite-separation limit.
//
// The symbol is phi(theta) = [(1 - k e^{-i theta}) / (1 - k e^{i theta})]^{1/2}
// with k = B / J and matrix entries T_ij = c_{i-j}. The square root is the
// branch continuous in theta with phi -> 1 as k -> 0; for k < 1 it is the
// principal branch and for k > 1 it is its continuation,
// (1 - k e^{-i theta}) / |1 - k e^{i theta}|.

#include <complex>
#include <vector>

#include "qsm/numerics.hpp"

namespace qsm::toeplitz {

inline constexpr int kMaxOrder = 256;

struct CorrelationQuery {
  double k_ratio = 0.0;  // B / J, >= 0
  int n = 1;             // separation, 1 <= n <= kMaxOrder

  void validate() const;
};

struct CorrelationResult {
  int n = 0;
  double det_value = 0.0;
  double szego_limit = 0.0;
};

/// Fourier coefficients c_m, m in [-n, n], of the symbol.
class SymbolCoefficients {
 public:
  SymbolCoefficients(double k_ratio, int n, const numerics::QuadratureSpec& spec = {});

  double k_ratio() const { return k_ratio_; }
  int order() const { return n_; }
  double operator()(int m) const { return real_.at(static_cast<std::size_t>(m + n_)); }
  std::complex<double> complex_value(int m) const { return raw_.at(static_cast<std::size_t>(m + n_)); }
  double max_imag() const { return max_imag_; }
  double err_est() const { return err_est_; }
  int nodes() const { return nodes_; }

 private:
  double k_ratio_;
  int n_;
  std::vector<std::complex<double>> raw_;
  std::vector<double> real_;
  double max_imag_ = 0.0;
  double err_est_ = 0.0;
  int nodes_ = 0;
};

/// The symbol itself, exposed for independent checks.
std::complex<double> symbol(double k_ratio, double theta);

SymbolCoefficients symbol_fourier_coefficients(double k_ratio, int n,
                                               const numerics::QuadratureSpec& spec = {});

/// det[c_{i-j}] of order n, with the limit filled in. Throws CapExceeded for
/// n > 256.
CorrelationResult correlation_determinant(const CorrelationQuery& query);

/// Determinant for the leading orders 1..n of one coefficient table.
std::vector<CorrelationResult> correlation_sequence(double k_ratio, int n_max);

double determinant(const SymbolCoefficients& coeffs, int n);

/// (1 - k^2)^{1/4} for k < 1, 0 otherwise.
double szego_limit(double k_ratio);

}  // namespace qsm::toeplitz
