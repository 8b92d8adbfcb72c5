#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace qsm::numerics {

using RealFunction = std::function<double(double)>;

struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 2048;

  // Throws InvalidArgument unless abs_tol > 0, rel_tol > 0, max_subdivisions >= 8.
  void validate() const;
};

struct RootSpec {
  double x_tol = 1e-13;
  double f_tol = 1e-12;
  int max_iter = 200;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double err_est = 0.0;
  int subdivisions = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on a finite interval.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol * |value|). Throws
/// NonConvergence when the subdivision budget runs out first, and
/// InvalidArgument unless a < b.
QuadratureResult integrate(const RealFunction& f, double a, double b,
                           const QuadratureSpec& spec = {});

/// Trapezoid rule over one period [0, 2*pi), doubling the node count until
/// two successive estimates agree to tolerance. Spectrally accurate for
/// smooth periodic integrands. Returns the mean value times 2*pi.
QuadratureResult integrate_periodic(const RealFunction& f,
                                    const QuadratureSpec& spec = {});

struct MinimumResult {
  double x_min = 0.0;
  double g_min = 0.0;
  double derivative = 0.0;  // g'(x_min), analytic or central difference
  int iterations = 0;
};

/// Minimizer of a strictly convex g on (lo, hi) by bisection on the sign of
/// the derivative. Positive brackets are bisected geometrically and
/// terminate on a relative width of x_tol; other brackets terminate on
/// x_tol * max(1, |x|).
///
/// Throws BracketError when g' does not change sign between lo and hi, and
/// NonConvergence when max_iter is reached first.
MinimumResult find_min_convex(const RealFunction& g, const RealFunction& dg,
                              double lo, double hi, const RootSpec& spec = {});

/// Derivative-free overload: central differences for g', golden-section
/// search when the difference quotients cannot bracket the minimum.
MinimumResult find_min_convex(const RealFunction& g, double lo, double hi,
                              const RootSpec& spec = {});

/// Reproducible random stream identified by (seed, stream_id).
///
/// A value type; copies continue independently from the same state.
/// substream(i) derives a statistically independent stream so that work
/// split into batches draws the same numbers regardless of execution order.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  RandomStream substream(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }
  double uniform();  // [0, 1)
  double normal();   // standard normal

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qsm::numerics
