#include "qsm/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qsm/errors.hpp"

namespace qsm::numerics {

namespace {

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights at the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

double checked(const RealFunction& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    throw DomainError("integrand is not finite at x = " + std::to_string(x));
  }
  return y;
}

Panel gauss_kronrod_15(const RealFunction& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = checked(f, center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double abs_sum = std::abs(kronrod);

  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = checked(f, center - dx);
    f2[j] = checked(f, center + dx);
    const double pair = f1[j] + f2[j];
    kronrod += kWgk[j] * pair;
    abs_sum += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }

  const double mean = 0.5 * kronrod;
  double asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }

  const double result = kronrod * half;
  const double res_abs = abs_sum * std::abs(half);
  const double res_asc = asc * std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * res_abs, err);
  }
  return {a, b, result, err};
}

bool by_error(const Panel& lhs, const Panel& rhs) { return lhs.error < rhs.error; }

}  // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 8) {
    throw InvalidArgument("QuadratureSpec requires abs_tol > 0, rel_tol > 0, max_subdivisions >= 8");
  }
}

void RootSpec::validate() const {
  if (!(x_tol > 0.0) || !(f_tol > 0.0) || max_iter <= 0) {
    throw InvalidArgument("RootSpec requires positive tolerances and iteration budget");
  }
}

QuadratureResult integrate(const RealFunction& f, double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  if (!(a < b)) throw InvalidArgument("integrate requires a < b");

  std::vector<Panel> heap;
  heap.reserve(static_cast<std::size_t>(spec.max_subdivisions) + 1);
  heap.push_back(gauss_kronrod_15(f, a, b));
  double total = heap.front().value;
  double total_err = heap.front().error;

  int subdivisions = 0;
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (subdivisions >= spec.max_subdivisions) {
      throw NonConvergence("integrate: subdivision budget exhausted (err_est " +
                           std::to_string(total_err) + ")");
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    heap.pop_back();

    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      throw NonConvergence("integrate: panel width reached machine resolution");
    }
    const Panel left = gauss_kronrod_15(f, worst.a, mid);
    const Panel right = gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    ++subdivisions;
  }

  // Re-sum in interval order so the reported value does not carry the
  // running-update rounding.
  std::sort(heap.begin(), heap.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  QuadratureResult out;
  for (const auto& p : heap) {
    out.value += p.value;
    out.err_est += p.error;
  }
  out.subdivisions = subdivisions;
  return out;
}

QuadratureResult integrate_periodic(const RealFunction& f, const QuadratureSpec& spec) {
  spec.validate();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr int kMaxNodes = 1 << 22;

  int nodes = 16;
  double sum = 0.0;
  for (int j = 0; j < nodes; ++j) sum += checked(f, two_pi * j / nodes);
  double estimate = two_pi * sum / nodes;

  int doublings = 0;
  while (true) {
    double odd = 0.0;
    for (int j = 0; j < nodes; ++j) odd += checked(f, two_pi * (2 * j + 1) / (2.0 * nodes));
    sum += odd;
    nodes *= 2;
    ++doublings;
    const double refined = two_pi * sum / nodes;
    const double diff = std::abs(refined - estimate);
    estimate = refined;
    if (nodes >= 32 && diff <= std::max(spec.abs_tol, spec.rel_tol * std::abs(refined))) {
      return {refined, diff, doublings};
    }
    if (nodes >= kMaxNodes) {
      throw NonConvergence("integrate_periodic: node budget exhausted");
    }
  }
}

MinimumResult find_min_convex(const RealFunction& g, const RealFunction& dg, double lo, double hi,
                              const RootSpec& spec) {
  spec.validate();
  if (!(lo < hi)) throw InvalidArgument("find_min_convex requires lo < hi");

  const double dlo = dg(lo);
  const double dhi = dg(hi);
  if (std::isnan(dlo) || std::isnan(dhi)) throw DomainError("derivative is NaN at bracket end");
  if (dlo == 0.0) return {lo, g(lo), 0.0, 0};
  if (dhi == 0.0) return {hi, g(hi), 0.0, 0};
  if (!(dlo < 0.0 && dhi > 0.0)) {
    throw BracketError("find_min_convex: derivative does not change sign on [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
  }

  int iter = 0;
  for (;; ++iter) {
    const bool positive = lo > 0.0;
    const double width = hi - lo;
    if (positive ? width <= spec.x_tol * lo
                 : width <= spec.x_tol * std::max(1.0, std::abs(0.5 * (lo + hi)))) {
      break;
    }
    if (iter >= spec.max_iter) {
      throw NonConvergence("find_min_convex: iteration budget exhausted");
    }
    const double mid = (positive && hi > 4.0 * lo) ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) break;
    const double dm = dg(mid);
    if (std::isnan(dm)) throw DomainError("derivative is NaN inside bracket");
    if (dm == 0.0) {
      lo = hi = mid;
      break;
    }
    (dm < 0.0 ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);
  return {x, g(x), dg(x), iter};
}

namespace {

MinimumResult golden_section(const RealFunction& g, double lo, double hi, const RootSpec& spec) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double g1 = g(x1);
  double g2 = g(x2);
  int iter = 0;
  while (hi - lo > spec.x_tol * std::max(1.0, std::abs(x1))) {
    if (iter++ >= spec.max_iter) throw NonConvergence("golden-section search: iteration budget exhausted");
    if (g1 < g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - inv_phi * (hi - lo);
      g1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + inv_phi * (hi - lo);
      g2 = g(x2);
    }
  }
  const double x = 0.5 * (lo + hi);
  return {x, g(x), 0.0, iter};
}

}  // namespace

MinimumResult find_min_convex(const RealFunction& g, double lo, double hi, const RootSpec& spec) {
  spec.validate();
  if (!(lo < hi)) throw InvalidArgument("find_min_convex requires lo < hi");
  const double lo0 = lo;
  const double hi0 = hi;

  // Central differences, shrunk near the bracket ends so that no
  // evaluation leaves [lo0, hi0]; one-sided at the ends themselves.
  auto derivative = [&](double x) {
    double h = 1e-6 * std::max(1.0, std::abs(x));
    if (lo0 > 0.0) h = std::min(h, 1e-6 * x);
    if (x - lo0 < h) return (g(x + h) - g(x)) / h;
    if (hi0 - x < h) return (g(x) - g(x - h)) / h;
    return (g(x + h) - g(x - h)) / (2.0 * h);
  };

  try {
    auto result = find_min_convex(g, derivative, lo, hi, spec);
    return result;
  } catch (const BracketError&) {
  } catch (const DomainError&) {
  }
  auto result = golden_section(g, lo0, hi0, spec);
  result.derivative = derivative(result.x_min);
  return result;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

RandomStream RandomStream::substream(std::uint64_t index) const {
  return RandomStream(seed_, splitmix64(stream_id_ ^ splitmix64(index + 1)));
}

double RandomStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RandomStream::normal() { return normal_(engine_); }

}  // namespace qsm::numerics
