#pragma once

#include <string_view>

namespace qsm {

enum class Method { quadrature, saddle, oracle };

constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::quadrature: return "quadrature";
    case Method::saddle: return "saddle";
    case Method::oracle: return "oracle";
  }
  return "unknown";
}

// Free energy per site with the numerical error estimate of the route that
// produced it.
struct FreeEnergyResult {
  double value = 0.0;
  double err_est = 0.0;
  Method method = Method::quadrature;
};

}  // namespace qsm
