#include "qsm/dev.hpp"

#include <atomic>

namespace qsm::dev {

namespace {
std::atomic<Fault> g_fault{Fault::none};
}

void inject(Fault fault) { g_fault.store(fault); }

Fault active_fault() { return g_fault.load(std::memory_order_relaxed); }

std::optional<Fault> parse_fault(std::string_view name) {
  if (name == "none") return Fault::none;
  if (name == "dispersion-sign") return Fault::dispersion_sign;
  return std::nullopt;
}

}  // namespace qsm::dev
