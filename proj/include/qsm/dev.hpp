#pragma once

// Development-only fault injection, used to check that the acceptance suite
// actually notices a broken formula. Never set in normal runs.

#include <optional>
#include <string_view>

namespace qsm::dev {

enum class Fault { none, dispersion_sign };

void inject(Fault fault);
Fault active_fault();
std::optional<Fault> parse_fault(std::string_view name);

}  // namespace qsm::dev
