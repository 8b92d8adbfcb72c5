#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace qsm::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<std::string> tags;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

/// Runs every acceptance criterion whose name or tags contain `filter`
/// (all when empty). Each criterion must meet its tolerance and its runtime
/// budget. `on_result` is called as each criterion finishes.
std::vector<CriterionResult> run(std::string_view filter = {},
                                 const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_line(const CriterionResult& r);

}  // namespace qsm::acceptance
