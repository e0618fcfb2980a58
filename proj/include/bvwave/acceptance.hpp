#pragma once

#include <string>
#include <vector>

namespace bvwave {

struct CriterionResult {
  int id;
  std::string title;
  bool passed;
  std::vector<std::string> details;  // one line per sub-check
  double seconds;
};

/// Runs the numbered acceptance criteria (1..8).
std::vector<CriterionResult> run_acceptance(const std::vector<int>& which);

std::string format_result(const CriterionResult& r);

}  // namespace bvwave
