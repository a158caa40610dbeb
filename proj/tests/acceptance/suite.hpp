#pragma once

#include <string>
#include <vector>

namespace dpk::acceptance {

struct Outcome {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;
};

struct SuiteOptions {
  // Monte Carlo sample sizes divided by 10; budgets unchanged.
  bool fast = false;
};

constexpr int kCriterionCount = 15;

Outcome run_criterion(int id, const SuiteOptions& options = {});
std::vector<Outcome> run_all(const SuiteOptions& options = {});

/// One line: "PASS 01 <title> [t s / budget s] detail".
std::string format_line(const Outcome& outcome);

}  // namespace dpk::acceptance
