#include "suite.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the determinantal process toolkit"};
  int only = 0;
  bool fast = false;
  app.add_option("--only", only, "Run a single criterion (1-15)")->check(CLI::Range(1, dpk::acceptance::kCriterionCount));
  app.add_flag("--fast", fast, "Reduce Monte Carlo sample sizes tenfold");
  CLI11_PARSE(app, argc, argv);

  const dpk::acceptance::SuiteOptions options{fast};
  bool all = true;
  for (int id = 1; id <= dpk::acceptance::kCriterionCount; ++id) {
    if (only != 0 && id != only) continue;
    const auto outcome = dpk::acceptance::run_criterion(id, options);
    std::cout << dpk::acceptance::format_line(outcome) << std::endl;
    all = all && outcome.passed;
  }
  return all ? 0 : 1;
}
