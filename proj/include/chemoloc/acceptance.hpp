#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chemoloc::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;           // one-line summary data
  std::vector<std::string> log; // supplementary lines (configs, reports)
};

inline constexpr int kCriteria = 10;

// Runs one acceptance criterion (1-based).
CriterionResult run_criterion(int id);

// Runs the requested criterion (or all when id == 0), printing one
// "[PASS]"/"[FAIL]" line per criterion plus indented detail lines.
// Returns 0 when everything passed, 1 otherwise.
int run_and_report(std::ostream& os, int id = 0);

}  // namespace chemoloc::acceptance
