#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace msamp {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  unsigned threads = 1;
  std::uint64_t seed = 1234567;
  std::ostream* log = nullptr;  // progress lines, optional
};

/// Acceptance criteria 1..11.
std::vector<int> all_criteria();
CriterionResult run_criterion(int id, const ValidationOptions& options);

/// "[PASS] 3 divergence-free ... (12.3 s)" followed by indented detail lines.
std::string format_result(const CriterionResult& r);

}  // namespace msamp
