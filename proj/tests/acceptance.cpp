// Acceptance suite: one PASS/FAIL line per criterion.
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "msamp/validation.hpp"

int main(int argc, char** argv) {
  msamp::ValidationOptions opt;
  opt.threads = std::max(1u, std::thread::hardware_concurrency());
  opt.log = &std::cerr;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) ids = msamp::all_criteria();
  int failed = 0;
  for (int id : ids) {
    const auto r = msamp::run_criterion(id, opt);
    std::cout << msamp::format_result(r) << std::endl;
    failed += r.pass ? 0 : 1;
  }
  std::cout << "acceptance: " << ids.size() - failed << "/" << ids.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
