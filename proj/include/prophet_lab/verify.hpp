#ifndef PROPHET_LAB_VERIFY_HPP
#define PROPHET_LAB_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace prophet_lab {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Named smoke suites: distributions, feasibility, instances, policies,
// evaluation, analysis, reductions, or all. Checks compare library output
// against hand-computed values and cross-route recomputations; a thrown
// exception fails the check with its message as detail.
std::vector<CheckResult> run_verify_suite(const std::string& suite, uint64_t seed);

}  // namespace prophet_lab

#endif
