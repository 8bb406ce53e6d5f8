// Runs the seven acceptance checks and prints one verdict line per check.
#include <cstdio>

#include "relkac/verify.hpp"

int main() {
  int failed = 0;
  for (int k = 1; k <= relkac::kCriterionCount; ++k) {
    const relkac::CheckResult r = relkac::acceptance_criterion(k);
    std::printf("%s %s %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.title.c_str(), r.seconds);
    std::printf("  %s\n", r.detail.dump().c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%d of %d checks passed\n", relkac::kCriterionCount - failed, relkac::kCriterionCount);
  return failed == 0 ? 0 : 1;
}
