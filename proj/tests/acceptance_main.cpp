// Acceptance runner: one line per criterion, exit status 0 only if all pass.
#include <cstdio>

#include "nagaoka/acceptance.hpp"

int main() {
  int failed = 0;
  for (const auto& criterion : nagaoka::acceptance::all_criteria()) {
    const auto r = criterion();
    std::printf("%s\n", r.line().c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  std::printf("%d of 12 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
