#include "acceptance.hpp"

#include <cstdio>

int main() {
  const auto results = manifold_descent::cli::run_acceptance();
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] %d: %s -- %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str());
    if (!r.passed) ++failed;
  }
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
