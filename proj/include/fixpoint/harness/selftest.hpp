#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fixpoint::harness {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Cross-checks every route to p(x_0 | y_{1:K}) against a brute-force dense
/// posterior on a handful of small random models.
std::vector<SelftestCheck> run_selftest(std::uint64_t seed = 0, int models = 5);

}  // namespace fixpoint::harness
