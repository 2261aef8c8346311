#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bai {

struct PropertyResult {
  std::string name;
  bool pass = false;
  bool informational = false;  // reported but never failing
  std::string detail;
};

// Seeded, deterministic property suite covering the library's contracts:
// divergence laws, the Legendre-transform duality, rate orderings, schedule
// arithmetic, strategy accounting, and simulation reproducibility.
std::vector<PropertyResult> run_property_suite(std::uint64_t seed);

bool all_passed(const std::vector<PropertyResult>& results);

}  // namespace bai
