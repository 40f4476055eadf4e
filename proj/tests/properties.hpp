#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wavest::props {

struct PropertyResult {
  std::string name;
  bool passed = true;
  int cases = 0;
  double worst = 0.0;  // largest normalized violation measure seen
  std::string detail;
};

std::vector<PropertyResult> run_property_suite(std::uint64_t seed = 2024);

}  // namespace wavest::props
