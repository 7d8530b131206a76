#pragma once

#include <string>
#include <vector>

namespace stabkit {

/// Scenario documents shipped with the binary; identical to scenarios/*.json.
struct BundledScenario {
  const char* name;
  const char* json;
};

const std::vector<BundledScenario>& BundledScenarios();

/// Throws std::out_of_range for an unknown name.
std::string BundledScenarioJson(const std::string& name);

}  // namespace stabkit
