#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stabkit/discretize.h"

namespace stabkit {

/// Strict parse of {n, stiffness: {variant, shift}, damping: {variant,
/// params}, A, D}. Unknown fields and invalid combinations throw SchemaError.
ModelSpec ModelFromJson(const nlohmann::json& doc);
nlohmann::json ModelToJson(const ModelSpec& model);

struct ResolventParams {
  double beta_lo = 10.0;
  double beta_hi = 200.0;
  std::string grid = "resonance";  // or "uniform"
  int points = 200;                // uniform grid size
  std::string fit = "envelope";    // or "all"
};

struct BranchParams {
  std::string example = "modal";  // "5.1", "5.2", "5.3" or "modal"
  int k_lo = 1;
  int k_hi = 20;
};

struct DecayParams {
  double dt = 0.02;
  double T = 0.0;  // 0: 1.05 times the calibrated window end
  int modes = 5;
};

struct Scenario {
  std::string name;
  std::optional<ModelSpec> model;  // branches for 5.1-5.3 need none
  std::vector<std::string> analyses;
  ResolventParams resolvent;
  BranchParams branches;
  DecayParams decay;
  int coercivity_samples = 1000;
  std::string output;  // empty: caller decides
};

/// Analyses: kalman, spectrum, resolvent, decay, branches.
Scenario ScenarioFromJson(const nlohmann::json& doc);

}  // namespace stabkit
