#include "stabkit/bundled.h"

#include <stdexcept>

namespace stabkit {

// Keep in sync with scenarios/*.json; a unit test compares the two.
const std::vector<BundledScenario>& BundledScenarios() {
  static const std::vector<BundledScenario> kAll = {
    {"ex41", R"json({
  "name": "ex41",
  "model": {
    "n": 60,
    "stiffness": {"variant": "wave_dirichlet", "shift": 0},
    "damping": {"variant": "viscous", "params": {"lo": 0.25, "hi": 0.75}},
    "A": [[1, 0], [0, 2]],
    "D": [[1, 2], [2, 4]]
  },
  "analyses": ["kalman", "spectrum", "resolvent", "decay"],
  "params": {
    "resolvent": {"beta_lo": 10, "beta_hi": 80, "grid": "resonance", "fit": "envelope"},
    "decay": {"dt": 0.02, "T": 0, "modes": 8}
  }
}
)json"},
    {"ex42", R"json({
  "name": "ex42",
  "model": {
    "n": 40,
    "stiffness": {"variant": "beam_clamped", "shift": 0},
    "damping": {"variant": "viscous", "params": {"lo": 0.3, "hi": 0.7}},
    "A": [[1, 0], [0, 2]],
    "D": [[1, 2], [2, 4]]
  },
  "analyses": ["kalman", "spectrum"]
}
)json"},
    {"ex43", R"json({
  "name": "ex43",
  "model": {
    "n": 40,
    "stiffness": {"variant": "wave_dirichlet", "shift": 0},
    "damping": {"variant": "kelvin_voigt", "params": {"a": 1}},
    "A": [[1, 0], [0, 2]],
    "D": [[1, 2], [2, 4]]
  },
  "analyses": ["kalman", "spectrum", "resolvent", "branches"],
  "params": {
    "resolvent": {"beta_lo": 10, "beta_hi": 60, "grid": "resonance", "fit": "envelope"},
    "branches": {"example": "modal", "k_lo": 1, "k_hi": 20}
  }
}
)json"},
    {"ex45", R"json({
  "name": "ex45",
  "model": {
    "n": 60,
    "stiffness": {"variant": "wave_tip", "shift": 0},
    "damping": {"variant": "boundary_tip"},
    "A": [[1, 0], [0, 0]],
    "D": [[1, -1], [-1, 1]]
  },
  "analyses": ["kalman", "spectrum", "resolvent"],
  "params": {
    "resolvent": {"beta_lo": 10, "beta_hi": 80, "grid": "resonance", "fit": "envelope"}
  }
}
)json"},
    {"ex51", R"json({
  "name": "ex51",
  "model": {
    "n": 100,
    "stiffness": {"variant": "wave_dirichlet", "shift": 0},
    "damping": {"variant": "viscous", "params": {"lo": 0, "hi": 1}},
    "A": [[1, 0], [0, 2]],
    "D": [[1, 2], [2, 4]]
  },
  "analyses": ["kalman", "branches"],
  "params": {
    "branches": {"example": "5.1", "k_lo": 5, "k_hi": 50}
  }
}
)json"},
    {"ex52", R"json({
  "name": "ex52",
  "model": {
    "n": 100,
    "stiffness": {"variant": "wave_dirichlet", "shift": 0},
    "damping": {"variant": "kelvin_voigt", "params": {"a": 1}},
    "A": [[1, 0], [0, 2]],
    "D": [[1, 2], [2, 4]]
  },
  "analyses": ["kalman", "branches"],
  "params": {
    "branches": {"example": "5.2", "k_lo": 5, "k_hi": 50}
  }
}
)json"},
    {"ex53", R"json({
  "name": "ex53",
  "model": {
    "n": 60,
    "stiffness": {"variant": "wave_tip", "shift": 0},
    "damping": {"variant": "boundary_tip"},
    "A": [[1, 0], [0, 0]],
    "D": [[1, -1], [-1, 1]]
  },
  "analyses": ["kalman", "branches"],
  "params": {
    "branches": {"example": "5.3", "k_lo": 3, "k_hi": 40}
  }
}
)json"},
  };
  return kAll;
}

std::string BundledScenarioJson(const std::string& name) {
  for (const auto& s : BundledScenarios()) {
    if (name == s.name) return s.json;
  }
  throw std::out_of_range("no bundled scenario named " + name);
}

}  // namespace stabkit
