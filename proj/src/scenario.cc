#include "stabkit/scenario.h"

#include <algorithm>
#include <set>

#include "stabkit/errors.h"
#include "stabkit/matrix_io.h"

namespace stabkit {
namespace {

using nlohmann::json;

void CheckKeys(const json& obj, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw SchemaError(where + ": unknown field '" + key + "'");
  }
}

const json& Require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

double Number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError(where + ": expected a number");
  return v.get<double>();
}

int Integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw SchemaError(where + ": expected an integer");
  return v.get<int>();
}

std::string String(const json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError(where + ": expected a string");
  return v.get<std::string>();
}

StiffnessVariant ParseStiffness(const std::string& s) {
  if (s == "wave_dirichlet") return StiffnessVariant::kWaveDirichlet;
  if (s == "wave_tip") return StiffnessVariant::kWaveTip;
  if (s == "beam_clamped") return StiffnessVariant::kBeamClamped;
  throw SchemaError("stiffness.variant: unknown '" + s + "'");
}

DampingKind ParseDamping(const json& d, int n) {
  CheckKeys(d, {"variant", "params"}, "damping");
  const std::string v = String(Require(d, "variant", "damping"), "damping.variant");
  const json params = d.contains("params") ? d.at("params") : json::object();
  DampingKind k;
  if (v == "viscous") {
    k.variant = DampingVariant::kViscous;
    CheckKeys(params, {"lo", "hi"}, "damping.params");
    if (params.contains("lo")) k.lo = Number(params.at("lo"), "damping.params.lo");
    if (params.contains("hi")) k.hi = Number(params.at("hi"), "damping.params.hi");
  } else if (v == "kelvin_voigt") {
    k.variant = DampingVariant::kKelvinVoigt;
    CheckKeys(params, {"a"}, "damping.params");
    if (params.contains("a")) {
      const json& a = params.at("a");
      if (a.is_number()) {
        k.a = Eigen::VectorXd::Constant(std::max(n, 0), a.get<double>());
      } else if (a.is_array()) {
        k.a.resize(a.size());
        for (size_t i = 0; i < a.size(); ++i) k.a(i) = Number(a[i], "damping.params.a");
      } else {
        throw SchemaError("damping.params.a: expected a number or an array");
      }
    }
  } else if (v == "boundary_tip") {
    k.variant = DampingVariant::kBoundaryTip;
    CheckKeys(params, {}, "damping.params");
  } else {
    throw SchemaError("damping.variant: unknown '" + v + "'");
  }
  return k;
}

}  // namespace

ModelSpec ModelFromJson(const json& doc) {
  CheckKeys(doc, {"n", "stiffness", "damping", "A", "D"}, "model");
  const int n = Integer(Require(doc, "n", "model"), "model.n");
  const json& st = Require(doc, "stiffness", "model");
  CheckKeys(st, {"variant", "shift"}, "stiffness");
  StiffnessKind stiffness;
  stiffness.variant = ParseStiffness(String(Require(st, "variant", "stiffness"),
                                            "stiffness.variant"));
  if (st.contains("shift")) stiffness.shift = Number(st.at("shift"), "stiffness.shift");
  const DampingKind damping = ParseDamping(Require(doc, "damping", "model"), n);
  const Eigen::MatrixXd A = MatrixFromJson(Require(doc, "A", "model"));
  const Eigen::MatrixXd D = MatrixFromJson(Require(doc, "D", "model"));
  try {
    if (n < 2) throw std::invalid_argument("model.n must be >= 2");
    ModelSpec m{Grid1D::Make(n), stiffness, damping, CouplingPair(A, D)};
    m.Validate();
    return m;
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

json ModelToJson(const ModelSpec& model) {
  json params = json::object();
  switch (model.damping.variant) {
    case DampingVariant::kViscous:
      params = {{"lo", model.damping.lo}, {"hi", model.damping.hi}};
      break;
    case DampingVariant::kKelvinVoigt:
      if (model.damping.a.size() > 0) {
        params["a"] = std::vector<double>(model.damping.a.data(),
                                          model.damping.a.data() + model.damping.a.size());
      }
      break;
    case DampingVariant::kBoundaryTip:
      break;
  }
  return {{"n", model.grid.n},
          {"stiffness",
           {{"variant", ToString(model.stiffness.variant)}, {"shift", model.stiffness.shift}}},
          {"damping", {{"variant", ToString(model.damping.variant)}, {"params", params}}},
          {"A", MatrixToJson(model.pair.A())},
          {"D", MatrixToJson(model.pair.D())}};
}

Scenario ScenarioFromJson(const json& doc) {
  CheckKeys(doc, {"name", "model", "analyses", "params", "output"}, "scenario");
  Scenario s;
  s.name = String(Require(doc, "name", "scenario"), "scenario.name");
  if (doc.contains("model")) s.model = ModelFromJson(doc.at("model"));
  const json& an = Require(doc, "analyses", "scenario");
  if (!an.is_array()) throw SchemaError("scenario.analyses: expected an array");
  static const std::set<std::string> kKnown = {"kalman", "spectrum", "resolvent",
                                               "decay", "branches"};
  for (const auto& a : an) {
    const std::string name = String(a, "scenario.analyses");
    if (!kKnown.count(name)) throw SchemaError("scenario.analyses: unknown '" + name + "'");
    if (std::find(s.analyses.begin(), s.analyses.end(), name) == s.analyses.end()) {
      s.analyses.push_back(name);
    }
  }
  if (doc.contains("output")) s.output = String(doc.at("output"), "scenario.output");
  if (doc.contains("params")) {
    const json& p = doc.at("params");
    CheckKeys(p, {"resolvent", "branches", "decay", "kalman"}, "params");
    if (p.contains("resolvent")) {
      const json& r = p.at("resolvent");
      CheckKeys(r, {"beta_lo", "beta_hi", "grid", "points", "fit"}, "params.resolvent");
      if (r.contains("beta_lo")) s.resolvent.beta_lo = Number(r.at("beta_lo"), "beta_lo");
      if (r.contains("beta_hi")) s.resolvent.beta_hi = Number(r.at("beta_hi"), "beta_hi");
      if (r.contains("grid")) s.resolvent.grid = String(r.at("grid"), "grid");
      if (r.contains("points")) s.resolvent.points = Integer(r.at("points"), "points");
      if (r.contains("fit")) s.resolvent.fit = String(r.at("fit"), "fit");
      if (s.resolvent.grid != "resonance" && s.resolvent.grid != "uniform") {
        throw SchemaError("params.resolvent.grid: expected resonance or uniform");
      }
      if (s.resolvent.fit != "envelope" && s.resolvent.fit != "all") {
        throw SchemaError("params.resolvent.fit: expected envelope or all");
      }
      if (!(s.resolvent.beta_lo > 0 && s.resolvent.beta_hi > s.resolvent.beta_lo) ||
          s.resolvent.points < 3) {
        throw SchemaError("params.resolvent: need 0 < beta_lo < beta_hi, points >= 3");
      }
    }
    if (p.contains("branches")) {
      const json& b = p.at("branches");
      CheckKeys(b, {"example", "k_lo", "k_hi"}, "params.branches");
      if (b.contains("example")) s.branches.example = String(b.at("example"), "example");
      if (b.contains("k_lo")) s.branches.k_lo = Integer(b.at("k_lo"), "k_lo");
      if (b.contains("k_hi")) s.branches.k_hi = Integer(b.at("k_hi"), "k_hi");
      static const std::set<std::string> kEx = {"5.1", "5.2", "5.3", "modal"};
      if (!kEx.count(s.branches.example)) {
        throw SchemaError("params.branches.example: expected 5.1, 5.2, 5.3 or modal");
      }
      if (s.branches.k_lo < 1 || s.branches.k_hi < s.branches.k_lo) {
        throw SchemaError("params.branches: need 1 <= k_lo <= k_hi");
      }
    }
    if (p.contains("decay")) {
      const json& d = p.at("decay");
      CheckKeys(d, {"dt", "T", "modes"}, "params.decay");
      if (d.contains("dt")) s.decay.dt = Number(d.at("dt"), "dt");
      if (d.contains("T")) s.decay.T = Number(d.at("T"), "T");
      if (d.contains("modes")) s.decay.modes = Integer(d.at("modes"), "modes");
      if (!(s.decay.dt > 0) || s.decay.T < 0 || s.decay.modes < 1) {
        throw SchemaError("params.decay: need dt > 0, T >= 0, modes >= 1");
      }
    }
    if (p.contains("kalman")) {
      const json& k = p.at("kalman");
      CheckKeys(k, {"samples"}, "params.kalman");
      if (k.contains("samples")) s.coercivity_samples = Integer(k.at("samples"), "samples");
    }
  }
  const bool needs_model = std::any_of(s.analyses.begin(), s.analyses.end(),
                                       [&](const std::string& a) {
                                         return a != "branches" ||
                                                s.branches.example == "modal";
                                       });
  if (needs_model && !s.model) {
    throw SchemaError("scenario: the requested analyses need a model");
  }
  if (s.model && std::count(s.analyses.begin(), s.analyses.end(), "branches") &&
      s.branches.example == "modal" && !s.model->damping.is_uniform()) {
    throw SchemaError("scenario: modal branches need spatially uniform damping");
  }
  return s;
}

}  // namespace stabkit
