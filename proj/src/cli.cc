#include "stabkit/cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stabkit/branches.h"
#include "stabkit/bundled.h"
#include "stabkit/errors.h"
#include "stabkit/evolve.h"
#include "stabkit/kalman.h"
#include "stabkit/matrix_io.h"
#include "stabkit/parallel.h"
#include "stabkit/report.h"
#include "stabkit/scenario.h"
#include "stabkit/spectra.h"

namespace stabkit {
namespace {

using nlohmann::json;
using std::numbers::pi;

struct Flags {
  std::uint64_t seed = 1;
  std::string out;
  int threads = 0;
};

std::string Fmt(double x) { return FormatNumber(x); }

Scenario LoadScenario(const std::string& ref) {
  if (!std::filesystem::exists(ref)) {
    try {
      return ScenarioFromJson(json::parse(BundledScenarioJson(ref)));
    } catch (const std::out_of_range&) {
      throw SchemaError("no scenario file or bundled scenario named '" + ref + "'");
    }
  }
  return ScenarioFromJson(LoadJsonFile(ref));
}

std::string OutputDir(const Scenario& s, const Flags& f) {
  if (!f.out.empty()) return f.out;
  if (!s.output.empty()) return s.output;
  return "out/" + s.name;
}

json KalmanSummary(const CouplingPair& pair, int samples, std::uint64_t seed) {
  json j;
  j["N"] = pair.size();
  j["kalman_rank"] = KalmanRank(pair);
  j["max_invariant_dim"] = MaxInvariantDim(pair);
  j["det_D"] = pair.D().determinant();
  j["commutator_norm"] = CommutatorNorm(pair);
  j["asymmetry_defect"] = pair.asymmetry_defect();
  const EigenGroups groups = EigGroup(pair.A(), DefaultGroupTolerance(pair.A()));
  const BlockPartition bp = MakeBlockPartition(pair, groups);
  j["group_eigenvalues"] = groups.lambdas;
  j["group_multiplicities"] = groups.sigmas;
  j["block_independent"] = std::vector<bool>(bp.independence.begin(), bp.independence.end());
  if (bp.all_independent()) {
    const double c = CoercivityConstant(bp);
    const CoercivityCheck chk = VerifyCoercivity(bp, c, samples, seed);
    j["coercivity"] = c;
    j["coercivity_check"] = {{"pass", chk.pass}, {"worst_slack", chk.worst_slack}};
  } else {
    j["coercivity"] = nullptr;
  }
  const SpectralFactorD f = SpectralFactor(pair.D());
  j["spectral_factor"] = {{"rank", f.rank}, {"deltas", f.deltas}};
  return j;
}

void PrintKalman(const json& k, std::ostream& out) {
  out << "kalman rank: " << k["kalman_rank"].get<int>() << " of " << k["N"].get<int>() << "\n";
  out << "largest invariant subspace in Ker(D): " << k["max_invariant_dim"].get<int>() << "\n";
  out << "commutator |AD-DA|: " << Fmt(k["commutator_norm"].get<double>()) << "\n";
  if (k["coercivity"].is_null()) {
    out << "coercivity: undefined (a block of D is column-dependent)\n";
  } else {
    out << "coercivity: " << Fmt(k["coercivity"].get<double>()) << " ("
        << (k["coercivity_check"]["pass"].get<bool>() ? "verified" : "check FAILED") << ")\n";
  }
}

EigenList SortedSpectrum(const Generator& gen) {
  EigenList eig = EigAll(gen.op, {.residuals = true});
  std::vector<Eigen::Index> idx(eig.values.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const cdouble x = eig.values(a), y = eig.values(b);
    return x.imag() != y.imag() ? x.imag() < y.imag() : x.real() < y.real();
  });
  EigenList sorted;
  sorted.values.resize(idx.size());
  sorted.residuals.resize(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) {
    sorted.values(i) = eig.values(idx[i]);
    sorted.residuals(i) = eig.residuals(idx[i]);
  }
  return sorted;
}

json RunSpectrum(const Generator& gen, const std::string& dir, std::ostream& out) {
  const EigenList eig = SortedSpectrum(gen);
  WriteFile(dir + "/spectrum.csv", SpectrumCsv(eig));
  const double a = SpectralAbscissa(eig);
  out << "spectral abscissa: " << Fmt(a) << " (max residual " << Fmt(eig.max_residual())
      << ")\n";
  return {{"abscissa", a}, {"max_residual", eig.max_residual()}, {"size", gen.size()}};
}

json RunResolvent(const Generator& gen, const ResolventParams& p, const Flags& f,
                  const std::string& dir, std::ostream& out) {
  std::vector<double> betas;
  if (p.grid == "resonance") {
    betas = ResonanceBetas(EigAll(gen.op, {.residuals = false}), p.beta_lo, p.beta_hi);
  } else {
    for (int i = 0; i < p.points; ++i) {
      betas.push_back(p.beta_lo * std::pow(p.beta_hi / p.beta_lo, i / (p.points - 1.0)));
    }
  }
  ResolventOptions opt;
  opt.threads = ResolveThreads(f.threads);
  opt.seed = f.seed;
  ResolventScan scan = ScanResolvent(gen, betas, opt);
  FitResolventExponent(&scan, p.beta_lo, p.beta_hi,
                       p.fit == "all" ? FitMode::kAllPoints : FitMode::kEnvelope);
  WriteFile(dir + "/scan.csv", ScanCsv(scan));
  WriteFile(dir + "/scan.svg", LogLogSvg(scan.betas, scan.norms, "resolvent norm on iR",
                                         "beta", "|R(i beta)|_E"));
  out << "resolvent slope over [" << Fmt(p.beta_lo) << ", " << Fmt(p.beta_hi)
      << "]: " << Fmt(scan.fitted_exponent) << " (theta " << Fmt(scan.theta_implied) << ")\n";
  const int dropped = static_cast<int>(std::count(scan.dropped.begin(), scan.dropped.end(), true));
  return {{"fitted_exponent", scan.fitted_exponent},
          {"theta_implied", scan.theta_implied},
          {"window", {p.beta_lo, p.beta_hi}},
          {"fit", p.fit},
          {"fit_points", scan.fit_points},
          {"points", scan.betas.size()},
          {"dropped", dropped}};
}

json RunBranches(const Scenario& s, const std::string& dir, std::ostream& out) {
  const BranchParams& p = s.branches;
  std::vector<BranchRow> rows;
  json j;
  if (p.example == "5.1") {
    rows = BranchRootsViscous(p.k_lo, p.k_hi);
  } else if (p.example == "5.2") {
    rows = BranchRootsKelvinVoigt(p.k_lo, p.k_hi);
  } else if (p.example == "5.3") {
    rows = BranchRootsTip(p.k_lo, p.k_hi);
    const std::vector<BranchRow> other = BranchRootsTipOther(p.k_lo, p.k_hi);
    WriteFile(dir + "/branches_other.csv", BranchCsv(other));
    j["other_branch_re_last"] = other.back().beta.real();
  } else {
    for (const ModalPencil& m :
         ModalReduce(*s.model, p.k_lo, p.k_hi, ModeFrequencies::kContinuum)) {
      BranchRow r;
      r.index = m.k;
      r.nu = m.nu;
      r.beta = cdouble(-std::numeric_limits<double>::infinity(), 0);
      for (Eigen::Index i = 0; i < m.roots.size(); ++i) {
        if (m.roots(i).imag() > 0 && m.roots(i).real() > r.beta.real()) r.beta = m.roots(i);
      }
      r.pred = cdouble(std::nan(""), std::nan(""));
      r.rel_err = std::nan("");
      rows.push_back(r);
    }
  }
  WriteFile(dir + "/branches.csv", BranchCsv(rows));
  const std::vector<cdouble> betas = Betas(rows);
  if (betas.size() >= 8) {
    try {
      const double theta = OptimalityExponent(betas);
      j["theta"] = theta;
      out << "branch optimality exponent theta: " << Fmt(theta) << "\n";
    } catch (const std::invalid_argument& e) {
      j["theta"] = nullptr;
      out << "branch optimality exponent: not available (" << e.what() << ")\n";
    }
  }
  const BranchRow& last = rows.back();
  j["example"] = p.example;
  j["last_index"] = last.index;
  j["last_beta"] = {last.beta.real(), last.beta.imag()};
  out << "branch at index " << last.index << ": " << Fmt(last.beta.real()) << " + "
      << Fmt(last.beta.imag()) << "i\n";
  return j;
}

json RunDecay(const Scenario& s, const Generator& gen, const std::string& dir,
              std::ostream& out) {
  const int modes = std::min(s.decay.modes, gen.n);
  const State s0 = LowModeState(gen, s.model->pair.D(), modes);
  const DecayReport rep = DecayStudy(gen, s0, s.decay.dt, s.decay.T);
  WriteFile(dir + "/decay.csv", DecayCsv(rep));
  const json summary = DecaySummary(rep);
  WriteFile(dir + "/decay.json", summary.dump(2) + "\n");
  WriteFile(dir + "/decay.svg",
            LogLogSvg(rep.times, rep.energies, "energy decay", "t", "E(t)"));
  out << "decay window [" << Fmt(rep.t_lo) << ", " << Fmt(rep.t_hi) << "]: theta "
      << (std::isnan(rep.theta) ? std::string("n/a (exponential regime)") : Fmt(rep.theta))
      << " (predicted " << Fmt(s.model->damping.predicted_theta()) << ")\n";
  return summary;
}

int CmdRun(const std::string& ref, const Flags& f, std::ostream& out,
           const std::vector<std::string>& only) {
  Scenario s = LoadScenario(ref);
  if (!only.empty()) s.analyses = only;
  if (s.analyses.empty()) {
    out << "scenario " << s.name << ": no analyses requested\n";
    return 0;
  }
  for (const auto& a : s.analyses) {
    if ((a != "branches" || s.branches.example == "modal") && !s.model) {
      throw SchemaError("analysis '" + a + "' needs a model");
    }
  }
  const std::string dir = OutputDir(s, f);
  std::filesystem::create_directories(dir);
  json summary;
  summary["name"] = s.name;
  summary["seed"] = f.seed;
  std::optional<Generator> gen;
  auto generator = [&]() -> const Generator& {
    if (!gen) gen = AssembleGenerator(*s.model);
    return *gen;
  };
  for (const auto& a : s.analyses) {
    out << "[" << s.name << "] " << a << "\n";
    if (a == "kalman") {
      const json k = KalmanSummary(s.model->pair, s.coercivity_samples, f.seed);
      WriteFile(dir + "/kalman.json", k.dump(2) + "\n");
      PrintKalman(k, out);
      summary["kalman"] = k;
    } else if (a == "spectrum") {
      summary["spectrum"] = RunSpectrum(generator(), dir, out);
    } else if (a == "resolvent") {
      summary["resolvent"] = RunResolvent(generator(), s.resolvent, f, dir, out);
    } else if (a == "branches") {
      summary["branches"] = RunBranches(s, dir, out);
    } else if (a == "decay") {
      summary["decay"] = RunDecay(s, generator(), dir, out);
    } else {
      throw SchemaError("unknown analysis '" + a + "'");
    }
  }
  WriteFile(dir + "/summary.json", summary.dump(2) + "\n");
  out << "outputs written to " << dir << "\n";
  return 0;
}

}  // namespace

std::vector<VerifyCheck> VerifyExample(const std::string& id) {
  std::vector<VerifyCheck> checks;
  auto add = [&](std::string label, bool pass, std::string detail) {
    checks.push_back({std::move(label), pass, std::move(detail)});
  };
  if (id == "5.1" || id == "5.2") {
    const bool kv = id == "5.2";
    const std::vector<BranchRow> rows =
        kv ? BranchRootsKelvinVoigt(5, 50) : BranchRootsViscous(5, 50);
    const double power = kv ? 4.0 : 2.0;
    const double limit = -2.0 / 125.0;
    auto scaled = [&](const BranchRow& r) { return r.beta.real() * std::pow(r.nu, power); };
    const double last = scaled(rows.back());
    add(std::string("Re*nu^") + (kv ? "4" : "2") + " -> -0.016",
        std::abs(last - limit) <= 0.05 * std::abs(limit), "k=50: " + Fmt(last));
    if (!kv) {
      bool monotone = true;
      for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].index <= 10) continue;
        if (!(std::abs(scaled(rows[i]) - limit) < std::abs(scaled(rows[i - 1]) - limit))) {
          monotone = false;
        }
      }
      add("Re*nu^2 monotone toward -0.016 for k >= 10", monotone, "");
    }
    const double theta = OptimalityExponent(Betas(rows));
    const double target = kv ? 0.25 : 0.5;
    const double tol = kv ? 0.03 : 0.05;
    add("theta = " + Fmt(target) + " +- " + Fmt(tol), std::abs(theta - target) <= tol,
        "fitted " + Fmt(theta));
  } else if (id == "5.3") {
    const std::vector<BranchRow> rows = BranchRootsTip(3, 40);
    double worst_res = 0, worst_im = 0, max_re = -1e300;
    for (const auto& r : rows) {
      worst_res = std::max(worst_res, r.residual);
      max_re = std::max(max_re, r.beta.real());
      worst_im = std::max(worst_im, std::abs(r.beta.imag() - r.pred.imag()) * r.index);
    }
    add("|f(beta)| <= 1e-10 scale", worst_res <= 1e-10, "worst " + Fmt(worst_res));
    add("Re beta < 0", max_re < 0, "max " + Fmt(max_re));
    add("|Im beta - (n pi + pi/2 + 1/(8 n pi))| <= 1e-3/n", worst_im <= 1e-3,
        "worst n*|diff| " + Fmt(worst_im));
    const double limit = -9.0 / (64.0 * pi * pi);
    const double last = rows.back().beta.real() * 40.0 * 40.0;
    add("Re*n^2 -> -9/(64 pi^2)", std::abs(last - limit) <= 0.05 * std::abs(limit),
        "n=40: " + Fmt(last) + " vs " + Fmt(limit));
  } else {
    throw std::invalid_argument("unknown example id '" + id + "' (expected 5.1, 5.2 or 5.3)");
  }
  return checks;
}

int RunCli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"stabkit: Kalman-rank algebra, spectra and decay of weakly coupled damped systems"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--seed", flags.seed, "RNG seed for sampled checks")->capture_default_str();
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--threads", flags.threads, "worker threads (default STABKIT_THREADS or all)");

  std::string scenario_ref;
  auto* run = app.add_subcommand("run", "run every analysis in a scenario file");
  run->add_option("scenario", scenario_ref, "scenario file or bundled name")->required();

  std::string a_path, d_path;
  int samples = 1000;
  auto* kal = app.add_subcommand("kalman", "Kalman diagnostics for a pair (A, D)");
  kal->add_option("--A", a_path, "JSON matrix file")->required();
  kal->add_option("--D", d_path, "JSON matrix file")->required();
  kal->add_option("--samples", samples, "coercivity samples")->capture_default_str();

  auto* spec = app.add_subcommand("spectrum", "generator spectrum of a scenario model");
  spec->add_option("scenario", scenario_ref)->required();
  auto* res = app.add_subcommand("resolvent", "resolvent scan of a scenario model");
  res->add_option("scenario", scenario_ref)->required();
  auto* dec = app.add_subcommand("decay", "energy decay simulation of a scenario model");
  dec->add_option("scenario", scenario_ref)->required();

  std::string example_id;
  auto* ver = app.add_subcommand("verify-example", "check branch asymptotics (5.1, 5.2, 5.3)");
  ver->add_option("id", example_id)->required();

  for (auto* sub : {run, kal, spec, res, dec, ver}) {
    sub->add_option("--seed", flags.seed);
    sub->add_option("--out", flags.out);
    sub->add_option("--threads", flags.threads);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return CmdRun(scenario_ref, flags, out, {});
    if (*spec) return CmdRun(scenario_ref, flags, out, {"spectrum"});
    if (*res) return CmdRun(scenario_ref, flags, out, {"resolvent"});
    if (*dec) return CmdRun(scenario_ref, flags, out, {"decay"});
    if (*kal) {
      const CouplingPair pair(LoadMatrixFile(a_path), LoadMatrixFile(d_path));
      const json k = KalmanSummary(pair, samples, flags.seed);
      PrintKalman(k, out);
      if (!flags.out.empty()) WriteFile(flags.out + "/kalman.json", k.dump(2) + "\n");
      return 0;
    }
    if (*ver) {
      bool ok = true;
      for (const auto& c : VerifyExample(example_id)) {
        out << c.label << ": " << (c.pass ? "PASS" : "FAIL");
        if (!c.detail.empty()) out << " (" << c.detail << ")";
        out << "\n";
        ok = ok && c.pass;
      }
      return ok ? 0 : 1;
    }
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace stabkit
