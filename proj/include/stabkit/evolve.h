#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stabkit/discretize.h"

namespace stabkit {

struct State {
  Eigen::VectorXd U;
  Eigen::VectorXd V;
  double t = 0.0;

  Eigen::VectorXd W() const;
  static State FromW(const Eigen::VectorXd& W, double t);
};

/// Implicit midpoint rule (I - dt/2 op) W+ = (I + dt/2 op) W with the LU of
/// the left side computed once. dt may be negative (time reversal).
class MidpointStepper {
 public:
  MidpointStepper(const Generator& gen, double dt);

  Eigen::VectorXd Step(const Eigen::VectorXd& W) const;
  State Step(const State& s) const;
  double dt() const { return dt_; }

  /// Relative defect of E+ - E = -2 dt V_mid^T S V_mid for one step.
  double DissipationResidual(const Eigen::VectorXd& W,
                             const Eigen::VectorXd& Wp) const;

 private:
  const Generator& gen_;
  double dt_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// One step with a fresh factorization.
State StepCN(const Generator& gen, const State& s, double dt);

/// |W|_E + |op W|_E, the graph norm of the domain of the generator.
double GraphNorm(const Generator& gen, const Eigen::VectorXd& W);

inline constexpr double kMaxStepsPerRun = 1e7;

struct DecayReport {
  std::vector<double> times;
  std::vector<double> energies;   // squared energy norm
  std::vector<double> residuals;  // max dissipation defect since the last sample
  double graph_norm0 = 0.0;
  double theta = 0.0;  // NaN when no polynomial regime was found
  double t_lo = 0.0;
  double t_hi = 0.0;
  double abscissa = 0.0;
  bool exponential_regime = false;
};

/// Integrates to T, sampling the energy at times growing by `ratio`. Throws
/// std::invalid_argument past T/dt > 1e7.
DecayReport Simulate(const Generator& gen, const State& s0, double dt, double T,
                     double ratio = 1.2);

struct DecayFit {
  double theta = 0.0;  // NaN when exponential
  bool exponential = false;
  double kappa = 0.0;  // log-log growth rate of the local slope magnitude
  int samples = 0;
};

/// Least-squares slope s of log E against log t over [t_lo, t_hi] and
/// theta = -s/2. The window is flagged exponential when the local slope
/// magnitude grows monotonically with kappa >= 0.5. Throws
/// std::invalid_argument for fewer than 8 samples.
DecayFit FitDecayExponent(const std::vector<double>& times,
                          const std::vector<double>& energies, double t_lo,
                          double t_hi);

/// Fit window for a truncated system whose late-time decay is exponential.
/// The initial state is expanded in eigenvectors of op with energy weights
/// w_j; modes with w_j >= 1e-12 max w are the support.
///   t_lo = max(10 * 2 pi / |Im lambda_dom|, 1 / |Re lambda_dom|)
///   t_hi = 0.2 / |max Re over the support|
/// where lambda_dom carries the largest weight.
struct DecayWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double abscissa = 0.0;          // whole spectrum
  double support_abscissa = 0.0;  // over the support of the initial state
};
DecayWindow CalibrateWindow(const Generator& gen, const State& s0);

/// Calibrates the window, integrates to T (1.05 t_hi when T <= 0) and fits
/// theta on the window. A window holding fewer than 8 samples is reported as
/// the exponential regime with theta NaN. Throws NumericalError when the
/// initial state has no decaying support.
DecayReport DecayStudy(const Generator& gen, const State& s0, double dt,
                       double T);

/// U0 = sum_{k<=K} nu_k^{-5/2} q ⊗ phi_k, V0 = 0, scaled to unit graph norm.
/// (nu_k^2, phi_k) are the lowest eigenpairs of L and q spans the eigenvector
/// of D with the smallest eigenvalue. The weights put equal graph norm in
/// every frequency octave.
State LowModeState(const Generator& gen, const Eigen::MatrixXd& D, int K);

}  // namespace stabkit
