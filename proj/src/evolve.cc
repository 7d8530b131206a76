#include "stabkit/evolve.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "stabkit/errors.h"
#include "stabkit/linalg_util.h"
#include "stabkit/spectra.h"

namespace stabkit {

Eigen::VectorXd State::W() const {
  Eigen::VectorXd w(U.size() + V.size());
  w << U, V;
  return w;
}

State State::FromW(const Eigen::VectorXd& W, double t) {
  const Eigen::Index m = W.size() / 2;
  return State{W.head(m), W.tail(m), t};
}

MidpointStepper::MidpointStepper(const Generator& gen, double dt)
    : gen_(gen), dt_(dt) {
  if (!(std::isfinite(dt) && dt != 0.0)) {
    throw std::invalid_argument("MidpointStepper: dt must be finite and nonzero");
  }
  Eigen::MatrixXd M = -0.5 * dt * gen.op;
  M.diagonal().array() += 1.0;
  lu_.compute(M);
  if (!(lu_.rcond() > 1e-14)) {
    throw NumericalError("MidpointStepper: I - dt/2 op is singular");
  }
}

Eigen::VectorXd MidpointStepper::Step(const Eigen::VectorXd& W) const {
  return lu_.solve(W + 0.5 * dt_ * (gen_.op * W));
}

State MidpointStepper::Step(const State& s) const {
  return State::FromW(Step(s.W()), s.t + dt_);
}

double MidpointStepper::DissipationResidual(const Eigen::VectorXd& W,
                                            const Eigen::VectorXd& Wp) const {
  const int m = gen_.half();
  const double e0 = gen_.EnergyNormSq(W);
  const double e1 = gen_.EnergyNormSq(Wp);
  const Eigen::VectorXd Vmid = 0.5 * (W.tail(m) + Wp.tail(m));
  const double dissipated = 2.0 * dt_ * Vmid.dot(gen_.S * Vmid);
  const double ref = std::max({e0, e1, std::numeric_limits<double>::min()});
  return std::abs(e1 - e0 + dissipated) / ref;
}

State StepCN(const Generator& gen, const State& s, double dt) {
  return MidpointStepper(gen, dt).Step(s);
}

double GraphNorm(const Generator& gen, const Eigen::VectorXd& W) {
  return gen.EnergyNorm(W) + gen.EnergyNorm(gen.op * W);
}

DecayReport Simulate(const Generator& gen, const State& s0, double dt, double T,
                     double ratio) {
  if (!(dt > 0) || !(T >= 0)) throw std::invalid_argument("Simulate: need dt > 0, T >= 0");
  if (!(ratio > 1)) throw std::invalid_argument("Simulate: ratio must exceed 1");
  const double steps_f = std::ceil(T / dt - 1e-9);
  if (steps_f > kMaxStepsPerRun) {
    throw std::invalid_argument("Simulate: T/dt exceeds the 1e7 step guard");
  }
  const long steps = static_cast<long>(steps_f);
  MidpointStepper stepper(gen, dt);
  DecayReport rep;
  Eigen::VectorXd W = s0.W();
  rep.graph_norm0 = GraphNorm(gen, W);
  rep.times.push_back(s0.t);
  rep.energies.push_back(gen.EnergyNormSq(W));
  rep.residuals.push_back(0.0);
  double next_sample = s0.t + dt;
  double worst = 0.0;
  for (long i = 1; i <= steps; ++i) {
    const Eigen::VectorXd Wp = stepper.Step(W);
    worst = std::max(worst, stepper.DissipationResidual(W, Wp));
    W = Wp;
    const double t = s0.t + i * dt;
    if (t >= next_sample * (1 - 1e-12) || i == steps) {
      rep.times.push_back(t);
      rep.energies.push_back(gen.EnergyNormSq(W));
      rep.residuals.push_back(worst);
      worst = 0.0;
      next_sample = std::max(t * ratio, t + dt);
    }
  }
  rep.theta = std::numeric_limits<double>::quiet_NaN();
  return rep;
}

DecayFit FitDecayExponent(const std::vector<double>& times,
                          const std::vector<double>& energies, double t_lo,
                          double t_hi) {
  if (times.size() != energies.size()) {
    throw std::invalid_argument("FitDecayExponent: length mismatch");
  }
  std::vector<double> x, y;
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi || times[i] <= 0) continue;
    if (!(energies[i] > 0)) {
      throw std::invalid_argument("FitDecayExponent: energies must be positive");
    }
    x.push_back(std::log(times[i]));
    y.push_back(std::log(energies[i]));
  }
  if (x.size() < 8) {
    throw std::invalid_argument("FitDecayExponent: fewer than 8 samples in window");
  }
  DecayFit fit;
  fit.samples = static_cast<int>(x.size());
  const Eigen::Map<Eigen::VectorXd> X(x.data(), x.size()), Y(y.data(), y.size());
  // Local slopes between consecutive samples, placed at the log midpoint.
  std::vector<double> lx, ls;
  bool monotone = true;
  for (size_t i = 1; i < x.size(); ++i) {
    const double s = std::abs((y[i] - y[i - 1]) / (x[i] - x[i - 1]));
    if (!ls.empty() && !(s > ls.back())) monotone = false;
    ls.push_back(s);
    lx.push_back(0.5 * (x[i] + x[i - 1]));
  }
  bool positive = std::all_of(ls.begin(), ls.end(), [](double s) { return s > 0; });
  if (positive && ls.size() >= 2) {
    Eigen::VectorXd a(ls.size()), b(ls.size());
    for (size_t i = 0; i < ls.size(); ++i) {
      a(i) = lx[i];
      b(i) = std::log(ls[i]);
    }
    fit.kappa = FitLine(a, b).slope;
  }
  fit.exponential = monotone && positive && fit.kappa >= 0.5;
  fit.theta = fit.exponential ? std::numeric_limits<double>::quiet_NaN()
                              : -0.5 * FitLine(X, Y).slope;
  return fit;
}

DecayWindow CalibrateWindow(const Generator& gen, const State& s0) {
  const EigenList eig = EigAll(gen.op, {.residuals = false, .vectors = true});
  const Eigen::VectorXcd c =
      eig.vectors.partialPivLu().solve(s0.W().cast<cdouble>());
  const int m = gen.half();
  const Eigen::Index dim = eig.values.size();
  Eigen::VectorXd w(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const auto v = eig.vectors.col(j);
    const double e = std::real(v.head(m).dot(gen.K * v.head(m))) +
                     v.tail(m).squaredNorm();
    w(j) = std::norm(c(j)) * e;
  }
  Eigen::Index dom = 0;
  const double wmax = w.maxCoeff(&dom);
  if (!(wmax > 0)) throw std::invalid_argument("CalibrateWindow: zero initial state");
  DecayWindow win;
  win.abscissa = eig.values.real().maxCoeff();
  win.support_abscissa = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (w(j) >= 1e-12 * wmax) {
      win.support_abscissa = std::max(win.support_abscissa, eig.values(j).real());
    }
  }
  const cdouble ld = eig.values(dom);
  const double period = ld.imag() != 0.0
                            ? 2 * std::numbers::pi / std::abs(ld.imag())
                            : 0.0;
  win.t_lo = std::max(10 * period, ld.real() < 0 ? 1.0 / std::abs(ld.real()) : 0.0);
  win.t_hi = win.support_abscissa < 0
                 ? 0.2 / std::abs(win.support_abscissa)
                 : std::numeric_limits<double>::infinity();
  return win;
}

DecayReport DecayStudy(const Generator& gen, const State& s0, double dt,
                       double T) {
  const DecayWindow win = CalibrateWindow(gen, s0);
  if (!std::isfinite(win.t_hi)) {
    throw NumericalError("DecayStudy: initial state excites a non-decaying mode");
  }
  if (T <= 0) T = 1.05 * win.t_hi;
  DecayReport rep = Simulate(gen, s0, dt, T);
  rep.t_lo = win.t_lo;
  rep.t_hi = std::min(win.t_hi, T);
  rep.abscissa = win.abscissa;
  // A calibrated window too short to hold a fit means the slowest excited
  // mode takes over before any polynomial transient: exponential regime.
  const auto in_window = std::count_if(rep.times.begin(), rep.times.end(), [&](double t) {
    return t > 0 && t >= rep.t_lo && t <= rep.t_hi;
  });
  if (in_window < 8) {
    rep.theta = std::numeric_limits<double>::quiet_NaN();
    rep.exponential_regime = true;
    return rep;
  }
  const DecayFit fit = FitDecayExponent(rep.times, rep.energies, rep.t_lo, rep.t_hi);
  rep.theta = fit.theta;
  rep.exponential_regime = fit.exponential;
  return rep;
}

State LowModeState(const Generator& gen, const Eigen::MatrixXd& D, int K) {
  if (K < 1 || K > gen.n) throw std::invalid_argument("LowModeState: need 1 <= K <= n");
  if (D.rows() != gen.N) throw std::invalid_argument("LowModeState: D size mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> el(gen.L);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ed(D);
  if (el.info() != Eigen::Success || ed.info() != Eigen::Success) {
    throw NumericalError("LowModeState: symmetric eigensolver failed");
  }
  Eigen::MatrixXd phi = el.eigenvectors().leftCols(K);
  NormalizeColumnSigns(&phi);
  Eigen::MatrixXd q = ed.eigenvectors().col(0);
  NormalizeColumnSigns(&q);
  Eigen::VectorXd U = Eigen::VectorXd::Zero(gen.half());
  for (int k = 0; k < K; ++k) {
    const double nu = std::sqrt(el.eigenvalues()(k));
    U += std::pow(nu, -2.5) * Kron(q, phi.col(k));
  }
  State s{U, Eigen::VectorXd::Zero(gen.half()), 0.0};
  const double g = GraphNorm(gen, s.W());
  s.U /= g;
  return s;
}

}  // namespace stabkit
