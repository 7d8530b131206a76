#include "stabkit/spectra.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "stabkit/errors.h"
#include "stabkit/linalg_util.h"
#include "stabkit/parallel.h"

namespace stabkit {
namespace {

constexpr double kRadix = 2.0;
constexpr int kMaxEigSize = 4000;

}  // namespace

double EigenList::max_residual() const {
  return residuals.size() == 0 ? 0.0 : residuals.maxCoeff();
}

Eigen::VectorXd Balance(Eigen::MatrixXd* M) {
  Eigen::MatrixXd& B = *M;
  const Eigen::Index n = B.rows();
  Eigen::VectorXd t = Eigen::VectorXd::Ones(n);
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = B.col(i).cwiseAbs().sum() - std::abs(B(i, i));
      double r = B.row(i).cwiseAbs().sum() - std::abs(B(i, i));
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      while (c < r / kRadix) {
        f *= kRadix;
        c *= kRadix * kRadix;
      }
      while (c > r * kRadix) {
        f /= kRadix;
        c /= kRadix * kRadix;
      }
      // c now holds f^2 times the column norm, so (c + r) / f is the
      // scaled row-plus-column norm.
      if ((c + r) / f < 0.95 * s) {
        done = false;
        t(i) *= f;
        B.row(i) /= f;
        B.col(i) *= f;
      }
    }
  }
  return t;
}

EigenList EigAll(const Eigen::MatrixXd& M, EigOptions options) {
  if (M.rows() != M.cols()) throw std::invalid_argument("EigAll: M not square");
  if (M.rows() > kMaxEigSize) {
    throw NumericalError("EigAll: size " + std::to_string(M.rows()) +
                         " exceeds " + std::to_string(kMaxEigSize));
  }
  if (!M.allFinite()) throw std::invalid_argument("EigAll: non-finite entry");
  EigenList out;
  if (M.rows() == 0) return out;
  Eigen::MatrixXd B = M;
  const Eigen::VectorXd t = Balance(&B);
  const bool need_vectors = options.vectors || options.residuals;
  Eigen::EigenSolver<Eigen::MatrixXd> es(B, need_vectors);
  if (es.info() != Eigen::Success) {
    throw NumericalError("EigAll: shifted QR did not converge (n = " +
                         std::to_string(M.rows()) + ")");
  }
  out.values = es.eigenvalues();
  if (!need_vectors) return out;
  Eigen::MatrixXcd V = t.cast<cdouble>().asDiagonal() * es.eigenvectors();
  for (Eigen::Index j = 0; j < V.cols(); ++j) V.col(j).normalize();
  if (options.residuals) {
    const double mnorm = std::max(M.norm(), std::numeric_limits<double>::min());
    const Eigen::MatrixXcd R =
        M.cast<cdouble>() * V - V * out.values.asDiagonal();
    out.residuals = R.colwise().norm().transpose() / mnorm;
  }
  if (options.vectors) out.vectors = std::move(V);
  return out;
}

double SpectralAbscissa(const EigenList& eig) {
  if (eig.values.size() == 0) throw std::invalid_argument("SpectralAbscissa: empty");
  return eig.values.real().maxCoeff();
}

double SpectralAbscissa(const Generator& gen) {
  return SpectralAbscissa(EigAll(gen.op, {.residuals = false}));
}

namespace {

// Applies Y = R X^{-1} R^{-1} and its adjoint, where X = i beta - op and
// E = R^T R = blockdiag(RK^T RK, I).
class ResolventOperator {
 public:
  ResolventOperator(const Generator& gen, double beta)
      : gen_(gen), beta_(beta), m_(gen.half()) {
    const cdouble ib(0.0, beta);
    Eigen::MatrixXcd Z = gen.K.cast<cdouble>() + ib * gen.S.cast<cdouble>();
    Z.diagonal().array() -= beta * beta;
    lu_.compute(Z);
    singular_ = !(lu_.rcond() > 1e-14);
  }

  bool singular() const { return singular_; }

  Eigen::MatrixXcd Apply(const Eigen::MatrixXcd& Y) const {
    const cdouble ib(0.0, beta_);
    const Eigen::MatrixXcd F =
        gen_.RK.cast<cdouble>().triangularView<Eigen::Upper>().solve(Y.topRows(m_));
    const Eigen::MatrixXcd G = Y.bottomRows(m_);
    const Eigen::MatrixXcd SF = gen_.S * F;
    const Eigen::MatrixXcd U = lu_.solve(G + ib * F + SF);
    Eigen::MatrixXcd out(2 * m_, Y.cols());
    out.topRows(m_) = gen_.RK * U;
    out.bottomRows(m_) = ib * U - F;
    return out;
  }

  Eigen::MatrixXcd ApplyAdjoint(const Eigen::MatrixXcd& Y) const {
    const cdouble ib(0.0, beta_);
    const Eigen::MatrixXcd F = gen_.RK.transpose() * Y.topRows(m_);
    const Eigen::MatrixXcd G = Y.bottomRows(m_);
    // conj(Z) V = F - i beta G, solved through Z conj(V) = conj(rhs).
    const Eigen::MatrixXcd V = lu_.solve((F - ib * G).conjugate()).conjugate();
    const Eigen::MatrixXcd U = gen_.S * V - ib * V - G;
    Eigen::MatrixXcd out(2 * m_, Y.cols());
    out.topRows(m_) = gen_.RK.transpose().cast<cdouble>()
                          .triangularView<Eigen::Lower>()
                          .solve(U);
    out.bottomRows(m_) = V;
    return out;
  }

 private:
  const Generator& gen_;
  double beta_;
  int m_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  bool singular_ = false;
};

Eigen::MatrixXcd Orthonormalize(const Eigen::MatrixXcd& X) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(X);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(X.rows(), X.cols());
}

double LargestSingularValue(const ResolventOperator& op, int dim,
                            const ResolventOptions& o, std::uint64_t seed) {
  const int b = std::max(1, std::min(o.block, dim));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd Q(dim, b);
  for (int j = 0; j < b; ++j) {
    for (int i = 0; i < dim; ++i) Q(i, j) = cdouble(g(rng), g(rng));
  }
  Q = Orthonormalize(Q);
  double prev = 0.0;
  for (int it = 0; it < o.max_iter; ++it) {
    const Eigen::MatrixXcd YQ = op.Apply(Q);
    // Rayleigh–Ritz on span(Q): the top singular value of YQ is a lower
    // bound that increases monotonically to sigma_max.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(YQ, Eigen::ComputeThinV);
    const double s = svd.singularValues()(0);
    if (!std::isfinite(s)) return std::numeric_limits<double>::quiet_NaN();
    if (it > 0 && std::abs(s - prev) <= o.tol * s) return s;
    prev = s;
    Q = Orthonormalize(op.ApplyAdjoint(YQ * svd.matrixV()));
  }
  return prev;
}

}  // namespace

double ResolventNorm(const Generator& gen, double beta,
                     const ResolventOptions& options) {
  ResolventOperator op(gen, beta);
  if (op.singular()) return std::numeric_limits<double>::quiet_NaN();
  const std::uint64_t seed =
      options.seed ^ std::hash<double>{}(beta) * 0x9e3779b97f4a7c15ULL;
  return LargestSingularValue(op, gen.size(), options, seed);
}

std::vector<double> ResonanceBetas(const EigenList& eig, double lo, double hi) {
  std::vector<double> out;
  for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
    const double im = eig.values(j).imag();
    if (im > 0 && im >= lo && im <= hi) out.push_back(im);
  }
  std::sort(out.begin(), out.end());
  std::vector<double> dedup;
  for (double b : out) {
    if (dedup.empty() || b - dedup.back() > 1e-9 * std::max(1.0, b)) {
      dedup.push_back(b);
    }
  }
  return dedup;
}

ResolventScan ScanResolvent(const Generator& gen, std::vector<double> betas,
                            const ResolventOptions& options) {
  std::sort(betas.begin(), betas.end());
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
  ResolventScan scan;
  scan.betas = betas;
  scan.norms.assign(betas.size(), std::numeric_limits<double>::quiet_NaN());
  scan.dropped.assign(betas.size(), false);
  ParallelFor(static_cast<int>(betas.size()), options.threads, [&](int i) {
    double v = ResolventNorm(gen, betas[i], options);
    if (std::isnan(v)) {
      // Record the frequency actually evaluated; the nudge is far below any
      // grid spacing in use, so the ordering survives.
      scan.betas[i] = betas[i] + 1e-6;
      v = ResolventNorm(gen, scan.betas[i], options);
    }
    scan.norms[i] = v;
  });
  for (size_t i = 0; i < betas.size(); ++i) {
    scan.dropped[i] = std::isnan(scan.norms[i]);
  }
  return scan;
}

void FitResolventExponent(ResolventScan* scan, double lo, double hi,
                          FitMode mode) {
  if (!(lo > 0 && hi > lo)) {
    throw std::invalid_argument("FitResolventExponent: need 0 < lo < hi");
  }
  std::vector<double> x, y;
  if (mode == FitMode::kAllPoints) {
    for (size_t i = 0; i < scan->betas.size(); ++i) {
      const double b = scan->betas[i];
      if (scan->dropped[i] || b < lo || b > hi) continue;
      x.push_back(std::log(b));
      y.push_back(std::log(scan->norms[i]));
    }
  } else {
    constexpr int kBins = 12;
    const double width = std::log(hi / lo) / kBins;
    std::vector<int> best(kBins, -1);
    for (size_t i = 0; i < scan->betas.size(); ++i) {
      const double b = scan->betas[i];
      if (scan->dropped[i] || b < lo || b > hi) continue;
      const int bin = std::min(kBins - 1, static_cast<int>(std::log(b / lo) / width));
      if (best[bin] < 0 || scan->norms[i] > scan->norms[best[bin]]) best[bin] = i;
    }
    for (int i : best) {
      if (i < 0) continue;
      x.push_back(std::log(scan->betas[i]));
      y.push_back(std::log(scan->norms[i]));
    }
  }
  if (x.size() < 3) {
    throw std::invalid_argument("FitResolventExponent: fewer than 3 points in window");
  }
  const LineFit fit = FitLine(Eigen::Map<Eigen::VectorXd>(x.data(), x.size()),
                              Eigen::Map<Eigen::VectorXd>(y.data(), y.size()));
  scan->fit_lo = lo;
  scan->fit_hi = hi;
  scan->fit_mode = mode;
  scan->fit_points = static_cast<int>(x.size());
  scan->fitted_exponent = fit.slope;
  scan->theta_implied = 1.0 / fit.slope;
}

Eigen::VectorXcd QuadraticPencilRoots(const Eigen::MatrixXd& K,
                                      const Eigen::MatrixXd& C) {
  const Eigen::Index n = K.rows();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  Q.topRightCorner(n, n).setIdentity();
  Q.bottomLeftCorner(n, n) = -K;
  Q.bottomRightCorner(n, n) = -C;
  return EigAll(Q, {.residuals = false}).values;
}

std::vector<ModalPencil> ModalReduce(const ModelSpec& model, int k_lo, int k_hi,
                                     ModeFrequencies freq) {
  model.Validate();
  if (model.stiffness.variant != StiffnessVariant::kWaveDirichlet) {
    throw std::invalid_argument("ModalReduce: needs wave_dirichlet stiffness");
  }
  if (!model.damping.is_uniform()) {
    throw std::invalid_argument("ModalReduce: damping must be spatially uniform");
  }
  if (k_lo < 1 || k_hi < k_lo) throw std::invalid_argument("ModalReduce: bad k range");
  if (freq == ModeFrequencies::kDiscrete && k_hi > model.n()) {
    throw std::invalid_argument("ModalReduce: discrete modes need k <= n");
  }
  const int N = model.N();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  std::vector<ModalPencil> out;
  for (int k = k_lo; k <= k_hi; ++k) {
    ModalPencil p;
    p.k = k;
    p.nu = freq == ModeFrequencies::kContinuum
               ? k * std::numbers::pi
               : 2.0 / model.grid.h * std::sin(k * std::numbers::pi * model.grid.h / 2);
    const double nu2 = p.nu * p.nu;
    const double mu =
        model.damping.variant == DampingVariant::kKelvinVoigt ? nu2 : 1.0;
    p.K = (nu2 + model.stiffness.shift) * I + model.pair.A();
    p.C = mu * model.pair.D();
    p.roots = QuadraticPencilRoots(p.K, p.C);
    out.push_back(std::move(p));
  }
  return out;
}

double OptimalityExponent(const std::vector<cdouble>& branch) {
  if (branch.size() < 8) {
    throw std::invalid_argument("OptimalityExponent: needs at least 8 points");
  }
  Eigen::VectorXd x(branch.size()), y(branch.size());
  for (size_t i = 0; i < branch.size(); ++i) {
    const double re = branch[i].real();
    const double im = std::abs(branch[i].imag());
    if (!(re < 0)) throw std::invalid_argument("OptimalityExponent: Re beta must be < 0");
    if (i > 0 && !(im > std::abs(branch[i - 1].imag()))) {
      throw std::invalid_argument("OptimalityExponent: |Im beta| not increasing");
    }
    x(i) = std::log(im);
    y(i) = std::log(-re);
  }
  return -1.0 / FitLine(x, y).slope;
}

}  // namespace stabkit
