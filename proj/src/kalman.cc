#include "stabkit/kalman.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "stabkit/linalg_util.h"

namespace stabkit {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double Symmetrize(Eigen::MatrixXd* M) {
  const double defect = ((*M) - M->transpose()).cwiseAbs().maxCoeff() / 2;
  *M = ((*M) + M->transpose()).eval() / 2;
  return defect;
}

void CheckPsd(const Eigen::MatrixXd& M, const char* name) {
  if (M.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error(std::string("CouplingPair: eigensolver failed on ") +
                             name);
  }
  const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
  if (es.eigenvalues()(0) < -1e-10 * norm) {
    throw std::invalid_argument(std::string("CouplingPair: ") + name +
                                " is not positive semi-definite");
  }
}

}  // namespace

CouplingPair::CouplingPair(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D)
    : A_(A), D_(D) {
  if (A.rows() != A.cols() || D.rows() != D.cols() || A.rows() != D.rows()) {
    throw std::invalid_argument("CouplingPair: A and D must be square, same size");
  }
  if (A.rows() < 1) throw std::invalid_argument("CouplingPair: N must be >= 1");
  if (!A.allFinite() || !D.allFinite()) {
    throw std::invalid_argument("CouplingPair: non-finite entry");
  }
  asymmetry_defect_ = std::max(Symmetrize(&A_), Symmetrize(&D_));
  CheckPsd(A_, "A");
  CheckPsd(D_, "D");
}

bool BlockPartition::all_independent() const {
  return std::all_of(independence.begin(), independence.end(),
                     [](bool b) { return b; });
}

int BlockPartition::size() const {
  return blocks.empty() ? 0 : static_cast<int>(blocks.front().rows());
}

double DefaultGroupTolerance(const Eigen::MatrixXd& A) {
  return 1e-8 * SpectralNorm(A);
}

int NumericalRank(const Eigen::MatrixXd& M, double factor, double scale) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  const double ref = scale >= 0 ? scale : s(0);
  const double tol = factor * kEps * ref;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) ++rank;
  }
  return rank;
}

Eigen::MatrixXd ControllabilityMatrix(const CouplingPair& pair) {
  const int n = pair.size();
  Eigen::MatrixXd C(n, n * n);
  C.leftCols(n) = pair.D();
  for (int i = 1; i < n; ++i) {
    C.middleCols(i * n, n) = pair.A() * C.middleCols((i - 1) * n, n);
  }
  return C;
}

int KalmanRank(const CouplingPair& pair) {
  // The column space of (D, AD, ...) is unchanged by rescaling A and D, and
  // unit norms keep the powers A^k comparable in size.
  const double a = SpectralNorm(pair.A());
  const double d = SpectralNorm(pair.D());
  if (d == 0.0) return 0;
  const Eigen::MatrixXd A = a > 0 ? Eigen::MatrixXd(pair.A() / a) : pair.A();
  const Eigen::MatrixXd D = pair.D() / d;
  const int n = pair.size();
  Eigen::MatrixXd C(n, n * n);
  C.leftCols(n) = D;
  for (int i = 1; i < n; ++i) {
    C.middleCols(i * n, n) = A * C.middleCols((i - 1) * n, n);
  }
  return NumericalRank(C, n);
}

EigenGroups EigGroup(const Eigen::MatrixXd& A, double group_tol) {
  if (A.rows() != A.cols()) throw std::invalid_argument("EigGroup: A not square");
  if (group_tol < 0) throw std::invalid_argument("EigGroup: negative tolerance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("EigGroup: symmetric eigensolver did not converge");
  }
  EigenGroups g;
  g.P = es.eigenvectors();
  NormalizeColumnSigns(&g.P);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const int n = static_cast<int>(ev.size());
  g.offsets.push_back(0);
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || std::abs(ev(i) - ev(i - 1)) > group_tol) {
      g.lambdas.push_back(ev.segment(start, i - start).mean());
      g.sigmas.push_back(i - start);
      g.offsets.push_back(i);
      start = i;
    }
  }
  return g;
}

// Rank of D restricted to an eigenspace. Forming D (often as a product) and
// then D P_l each leave O(N eps ||D||) noise in exact kernel directions, so
// the cut sits a decade above N eps ||D||. Shared by the invariant-subspace
// count and the block independence flags so the two always agree.
namespace {
int RestrictedRank(const Eigen::MatrixXd& DP, int n, double scale) {
  return scale > 0 ? NumericalRank(DP, 10.0 * n, scale) : 0;
}
}  // namespace

int MaxInvariantDim(const CouplingPair& pair, double group_tol) {
  // A symmetric: every invariant subspace is spanned by eigenvectors, so the
  // largest one inside Ker(D) is the sum over eigenspaces E_l of E_l ∩ Ker(D).
  const EigenGroups g = EigGroup(pair.A(), group_tol);
  const double scale = SpectralNorm(pair.D());
  int p = 0;
  for (int l = 0; l < g.num_groups(); ++l) {
    const int r = RestrictedRank(pair.D() * g.basis(l), pair.size(), scale);
    p += g.sigmas[l] - r;
  }
  return p;
}

int MaxInvariantDim(const CouplingPair& pair) {
  return MaxInvariantDim(pair, DefaultGroupTolerance(pair.A()));
}

BlockPartition MakeBlockPartition(const CouplingPair& pair,
                                  const EigenGroups& groups) {
  if (groups.size() != pair.size()) {
    throw std::invalid_argument("MakeBlockPartition: size mismatch");
  }
  const Eigen::MatrixXd Dt = groups.P.transpose() * pair.D() * groups.P;
  const double scale = SpectralNorm(pair.D());
  BlockPartition bp;
  for (int l = 0; l < groups.num_groups(); ++l) {
    Eigen::MatrixXd Dl = Dt.middleCols(groups.offsets[l], groups.sigmas[l]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Dl.transpose() * Dl);
    const int r = RestrictedRank(Dl, pair.size(), scale);
    bp.independence.push_back(r == groups.sigmas[l]);
    bp.gram_min.push_back(std::max(0.0, es.eigenvalues()(0)));
    bp.gram_argmin.push_back(es.eigenvectors().col(0));
    bp.blocks.push_back(std::move(Dl));
  }
  return bp;
}

double CoercivityConstant(const BlockPartition& partition) {
  if (!partition.all_independent()) {
    throw std::domain_error(
        "CoercivityConstant: a block of D is column-dependent (Kalman fails)");
  }
  return *std::min_element(partition.gram_min.begin(), partition.gram_min.end());
}

namespace {

double CoercivitySlack(const BlockPartition& bp, double c,
                       const Eigen::VectorXd& U) {
  const int m = static_cast<int>(bp.blocks.size());
  std::vector<Eigen::VectorXd> parts;
  Eigen::VectorXd DU = Eigen::VectorXd::Zero(bp.size());
  int off = 0;
  for (int l = 0; l < m; ++l) {
    const int s = static_cast<int>(bp.blocks[l].cols());
    parts.push_back(bp.blocks[l] * U.segment(off, s));
    DU += parts.back();
    off += s;
  }
  double cross = 0.0;
  for (int l = 0; l < m; ++l) {
    for (int k = 0; k < m; ++k) {
      if (k != l) cross += parts[l].dot(parts[k]);
    }
  }
  return DU.squaredNorm() - cross - c * U.squaredNorm();
}

}  // namespace

CoercivityCheck VerifyCoercivity(const BlockPartition& partition, double c,
                                 int samples, std::uint64_t seed) {
  const int n = partition.size();
  CoercivityCheck out;
  out.worst_slack = std::numeric_limits<double>::infinity();
  int off = 0;
  for (size_t l = 0; l < partition.blocks.size(); ++l) {
    Eigen::VectorXd U = Eigen::VectorXd::Zero(n);
    const auto& v = partition.gram_argmin[l];
    U.segment(off, v.size()) = v;
    off += static_cast<int>(v.size());
    out.worst_slack = std::min(out.worst_slack, CoercivitySlack(partition, c, U));
  }
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) {
    const Eigen::VectorXd U = RandomUnitVector(n, &rng);
    out.worst_slack = std::min(out.worst_slack, CoercivitySlack(partition, c, U));
  }
  out.pass = out.worst_slack >= -1e-12;
  return out;
}

CoercivityCheck VerifyCoercivity(const BlockPartition& partition, int samples,
                                 std::uint64_t seed) {
  return VerifyCoercivity(partition, CoercivityConstant(partition), samples,
                          seed);
}

CouplingPair ConstructMinRankD(const EigenGroups& groups) {
  const int n = groups.size();
  const int m = groups.num_groups();
  if (m == 0) throw std::invalid_argument("ConstructMinRankD: no groups");
  const int width = *std::max_element(groups.sigmas.begin(), groups.sigmas.end());
  // W in eigen-coordinates: the rows of group l are e_1 .. e_{sigma_l}.
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, width);
  for (int l = 0; l < m; ++l) {
    for (int j = 0; j < groups.sigmas[l]; ++j) W(groups.offsets[l] + j, j) = 1.0;
  }
  Eigen::VectorXd diag(n);
  for (int l = 0; l < m; ++l) {
    diag.segment(groups.offsets[l], groups.sigmas[l]).setConstant(groups.lambdas[l]);
  }
  const Eigen::MatrixXd A = groups.P * diag.asDiagonal() * groups.P.transpose();
  const Eigen::MatrixXd D = groups.P * W * W.transpose() * groups.P.transpose();
  CouplingPair pair(A, D);
  if (KalmanRank(pair) != n) {
    throw std::logic_error("ConstructMinRankD: Kalman condition not met");
  }
  return pair;
}

double CommutatorNorm(const CouplingPair& pair) {
  const Eigen::MatrixXd C = pair.A() * pair.D() - pair.D() * pair.A();
  return SpectralNorm(C);
}

SpectralFactorD SpectralFactor(const Eigen::MatrixXd& D) {
  if (D.rows() != D.cols()) throw std::invalid_argument("SpectralFactor: D not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("SpectralFactor: eigensolver did not converge");
  }
  const int n = static_cast<int>(D.rows());
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double tol = n * kEps * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  std::vector<int> positive, kernel;
  for (int i = 0; i < n; ++i) (ev(i) > tol ? positive : kernel).push_back(i);
  SpectralFactorD f;
  f.P.resize(n, n);
  int col = 0;
  for (int i : positive) {
    f.P.col(col++) = es.eigenvectors().col(i);
    f.deltas.push_back(ev(i));
  }
  for (int i : kernel) f.P.col(col++) = es.eigenvectors().col(i);
  NormalizeColumnSigns(&f.P);
  f.rank = static_cast<int>(positive.size());
  return f;
}

double SpectralBoundSlack(const Eigen::MatrixXd& D, const SpectralFactorD& f,
                          int samples, std::uint64_t seed) {
  const int n = static_cast<int>(D.rows());
  const double top = f.rank > 0 ? f.deltas.back() : 0.0;
  std::mt19937_64 rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const Eigen::VectorXd U = RandomUnitVector(n, &rng);
    const Eigen::VectorXd hat = f.P.leftCols(f.rank).transpose() * U;
    worst = std::max(worst, (D * U).squaredNorm() - top * top * hat.squaredNorm());
  }
  return worst;
}

CouplingPair LiftPair(const CouplingPair& pair, int m) {
  if (m < 1) throw std::invalid_argument("LiftPair: m must be >= 1");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
  return CouplingPair(Kron(pair.A(), I), Kron(pair.D(), I));
}

}  // namespace stabkit
