#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace stabkit {

/// The coupling matrix A and the control matrix D of a weakly coupled system
/// U'' + LU + AU + D G*G U' = 0. Both are stored symmetrized and are checked
/// to be positive semi-definite on construction.
class CouplingPair {
 public:
  /// Symmetrizes A and D by averaging with their transposes and validates
  /// them. Throws std::invalid_argument on shape mismatch, non-finite
  /// entries, or an eigenvalue below -1e-10 * ||.||_2.
  CouplingPair(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D);

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& D() const { return D_; }
  int size() const { return static_cast<int>(A_.rows()); }

  /// Largest entry of |M - M^T| / 2 over both inputs, before symmetrization.
  double asymmetry_defect() const { return asymmetry_defect_; }

 private:
  Eigen::MatrixXd A_;
  Eigen::MatrixXd D_;
  double asymmetry_defect_ = 0.0;
};

/// Orthogonal diagonalization of a symmetric A with eigenvalues clustered
/// into groups: P^T A P = diag(lambda_1 I_{sigma_1}, ..., lambda_m I_{sigma_m}).
struct EigenGroups {
  Eigen::MatrixXd P;
  std::vector<double> lambdas;  // ascending
  std::vector<int> sigmas;
  std::vector<int> offsets;  // mu_0 = 0, ..., mu_m = N

  int num_groups() const { return static_cast<int>(lambdas.size()); }
  int size() const { return static_cast<int>(P.rows()); }
  /// Columns of P spanning group l.
  Eigen::MatrixXd basis(int l) const {
    return P.middleCols(offsets[l], sigmas[l]);
  }
};

/// Columns of D expressed in the eigenbasis of A, split by eigenvalue group.
struct BlockPartition {
  std::vector<Eigen::MatrixXd> blocks;  // D_l, N x sigma_l
  std::vector<bool> independence;
  std::vector<double> gram_min;  // lambda_min(D_l^T D_l)
  std::vector<Eigen::VectorXd> gram_argmin;  // unit minimizer in R^{sigma_l}

  bool all_independent() const;
  int size() const;
};

struct SpectralFactorD {
  Eigen::MatrixXd P;  // positive modes first (ascending), kernel after
  std::vector<double> deltas;
  int rank = 0;
};

struct CoercivityCheck {
  bool pass = false;
  double worst_slack = 0.0;
};

/// Default clustering tolerance 1e-8 * ||A||_2.
double DefaultGroupTolerance(const Eigen::MatrixXd& A);

/// Number of singular values above factor * eps * scale, where scale defaults
/// to the largest singular value of M.
int NumericalRank(const Eigen::MatrixXd& M, double factor, double scale = -1);

/// The N x N^2 matrix (D, AD, ..., A^{N-1} D).
Eigen::MatrixXd ControllabilityMatrix(const CouplingPair& pair);

int KalmanRank(const CouplingPair& pair);

/// Dimension of the largest A-invariant subspace contained in Ker(D).
int MaxInvariantDim(const CouplingPair& pair);
int MaxInvariantDim(const CouplingPair& pair, double group_tol);

/// Throws std::runtime_error if the symmetric eigensolver fails.
EigenGroups EigGroup(const Eigen::MatrixXd& A, double group_tol);

BlockPartition MakeBlockPartition(const CouplingPair& pair,
                                  const EigenGroups& groups);

/// min_l lambda_min(D_l^T D_l). Throws std::domain_error if some block is
/// dependent.
double CoercivityConstant(const BlockPartition& partition);

/// Evaluates c |U|^2 <= |DU|^2 - sum_{k != l} <D_l U_l, D_k U_k> on the
/// per-block minimizers and on `samples` random unit vectors (eigenbasis
/// coordinates). Pass iff the minimum slack is >= -1e-12.
CoercivityCheck VerifyCoercivity(const BlockPartition& partition, double c,
                                 int samples, std::uint64_t seed);
CoercivityCheck VerifyCoercivity(const BlockPartition& partition, int samples,
                                 std::uint64_t seed);

/// D = W W^T with identity-prefix rows per group, rank(D) = sigma_max.
/// The returned pair has A rebuilt from the groups.
CouplingPair ConstructMinRankD(const EigenGroups& groups);

/// ||AD - DA||_2.
double CommutatorNorm(const CouplingPair& pair);

SpectralFactorD SpectralFactor(const Eigen::MatrixXd& D);

/// Largest value of |DU|^2 - delta_d^2 |U_hat|^2 over random unit U; the
/// bound holds when the result is <= 1e-12.
double SpectralBoundSlack(const Eigen::MatrixXd& D, const SpectralFactorD& f,
                          int samples, std::uint64_t seed);

/// (a_ij I_m, d_ij I_m).
CouplingPair LiftPair(const CouplingPair& pair, int m);

}  // namespace stabkit
