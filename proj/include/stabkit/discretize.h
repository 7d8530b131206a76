#pragma once

#include <string>

#include <Eigen/Dense>

#include "stabkit/kalman.h"

namespace stabkit {

/// Uniform grid on (0, 1) with n interior nodes x_i = i h, h = 1/(n+1).
struct Grid1D {
  int n = 0;
  double h = 0.0;

  /// Throws std::invalid_argument for n < 2.
  static Grid1D Make(int n);
  double node(int i) const { return (i + 1) * h; }  // 0-based
};

enum class StiffnessVariant { kWaveDirichlet, kWaveTip, kBeamClamped };
enum class DampingVariant { kViscous, kKelvinVoigt, kBoundaryTip };

struct StiffnessKind {
  StiffnessVariant variant = StiffnessVariant::kWaveDirichlet;
  double shift = 0.0;
};

struct DampingKind {
  DampingVariant variant = DampingVariant::kViscous;
  double lo = 0.0;  // viscous support [lo, hi); hi = 1 closes the right end
  double hi = 1.0;
  Eigen::VectorXd a;  // Kelvin–Voigt weight at the nodes; empty means a = 1

  /// Regularity exponent r: 0 viscous, 1 Kelvin–Voigt, 0 boundary tip.
  double regularity() const;
  /// Predicted decay exponent 1 / (2 (1 + r)).
  double predicted_theta() const { return 0.5 / (1.0 + regularity()); }
  /// Viscous on all of (0,1), or Kelvin–Voigt with a = 1.
  bool is_uniform() const;
};

std::string ToString(StiffnessVariant v);
std::string ToString(DampingVariant v);

struct ModelSpec {
  Grid1D grid;
  StiffnessKind stiffness;
  DampingKind damping;
  CouplingPair pair;

  /// Throws std::invalid_argument on any inconsistent combination.
  void Validate() const;
  int N() const { return pair.size(); }
  int n() const { return grid.n; }
};

/// First-order form of U'' + (I⊗L + A⊗I) U + (D⊗G) U' = 0 on W = (U, V),
/// with component-major ordering (block i of length n holds u^(i)).
struct Generator {
  int N = 0;
  int n = 0;
  Eigen::MatrixXd L;  // n x n scalar stiffness
  Eigen::MatrixXd G;  // n x n scalar damping
  Eigen::MatrixXd K;  // I_N⊗L + A⊗I_n
  Eigen::MatrixXd S;  // D⊗G
  Eigen::MatrixXd op;
  Eigen::MatrixXd energy;  // blockdiag(K, I)
  Eigen::MatrixXd RK;      // upper Cholesky factor, K = RK^T RK

  int size() const { return 2 * N * n; }
  int half() const { return N * n; }
  /// <W, W>_E = U^T K U + V^T V.
  double EnergyNormSq(const Eigen::VectorXd& W) const;
  double EnergyNorm(const Eigen::VectorXd& W) const;
};

inline constexpr int kMaxGeneratorSize = 20000;

/// Grid spacing used by a stiffness variant. The tip variant places its
/// nodes at i/n, i = 1..n, so the last node sits on x = 1.
double StiffnessSpacing(const Grid1D& grid, StiffnessVariant v);

Eigen::MatrixXd AssembleStiffness(const Grid1D& grid, const StiffnessKind& kind);

/// G_h for the damping. Kelvin–Voigt expects a Dirichlet wave grid and the
/// boundary tip a tip grid; the stiffness variant fixes the spacing.
Eigen::MatrixXd AssembleDamping(const Grid1D& grid, const DampingKind& damping,
                                StiffnessVariant stiffness =
                                    StiffnessVariant::kWaveDirichlet);

/// Throws std::invalid_argument past the 2Nn <= 20000 guard and
/// NumericalError if the energy matrix is not positive definite.
Generator AssembleGenerator(const ModelSpec& model);

Eigen::MatrixXd EnergyProduct(const ModelSpec& model);

}  // namespace stabkit
