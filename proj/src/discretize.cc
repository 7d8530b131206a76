#include "stabkit/discretize.h"

#include <cmath>
#include <stdexcept>

#include "stabkit/errors.h"
#include "stabkit/linalg_util.h"

namespace stabkit {

Grid1D Grid1D::Make(int n) {
  if (n < 2) throw std::invalid_argument("Grid1D: n must be >= 2");
  return Grid1D{n, 1.0 / (n + 1)};
}

double DampingKind::regularity() const {
  switch (variant) {
    case DampingVariant::kViscous: return 0.0;
    case DampingVariant::kKelvinVoigt: return 1.0;
    case DampingVariant::kBoundaryTip: return 0.0;
  }
  return 0.0;
}

bool DampingKind::is_uniform() const {
  switch (variant) {
    case DampingVariant::kViscous: return lo <= 0.0 && hi >= 1.0;
    case DampingVariant::kKelvinVoigt:
      return a.size() == 0 || (a.array() == 1.0).all();
    case DampingVariant::kBoundaryTip: return false;
  }
  return false;
}

std::string ToString(StiffnessVariant v) {
  switch (v) {
    case StiffnessVariant::kWaveDirichlet: return "wave_dirichlet";
    case StiffnessVariant::kWaveTip: return "wave_tip";
    case StiffnessVariant::kBeamClamped: return "beam_clamped";
  }
  return "?";
}

std::string ToString(DampingVariant v) {
  switch (v) {
    case DampingVariant::kViscous: return "viscous";
    case DampingVariant::kKelvinVoigt: return "kelvin_voigt";
    case DampingVariant::kBoundaryTip: return "boundary_tip";
  }
  return "?";
}

void ModelSpec::Validate() const {
  if (grid.n < 2 || std::abs(grid.h * (grid.n + 1) - 1.0) > 1e-15) {
    throw std::invalid_argument("ModelSpec: invalid grid");
  }
  if (!(stiffness.shift >= 0.0)) {
    throw std::invalid_argument("ModelSpec: stiffness shift must be >= 0");
  }
  if (stiffness.variant == StiffnessVariant::kBeamClamped && grid.n < 5) {
    throw std::invalid_argument("ModelSpec: beam_clamped needs n >= 5");
  }
  switch (damping.variant) {
    case DampingVariant::kViscous:
      if (!(0.0 <= damping.lo && damping.lo < damping.hi && damping.hi <= 1.0)) {
        throw std::invalid_argument("ModelSpec: viscous needs 0 <= lo < hi <= 1");
      }
      break;
    case DampingVariant::kKelvinVoigt:
      if (stiffness.variant != StiffnessVariant::kWaveDirichlet) {
        throw std::invalid_argument("ModelSpec: kelvin_voigt needs wave_dirichlet");
      }
      if (damping.a.size() != 0 && damping.a.size() != grid.n) {
        throw std::invalid_argument("ModelSpec: kelvin_voigt a must have n values");
      }
      if (damping.a.size() != 0 &&
          (!damping.a.allFinite() || (damping.a.array() < 0).any())) {
        throw std::invalid_argument("ModelSpec: kelvin_voigt a must be >= 0");
      }
      break;
    case DampingVariant::kBoundaryTip:
      if (stiffness.variant != StiffnessVariant::kWaveTip) {
        throw std::invalid_argument("ModelSpec: boundary_tip needs wave_tip");
      }
      break;
  }
}

double StiffnessSpacing(const Grid1D& grid, StiffnessVariant v) {
  return v == StiffnessVariant::kWaveTip ? 1.0 / grid.n : grid.h;
}

namespace {

Eigen::MatrixXd DirichletLaplacian(int n, double h) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  const double w = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    L(i, i) = 2 * w;
    if (i > 0) L(i, i - 1) = -w;
    if (i + 1 < n) L(i, i + 1) = -w;
  }
  return L;
}

}  // namespace

Eigen::MatrixXd AssembleStiffness(const Grid1D& grid, const StiffnessKind& kind) {
  const int n = grid.n;
  if (n < 2) throw std::invalid_argument("AssembleStiffness: n must be >= 2");
  if (!(kind.shift >= 0.0)) {
    throw std::invalid_argument("AssembleStiffness: shift must be >= 0");
  }
  Eigen::MatrixXd L;
  switch (kind.variant) {
    case StiffnessVariant::kWaveDirichlet:
      L = DirichletLaplacian(n, grid.h);
      break;
    case StiffnessVariant::kWaveTip: {
      // Nodes at i/n with u(0) = 0; the tip node carries half mass. Scaling by
      // M^{-1/2} with M = diag(1, ..., 1, 1/2) restores an identity mass.
      const double ht = 1.0 / n;
      const double w = 1.0 / (ht * ht);
      L = DirichletLaplacian(n, ht);
      L(n - 1, n - 1) = 2 * w;
      L(n - 1, n - 2) = L(n - 2, n - 1) = -std::sqrt(2.0) * w;
      break;
    }
    case StiffnessVariant::kBeamClamped: {
      if (n < 5) throw std::invalid_argument("AssembleStiffness: beam needs n >= 5");
      const double w = 1.0 / std::pow(grid.h, 4);
      const double stencil[5] = {1, -4, 6, -4, 1};
      L = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        for (int k = -2; k <= 2; ++k) {
          if (i + k >= 0 && i + k < n) L(i, i + k) = stencil[k + 2] * w;
        }
      }
      // Reflected ghost u_{-1} = u_1 for u'(0) = 0, likewise at x = 1.
      L(0, 0) = L(n - 1, n - 1) = 7 * w;
      break;
    }
  }
  L.diagonal().array() += kind.shift;
  return L;
}

Eigen::MatrixXd AssembleDamping(const Grid1D& grid, const DampingKind& damping,
                                StiffnessVariant stiffness) {
  const int n = grid.n;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  switch (damping.variant) {
    case DampingVariant::kViscous: {
      const double h = StiffnessSpacing(grid, stiffness);
      for (int i = 0; i < n; ++i) {
        const double x = (i + 1) * h;
        const bool inside =
            x >= damping.lo && (x < damping.hi || damping.hi >= 1.0);
        if (inside) G(i, i) = 1.0;
      }
      break;
    }
    case DampingVariant::kKelvinVoigt: {
      Eigen::VectorXd a = damping.a.size() == 0 ? Eigen::VectorXd::Ones(n)
                                                : damping.a;
      if (a.size() != n) {
        throw std::invalid_argument("AssembleDamping: a must have n values");
      }
      if ((a.array() < 0).any()) {
        throw std::invalid_argument("AssembleDamping: a must be >= 0");
      }
      // (B diag(a))^T (B diag(a)) with B the (n+1) x n difference operator.
      G = a.asDiagonal() * DirichletLaplacian(n, grid.h) * a.asDiagonal();
      break;
    }
    case DampingVariant::kBoundaryTip: {
      if (stiffness != StiffnessVariant::kWaveTip) {
        throw std::invalid_argument("AssembleDamping: boundary_tip needs wave_tip");
      }
      // Weight 1/h_t on the tip row, doubled by the half-mass scaling.
      G(n - 1, n - 1) = 2.0 * n;
      break;
    }
  }
  return G;
}

double Generator::EnergyNormSq(const Eigen::VectorXd& W) const {
  const int m = half();
  const auto U = W.head(m);
  const auto V = W.tail(m);
  return U.dot(K * U) + V.squaredNorm();
}

double Generator::EnergyNorm(const Eigen::VectorXd& W) const {
  return std::sqrt(std::max(0.0, EnergyNormSq(W)));
}

Generator AssembleGenerator(const ModelSpec& model) {
  model.Validate();
  const int N = model.N();
  const int n = model.n();
  if (2LL * N * n > kMaxGeneratorSize) {
    throw std::invalid_argument("AssembleGenerator: 2Nn exceeds " +
                                std::to_string(kMaxGeneratorSize));
  }
  Generator g;
  g.N = N;
  g.n = n;
  g.L = AssembleStiffness(model.grid, model.stiffness);
  g.G = AssembleDamping(model.grid, model.damping, model.stiffness.variant);
  const Eigen::MatrixXd In = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd IN = Eigen::MatrixXd::Identity(N, N);
  g.K = Kron(IN, g.L) + Kron(model.pair.A(), In);
  g.S = Kron(model.pair.D(), g.G);
  const int m = N * n;
  Eigen::LLT<Eigen::MatrixXd> llt(g.K);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("AssembleGenerator: energy matrix is not positive definite");
  }
  g.RK = llt.matrixU();
  g.op = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  g.op.topRightCorner(m, m).setIdentity();
  g.op.bottomLeftCorner(m, m) = -g.K;
  g.op.bottomRightCorner(m, m) = -g.S;
  g.energy = Eigen::MatrixXd::Identity(2 * m, 2 * m);
  g.energy.topLeftCorner(m, m) = g.K;
  return g;
}

Eigen::MatrixXd EnergyProduct(const ModelSpec& model) {
  return AssembleGenerator(model).energy;
}

}  // namespace stabkit
