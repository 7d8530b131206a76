#include "stabkit/linalg_util.h"

#include <cmath>
#include <stdexcept>

namespace stabkit {

double SpectralNorm(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
}

double SpectralNorm(const Eigen::MatrixXcd& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(M).singularValues()(0);
}

void NormalizeColumnSigns(Eigen::MatrixXd* M) {
  for (Eigen::Index j = 0; j < M->cols(); ++j) {
    auto col = M->col(j);
    const double tol = 1e-12 * col.norm();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > tol) {
        if (col(i) < 0) col = -col;
        break;
      }
    }
  }
}

Eigen::MatrixXd Kron(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  Eigen::MatrixXd K(X.rows() * Y.rows(), X.cols() * Y.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      K.block(i * Y.rows(), j * Y.cols(), Y.rows(), Y.cols()) = X(i, j) * Y;
    }
  }
  return K;
}

Eigen::VectorXd RandomUnitVector(int n, std::mt19937_64* rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = g(*rng);
  } while (v.norm() == 0.0);
  return v.normalized();
}

Eigen::MatrixXd RandomOrthogonal(int n, std::mt19937_64* rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd G(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) G(i, j) = g(*rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  // Sign-fix by diag(R) so the distribution is Haar.
  const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

LineFit FitLine(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("FitLine: need two or more paired samples");
  }
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx;
  const double sxx = (dx * dx).sum();
  if (sxx == 0.0) throw std::invalid_argument("FitLine: degenerate abscissae");
  LineFit f;
  f.slope = (dx * (y.array() - my)).sum() / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace stabkit
