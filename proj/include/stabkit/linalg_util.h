#pragma once

#include <random>

#include <Eigen/Dense>

namespace stabkit {

/// Largest singular value; 0 for empty input.
double SpectralNorm(const Eigen::MatrixXd& M);
double SpectralNorm(const Eigen::MatrixXcd& M);

/// Flips each column so that its first entry with |x| > 1e-12 * |col| is
/// positive. Makes eigenvector output deterministic across solvers.
void NormalizeColumnSigns(Eigen::MatrixXd* M);

Eigen::MatrixXd Kron(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

/// Uniform on the unit sphere of R^n (normalized Gaussian).
Eigen::VectorXd RandomUnitVector(int n, std::mt19937_64* rng);

/// Haar-distributed orthogonal matrix (sign-fixed QR of a Gaussian matrix).
Eigen::MatrixXd RandomOrthogonal(int n, std::mt19937_64* rng);

/// Least-squares slope and intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit FitLine(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace stabkit
