#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stabkit/discretize.h"

namespace stabkit {

using cdouble = std::complex<double>;

/// Eigenvalues of a real matrix. residuals(j) = |Mv - lambda v| / (|M|_F |v|)
/// when requested, empty otherwise.
struct EigenList {
  Eigen::VectorXcd values;
  Eigen::VectorXd residuals;
  Eigen::MatrixXcd vectors;  // filled when requested, columns match values

  double max_residual() const;
};

/// Diagonal similarity B = T^{-1} M T with T a power-of-two scaling that
/// equalizes row and column norms. Returns the diagonal of T.
Eigen::VectorXd Balance(Eigen::MatrixXd* M);

struct EigOptions {
  bool residuals = true;
  bool vectors = false;
};

/// Balancing followed by Hessenberg reduction and shifted QR. Throws
/// NumericalError when QR fails to converge or the size exceeds 4000.
EigenList EigAll(const Eigen::MatrixXd& M, EigOptions options = {});

double SpectralAbscissa(const EigenList& eig);
double SpectralAbscissa(const Generator& gen);

enum class FitMode {
  kEnvelope,  // maxima over 12 logarithmic bins, then least squares
  kAllPoints,
};

struct ResolventScan {
  std::vector<double> betas;  // strictly increasing, as evaluated
  std::vector<double> norms;  // energy-norm resolvent, NaN where dropped
  std::vector<bool> dropped;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  FitMode fit_mode = FitMode::kEnvelope;
  double fitted_exponent = 0.0;
  double theta_implied = 0.0;
  int fit_points = 0;
};

struct ResolventOptions {
  int block = 4;
  int max_iter = 200;
  double tol = 1e-10;
  int threads = 1;
  std::uint64_t seed = 1;
};

/// |(i beta - op)^{-1}| in the energy norm, via the reduced N n system.
/// Returns NaN when the shifted system is singular.
double ResolventNorm(const Generator& gen, double beta,
                     const ResolventOptions& options = {});

/// Positive imaginary parts of the spectrum inside [lo, hi], deduplicated
/// and sorted: the resonance frequencies where the envelope is attained.
std::vector<double> ResonanceBetas(const EigenList& eig, double lo, double hi);

/// Evaluates the norm at every beta (sorted, duplicates removed). A beta at
/// which the shifted system is singular is moved by 1e-6 once, then dropped.
ResolventScan ScanResolvent(const Generator& gen, std::vector<double> betas,
                            const ResolventOptions& options = {});

/// Fills fitted_exponent and theta_implied from the points in [lo, hi].
/// Throws std::invalid_argument if fewer than 3 points remain.
void FitResolventExponent(ResolventScan* scan, double lo, double hi,
                          FitMode mode = FitMode::kEnvelope);

enum class ModeFrequencies {
  kContinuum,  // nu_k = k pi
  kDiscrete,   // nu_k = (2/h) sin(k pi h / 2), matching the FD Laplacian
};

/// beta^2 I + beta C + K restricted to the k-th sine mode.
struct ModalPencil {
  int k = 0;
  double nu = 0.0;
  Eigen::MatrixXd K;  // (nu^2 + shift) I + A
  Eigen::MatrixXd C;  // mu D, mu = 1 viscous, nu^2 Kelvin–Voigt
  Eigen::VectorXcd roots;
};

/// Roots of det(beta^2 I + beta C + K) from the companion matrix
/// [[0, I], [-K, -C]].
Eigen::VectorXcd QuadraticPencilRoots(const Eigen::MatrixXd& K,
                                      const Eigen::MatrixXd& C);

/// Requires wave_dirichlet stiffness and uniform damping; throws
/// std::invalid_argument otherwise.
std::vector<ModalPencil> ModalReduce(const ModelSpec& model, int k_lo, int k_hi,
                                     ModeFrequencies freq);

/// theta = -1/s, s the slope of log(-Re beta) against log|Im beta|. Needs at
/// least 8 points with Re < 0 and strictly increasing |Im|.
double OptimalityExponent(const std::vector<cdouble>& branch);

}  // namespace stabkit
