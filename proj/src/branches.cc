#include "stabkit/branches.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stabkit/errors.h"

namespace stabkit {
namespace {

using std::numbers::pi;
constexpr cdouble kI(0.0, 1.0);

// Smaller-magnitude root of z^2 + b z + c, free of cancellation.
cdouble SmallRoot(cdouble b, cdouble c) {
  cdouble d = std::sqrt(b * b - 4.0 * c);
  if (std::real(std::conj(b) * d) < 0) d = -d;
  const cdouble q = b + d;
  return q == 0.0 ? cdouble(0.0) : -2.0 * c / q;
}

// beta^2 + nu^2 without cancelling nu^2 against -Im(beta)^2.
cdouble ShiftedSquare(cdouble beta, double nu) {
  const double x = beta.real();
  const double y = beta.imag();
  return {x * x + (nu - y) * (nu + y), 2 * x * y};
}

double WaveResidual(cdouble beta, double nu, double mu) {
  const cdouble z = ShiftedSquare(beta, nu);
  const cdouble b = 3.0 + 5.0 * beta * mu;
  const cdouble c = 2.0 + 6.0 * beta * mu;
  const double scale = std::norm(z) + std::abs(b) * std::abs(z) + std::abs(c);
  return std::abs(z * z + b * z + c) / scale;
}

// cosh and sinh times exp(-|Re z|).
cdouble ScaledCosh(cdouble z) {
  const double x = z.real(), y = z.imag();
  const double e = std::exp(-2 * std::abs(x));
  return {0.5 * (1 + e) * std::cos(y), std::copysign(0.5 * (1 - e), x) * std::sin(y)};
}

cdouble ScaledSinh(cdouble z) {
  const double x = z.real(), y = z.imag();
  const double e = std::exp(-2 * std::abs(x));
  return {std::copysign(0.5 * (1 - e), x) * std::cos(y), 0.5 * (1 + e) * std::sin(y)};
}

std::vector<BranchRow> WaveBranch(int k_lo, int k_hi, double mu_power) {
  if (k_lo < 1 || k_hi < k_lo) throw std::invalid_argument("branch: bad k range");
  std::vector<BranchRow> rows;
  for (int k = k_lo; k <= k_hi; ++k) {
    BranchRow r;
    r.index = k;
    r.nu = k * pi;
    r.beta = WaveBranchRoot(r.nu, mu_power);
    r.pred = {-2.0 / (125.0 * std::pow(r.nu, 2 + mu_power)), r.nu + 3.0 / (5.0 * r.nu)};
    r.rel_err = std::abs(r.beta.real() - r.pred.real()) / std::abs(r.pred.real());
    r.residual = WaveResidual(r.beta, r.nu, std::pow(r.nu, mu_power));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

CouplingPair WaveExamplePair() {
  Eigen::MatrixXd A(2, 2), D(2, 2);
  A << 1, 0, 0, 2;
  D << 1, 2, 2, 4;
  return CouplingPair(A, D);
}

CouplingPair TipExamplePair() {
  Eigen::MatrixXd A(2, 2), D(2, 2);
  A << 1, 0, 0, 0;
  D << 1, -1, -1, 1;
  return CouplingPair(A, D);
}

cdouble WaveBranchRoot(double nu, double mu_power) {
  const double mu = std::pow(nu, mu_power);
  const CouplingPair pair = WaveExamplePair();
  const Eigen::MatrixXd K =
      nu * nu * Eigen::MatrixXd::Identity(2, 2) + pair.A();
  const Eigen::VectorXcd roots = QuadraticPencilRoots(K, mu * pair.D());
  cdouble beta(-std::numeric_limits<double>::infinity(), 0.0);
  for (Eigen::Index j = 0; j < roots.size(); ++j) {
    if (roots(j).imag() > 0 && roots(j).real() > beta.real()) beta = roots(j);
  }
  if (!std::isfinite(beta.real())) {
    throw NumericalError("WaveBranchRoot: no root in the upper half-plane");
  }
  // The companion eigenvalue is accurate only relative to nu^2 mu; the
  // reduced equation resolves Re beta to full relative precision.
  for (int it = 0; it < 100; ++it) {
    const cdouble z = SmallRoot(3.0 + 5.0 * beta * mu, 2.0 + 6.0 * beta * mu);
    const cdouble next = kI * std::sqrt(nu * nu - z);
    const double step = std::abs(next - beta);
    beta = next;
    if (step <= 4 * std::numeric_limits<double>::epsilon() * std::abs(beta)) break;
  }
  return beta;
}

std::vector<BranchRow> BranchRootsViscous(int k_lo, int k_hi) {
  return WaveBranch(k_lo, k_hi, 0.0);
}

std::vector<BranchRow> BranchRootsKelvinVoigt(int k_lo, int k_hi) {
  return WaveBranch(k_lo, k_hi, 2.0);
}

TipFunctionValue TipCharacteristic(cdouble beta) {
  const cdouble b1 = std::sqrt(beta * beta + 1.0);
  const cdouble chb = ScaledCosh(beta), shb = ScaledSinh(beta);
  const cdouble ch1 = ScaledCosh(b1), sh1 = ScaledSinh(b1);
  const cdouble t1 = (b1 / beta) * ch1 * (shb + chb);
  const cdouble t2 = chb * sh1;
  TipFunctionValue v;
  v.f = t1 + t2;
  v.df = (shb + chb) * (-ch1 / (b1 * beta * beta) + sh1 + (b1 / beta) * ch1) +
         shb * sh1 + chb * ch1 * (beta / b1);
  v.scale = std::abs(t1) + std::abs(t2);
  return v;
}

cdouble TipNewton(cdouble seed) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  cdouble beta = seed;
  TipFunctionValue v = TipCharacteristic(beta);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(v.f) <= 1e-12 * v.scale) return beta;
    const cdouble step = v.f / v.df;
    // Below this the residual is set by rounding in beta itself.
    if (std::abs(step) <= 4 * kEps * std::abs(beta)) break;
    double damp = 1.0;
    bool moved = false;
    for (int h = 0; h < 40; ++h, damp /= 2) {
      const cdouble trial = beta - damp * step;
      const TipFunctionValue w = TipCharacteristic(trial);
      if (std::abs(w.f) / w.scale < std::abs(v.f) / v.scale) {
        beta = trial;
        v = w;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (std::abs(v.f) <= 1e-10 * v.scale) return beta;
  throw NumericalError("TipNewton: no convergence from seed (" +
                       std::to_string(seed.real()) + ", " +
                       std::to_string(seed.imag()) + ")");
}

std::vector<BranchRow> BranchRootsTip(int n_lo, int n_hi) {
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("branch: bad n range");
  std::vector<BranchRow> rows;
  for (int n = n_lo; n <= n_hi; ++n) {
    BranchRow r;
    r.index = n;
    r.beta = TipNewton(kI * (n * pi + pi / 2));
    r.pred = {-9.0 / (64.0 * n * n * pi * pi), n * pi + pi / 2 + 1.0 / (8.0 * n * pi)};
    r.rel_err = std::abs(r.beta.real() - r.pred.real()) / std::abs(r.pred.real());
    const TipFunctionValue v = TipCharacteristic(r.beta);
    r.residual = std::abs(v.f) / v.scale;
    rows.push_back(r);
  }
  return rows;
}

std::vector<BranchRow> BranchRootsTipOther(int n_lo, int n_hi) {
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("branch: bad n range");
  std::vector<BranchRow> rows;
  const double re = -0.5 * std::log(3.0);
  for (int n = n_lo; n <= n_hi; ++n) {
    BranchRow r;
    r.index = n;
    r.pred = {re, n * pi};
    r.beta = TipNewton(r.pred);
    r.rel_err = std::abs(r.beta.real() - re) / std::abs(re);
    const TipFunctionValue v = TipCharacteristic(r.beta);
    r.residual = std::abs(v.f) / v.scale;
    rows.push_back(r);
  }
  return rows;
}

std::vector<cdouble> Betas(const std::vector<BranchRow>& rows) {
  std::vector<cdouble> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.beta);
  return out;
}

}  // namespace stabkit
