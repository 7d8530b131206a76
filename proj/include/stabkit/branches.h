#pragma once

#include <vector>

#include "stabkit/spectra.h"

namespace stabkit {

/// One eigenvalue on a tracked branch next to its asymptotic prediction.
struct BranchRow {
  int index = 0;     // mode k, or n for the boundary-coupled example
  double nu = 0.0;   // k pi; 0 where not applicable
  cdouble beta;
  cdouble pred;
  double rel_err = 0.0;   // |Re beta - Re pred| / |Re pred|
  double residual = 0.0;  // |f(beta)| / scale of the characteristic function
};

/// Pair A = diag(1, 2), D = [[1, 2], [2, 4]] used by the two wave examples.
CouplingPair WaveExamplePair();
/// Pair A = diag(1, 0), D = [[1, -1], [-1, 1]] of the tip-coupled example.
CouplingPair TipExamplePair();

/// Slow root of (z + 1 + beta mu)(z + 2 + 4 beta mu) - 4 beta^2 mu^2 = 0 with
/// z = beta^2 + nu^2: the max-Re companion root with Im > 0, polished by a
/// fixed point on the small z root.
cdouble WaveBranchRoot(double nu, double mu_power);

/// Viscous coupling, mu = 1. Prediction -2/(125 nu^2) + i (nu + 3/(5 nu)).
std::vector<BranchRow> BranchRootsViscous(int k_lo, int k_hi);
/// Kelvin–Voigt coupling, mu = nu^2. Prediction -2/(125 nu^4) + i (nu + 3/(5 nu)).
std::vector<BranchRow> BranchRootsKelvinVoigt(int k_lo, int k_hi);

/// f(beta) = (b1/beta) cosh b1 (sinh beta + cosh beta) + cosh beta sinh b1,
/// b1 = sqrt(beta^2 + 1), with its derivative. Every product of hyperbolic
/// functions is scaled by exp(-|Re beta| - |Re b1|); the scale is the sum of
/// the magnitudes of the two terms under the same scaling.
struct TipFunctionValue {
  cdouble f;
  cdouble df;
  double scale = 0.0;
};
TipFunctionValue TipCharacteristic(cdouble beta);

/// Damped Newton from `seed`. Stops at |f| <= 1e-12 scale or once the step
/// falls to rounding level in beta; throws NumericalError if |f| > 1e-10
/// scale at that point.
cdouble TipNewton(cdouble seed);

/// Branch near i(n pi + pi/2), seeded there. Prediction
/// i(n pi + pi/2 + 1/(8 n pi)) - 9/(64 n^2 pi^2).
std::vector<BranchRow> BranchRootsTip(int n_lo, int n_hi);

/// Branch near -ln(3)/2 + i n pi (tanh beta = -1/2 in the limit). No
/// prediction: pred is set to the limit point.
std::vector<BranchRow> BranchRootsTipOther(int n_lo, int n_hi);

std::vector<cdouble> Betas(const std::vector<BranchRow>& rows);

}  // namespace stabkit
