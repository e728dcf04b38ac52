// Linear time-lagged decomposition: the generalized symmetric eigenproblem
// cT w = lambda c0 w, and the conversion of autocorrelations to relaxation
// timescales.

#pragma once

#include "tica/core.hpp"
#include "tica/estimators.hpp"

#include <vector>

namespace tica {

struct GevSolution {
    Vector eigenvalues;      // descending
    Matrix eigenvectors;     // row i pairs with eigenvalue i
    Vector residual_norms;   // ||cT w_i - lambda_i c0 w_i||_2
};

/// Full spectrum via Cholesky reduction c0 = L L', B = L^-1 cT L^-T.
/// Eigenvectors are c0-orthonormal, sign-canonicalized and sorted by
/// descending eigenvalue.
GevSolution solve_gev(const CovPair& pair);

struct Timescales {
    Vector values;               // +inf where lambda >= 1
    std::vector<bool> warnings;  // lambda > 1, only possible through sampling noise
};

/// t = -2 lag / (lambda - 1). lambda == 1 maps to +inf, lambda > 1 to +inf
/// with a warning, and lambda <= -1 is clamped to -1 + 1e-12.
double timescale(double lambda, int lag);
Timescales timescales(const Vector& lambdas, int lag);

/// beta = 2 lag lambda - 1, the inverse of lambda = (1 + beta) / (2 lag).
double beta_from_lambda(double lambda, int lag);
double lambda_from_beta(double beta, int lag);
LagrangeScalars linear_scalars(double lambda, int lag);

/// cov_pair -> solve_gev -> timescales on a validated panel.
Decomposition fit_linear(const SeriesMatrix& m, const EstimatorConfig& cfg);

/// Stable descending sort on lambdas; exact ties are broken by the
/// lexicographic order of the (canonicalized) weight rows. Reorders all
/// per-component fields of `d` in place.
void sort_components(Decomposition& d);

/// ||W c0 W' - I||_max
double orthonormality_error(const Matrix& weights, const Matrix& c0);

}  // namespace tica
