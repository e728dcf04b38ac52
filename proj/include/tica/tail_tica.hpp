// Higher-moment ("tail") timescale separation.
//
// On whitened data z the objective for a unit vector w is the time-symmetric
// tail autocorrelation
//
//     J(w) = 1/2 E[(z_t.w)^{2k-1} (z_{t+T}.w) + (z_{t+T}.w)^{2k-1} (z_t.w)],
//
// maximized by a shifted fixed-point iteration
//
//     w <- grad J(w) + alpha(w) w,   w <- w / |w|,
//
// with alpha(w) = 2k (2k-1) E_s[(z.w)^{2k-2}], which bounds the curvature of
// J and makes every step an ascent step. Stationary points satisfy
// grad J(w) || w. For k = 1, grad J = 2 cT w and the iteration is the power
// method on the whitened symmetrized lag matrix, so its fixed points are the
// linear components.

#pragma once

#include "tica/core.hpp"
#include "tica/estimators.hpp"

#include <cstdint>

namespace tica {

enum class TailMode { Deflation, Parallel };

struct TailConfig {
    int k = 4;
    int lag = 1;
    int max_iters = 2000;
    double tol = 1e-10;
    int restarts = 8;
    std::uint64_t seed = 0;
    TailMode mode = TailMode::Deflation;
};

struct TailIterate {
    Vector w;
    double delta = 0.0;  // 1 - |w_new . w_old|
    double residual = 0.0;
    int iter = 0;
    bool converged = false;
};

/// M with M s M = I; symmetric PD. Throws NotPositiveDefinite.
Matrix matrix_inv_sqrt(const Matrix& s);

/// values * c0^{-1/2}. The caller decides whether `m` is centered.
SeriesMatrix whiten(const SeriesMatrix& m, const CovPair& pair);

/// Unnormalized shifted update grad J(w) + alpha(w) w on whitened data.
Vector tail_update(const SeriesMatrix& mw, const Vector& w, int k, int lag);

/// Sine of the angle between w and its update: the stationarity residual.
double stationarity_residual(const SeriesMatrix& mw, const Vector& w, int k, int lag);

/// Row weights c_i used by the parallel mode, which maximizes sum_i c_i J(w_i)
/// over orthonormal W by iterating W <- polar(diag(c) F(W)).
Vector parallel_ordering_weights(Index n);

/// One normalized fixed-point step from a unit vector, sign-aligned with w.
/// Throws DegenerateUpdate when the update vanishes.
Vector tail_step_deflation(const SeriesMatrix& mw, const Vector& w, int k, int lag);

/// Beta from the forward-differenced moment drift
/// 2k mean[(x_t.w)^{2k-1} ((x_{t+T} - x_t).w) / T], paired with the tail
/// autocorrelation at the same lag.
LagrangeScalars tail_beta(const SeriesMatrix& m, const Vector& w, int k, int lag);

/// Whiten, iterate, un-whiten. Components are sorted by descending tail
/// autocorrelation; timescales use the normalized tail autocorrelation.
/// `est.lag` and `cfg.lag` must agree.
Decomposition tail_solve(const SeriesMatrix& m, const EstimatorConfig& est, const TailConfig& cfg);

/// Seeded Haar-random orthogonal matrix.
Matrix random_orthogonal(Index n, std::uint64_t seed);

}  // namespace tica
