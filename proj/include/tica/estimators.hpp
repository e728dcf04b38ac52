// Covariance, symmetrized lagged autocovariance and higher-moment
// expectations of a panel.
//
// Denominator::N divides every sum by the row count. Denominator::NminusLag
// (the default) uses the common support of t and t+lag: the lagged sum is
// divided by rows - lag, and inside cov_pair the instantaneous covariance is
// the average of the head and tail segments of that support, so that
// |w'cT w| <= w'c0 w holds exactly for every w.

#pragma once

#include "tica/core.hpp"

#include <optional>
#include <span>

namespace tica {

enum class Denominator { N, NminusLag };

struct EstimatorConfig {
    int lag = 1;
    bool center = true;
    /// Absolute diagonal loading of c0. Unset means 1e-10 * trace(c0) / n.
    std::optional<double> ridge;
    Denominator denominator = Denominator::NminusLag;
};

inline constexpr double kDefaultRidgeScale = 1e-10;

/// Sample covariance over all rows, ridge added afterwards. cfg.lag is ignored.
Matrix covariance(const SeriesMatrix& m, const EstimatorConfig& cfg);

/// 0.5 * (C + C') with C = sum_t x_{t+lag} x_t' / denom. No ridge.
Matrix lagged_autocovariance(const SeriesMatrix& m, const EstimatorConfig& cfg);

/// Both estimates with matching centering; c0 is ridged and checked PD.
CovPair cov_pair(const SeriesMatrix& m, const EstimatorConfig& cfg);

/// (1/2k) * mean_t (x_t . w)^{2k}
double tail_moment(const SeriesMatrix& m, const Vector& w, int k);

/// mean_t (x_t . w)^{2k-1} (x_{t+lag} . w) over the common support.
double tail_autocorrelation(const SeriesMatrix& m, const Vector& w, int k, int lag);

// Series-level forms of the above, for already projected components.
double tail_moment(std::span<const double> u, int k);
double tail_autocorrelation(std::span<const double> u, int k, int lag);

/// Tail autocorrelation divided by the mean 2k-th moment of the two
/// segments of the common support. Scale-free and equal to 1 for a constant
/// nonzero series; for k = 1 it is the Rayleigh quotient w'cT w / w'c0 w of
/// the common-support estimator.
double normalized_tail_autocorrelation(std::span<const double> u, int k, int lag);

/// Validated lag; throws InvalidArgument for lag < 1 and InsufficientData when
/// rows <= lag.
void check_lag(Index rows, int lag);

namespace detail {

/// Unchecked symmetrized cross moment at any lag >= 0 on raw (already
/// centered or not) values.
Matrix symmetrized_cross_moment(const Matrix& x, int lag, Denominator denominator);

/// x^p for small non-negative integer p.
inline double ipow(double x, int p) {
    double r = 1.0;
    while (p > 0) {
        if (p & 1) r *= x;
        x *= x;
        p >>= 1;
    }
    return r;
}

}  // namespace detail

}  // namespace tica
