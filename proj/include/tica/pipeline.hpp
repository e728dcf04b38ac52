// Fit on an in-sample window, freeze the weights, project through the whole
// period and measure how well timescales and orthogonality persist.

#pragma once

#include "tica/core.hpp"
#include "tica/estimators.hpp"
#include "tica/tail_tica.hpp"

#include <vector>

namespace tica {

struct WindowSplit {
    TimeWindow fit;
    TimeWindow project;
};

/// Which solver a protocol run uses. `tail` is ignored for the linear method.
struct MethodConfig {
    bool use_tail = false;
    EstimatorConfig estimator;
    TailConfig tail;
};

struct DriftPoint {
    Timestamp window_start = 0;
    Timestamp window_end = 0;  // exclusive
    double drift = 0.0;
};

struct ProjectionReport {
    std::vector<Timestamp> timestamps;  // full period
    Matrix component_series;            // T_total x m, values * gross_weights'
    Matrix gross_weights;               // m x n, unit gross exposure
    Decomposition decomposition;        // full fit-window decomposition
    Index n_selected = 0;
    Vector insample_lambda;
    Vector outsample_lambda;
    Vector insample_timescale;
    Vector outsample_timescale;
    Vector timescale_persistence;  // outsample / insample timescale
    std::vector<DriftPoint> orthogonality_drift;
    WindowSplit split;
};

/// w / sum|w_j| after sign canonicalization. Throws ZeroWeight.
Vector rescale_gross(const Vector& w);

/// Fits on split.fit, keeps the n_components slowest components and projects.
ProjectionReport run_protocol(const SeriesMatrix& m, const WindowSplit& split,
                              const MethodConfig& method, Index n_components);

/// Same as run_protocol with an already fitted decomposition (frozen weights).
ProjectionReport project_decomposition(const SeriesMatrix& m, const WindowSplit& split,
                                       const Decomposition& fitted, const EstimatorConfig& estimator,
                                       Index n_components);

/// Fits the configured method on the rows of `window`.
Decomposition fit_window(const SeriesMatrix& m, const TimeWindow& window,
                         const MethodConfig& method);

/// Realized (normalized) tail autocorrelation of a component series on
/// [first, last) rows, centered within the window when `center` is set.
double realized_lambda(const Vector& series, Index first, Index last, int k, int lag, bool center);

/// out / in with the conventions inf / inf = 1, finite / inf = 0.
double persistence_ratio(double insample, double outsample);

enum class ReturnMode { Log, Simple };

/// Row t of the result is the return from t to t+1, stamped with t+1.
SeriesMatrix to_returns(const SeriesMatrix& prices, ReturnMode mode);

}  // namespace tica
