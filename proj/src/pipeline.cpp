#include "tica/pipeline.hpp"

#include "tica/linear_tica.hpp"

#include <cmath>
#include <limits>

namespace tica {

namespace {

void check_window(const SeriesMatrix& m, const TimeWindow& w, const char* name) {
    const TimeWindow all = full_window(m);
    if (!(w.start < w.end) || w.start < all.start || w.end > all.end) {
        throw Error(ErrorCode::WindowOutOfRange,
                    std::string(name) + " window [" + std::to_string(w.start) + ", " +
                        std::to_string(w.end) + ") not inside series range [" +
                        std::to_string(all.start) + ", " + std::to_string(all.end) + ")");
    }
    auto [first, last] = window_rows(m, w);
    if (first == last) {
        throw Error(ErrorCode::WindowOutOfRange, std::string(name) + " window selects no rows");
    }
}

}  // namespace

Vector rescale_gross(const Vector& w) {
    const Vector c = canonicalize_sign(w);
    const double gross = c.cwiseAbs().sum();
    if (!(gross > 0.0)) throw Error(ErrorCode::ZeroWeight, "weight vector is zero");
    return c / gross;
}

double realized_lambda(const Vector& series, Index first, Index last, int k, int lag, bool center) {
    Vector u = series.segment(first, last - first);
    if (center && u.size() > 0) u.array() -= u.mean();
    return normalized_tail_autocorrelation(
        std::span<const double>(u.data(), static_cast<std::size_t>(u.size())), k, lag);
}

double persistence_ratio(double insample, double outsample) {
    const bool in_inf = std::isinf(insample);
    const bool out_inf = std::isinf(outsample);
    if (in_inf && out_inf) return 1.0;
    if (in_inf) return 0.0;
    return outsample / insample;
}

Decomposition fit_window(const SeriesMatrix& m, const TimeWindow& window,
                         const MethodConfig& method) {
    check_window(m, window, "fit");
    const SeriesMatrix fit = slice_window(m, window);
    Decomposition d = method.use_tail ? tail_solve(fit, method.estimator, method.tail)
                                      : fit_linear(fit, method.estimator);
    d.fit_window = window;
    return d;
}

ProjectionReport run_protocol(const SeriesMatrix& m, const WindowSplit& split,
                              const MethodConfig& method, Index n_components) {
    const SeriesMatrix valid = validate_series(m);
    if (n_components < 1 || n_components > valid.cols()) {
        throw Error(ErrorCode::TooManyComponents,
                    std::to_string(n_components) + " components requested from a " +
                        std::to_string(valid.cols()) + "-column panel");
    }
    check_window(valid, split.project, "project");
    const Decomposition d = fit_window(valid, split.fit, method);
    return project_decomposition(valid, split, d, method.estimator, n_components);
}

ProjectionReport project_decomposition(const SeriesMatrix& m, const WindowSplit& split,
                                       const Decomposition& fitted, const EstimatorConfig& estimator,
                                       Index n_components) {
    const SeriesMatrix valid = validate_series(m);
    if (fitted.weights.cols() != valid.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "decomposition has " +
                                                  std::to_string(fitted.weights.cols()) +
                                                  " assets, panel has " +
                                                  std::to_string(valid.cols()));
    }
    if (n_components < 1 || n_components > fitted.size()) {
        throw Error(ErrorCode::TooManyComponents,
                    std::to_string(n_components) + " components requested, decomposition has " +
                        std::to_string(fitted.size()));
    }
    check_window(valid, split.fit, "fit");
    check_window(valid, split.project, "project");

    const int k = fitted.order_k;
    const int lag = fitted.lag;
    EstimatorConfig est = estimator;
    est.lag = lag;

    ProjectionReport r;
    r.split = split;
    r.decomposition = fitted;
    r.n_selected = n_components;
    r.timestamps = valid.timestamps;

    const Matrix selected = fitted.weights.topRows(n_components);
    r.gross_weights.resize(n_components, valid.cols());
    for (Index i = 0; i < n_components; ++i) {
        r.gross_weights.row(i) = rescale_gross(selected.row(i).transpose()).transpose();
    }
    r.component_series = valid.values * r.gross_weights.transpose();

    const auto [fit_first, fit_last] = window_rows(valid, split.fit);
    const auto [proj_first, proj_last] = window_rows(valid, split.project);
    r.insample_lambda.resize(n_components);
    r.outsample_lambda.resize(n_components);
    r.insample_timescale.resize(n_components);
    r.outsample_timescale.resize(n_components);
    r.timescale_persistence.resize(n_components);
    for (Index i = 0; i < n_components; ++i) {
        const Vector series = r.component_series.col(i);
        r.insample_lambda(i) = realized_lambda(series, fit_first, fit_last, k, lag, est.center);
        r.outsample_lambda(i) = realized_lambda(series, proj_first, proj_last, k, lag, est.center);
        r.insample_timescale(i) = timescale(r.insample_lambda(i), lag);
        r.outsample_timescale(i) = timescale(r.outsample_lambda(i), lag);
        r.timescale_persistence(i) =
            persistence_ratio(r.insample_timescale(i), r.outsample_timescale(i));
    }

    // Rolling windows of the fit length, stepped by a quarter window, from the
    // start of the fit window to the end of the series.
    const Index length = fit_last - fit_first;
    const Index step = std::max<Index>(1, length / 4);
    const Matrix eye = Matrix::Identity(n_components, n_components);
    for (Index start = fit_first; start + length <= valid.rows(); start += step) {
        const SeriesMatrix window = slice_rows(valid, start, start + length);
        const CovPair pair = cov_pair(window, est);
        DriftPoint p;
        p.window_start = valid.timestamps[static_cast<std::size_t>(start)];
        p.window_end = start + length < valid.rows()
                           ? valid.timestamps[static_cast<std::size_t>(start + length)]
                           : valid.timestamps.back() + 1;
        p.drift = (selected * pair.c0 * selected.transpose() - eye).norm();
        r.orthogonality_drift.push_back(p);
    }
    return r;
}

SeriesMatrix to_returns(const SeriesMatrix& prices, ReturnMode mode) {
    const SeriesMatrix valid = validate_series(prices);
    for (Index r = 0; r < valid.rows(); ++r) {
        for (Index c = 0; c < valid.cols(); ++c) {
            if (!(valid.values(r, c) > 0.0)) {
                Error e(ErrorCode::NonPositivePrice, "price " + std::to_string(valid.values(r, c)) +
                                                         " at (" + std::to_string(r) + "," +
                                                         std::to_string(c) + ")");
                e.row = r;
                e.col = c;
                throw e;
            }
        }
    }
    SeriesMatrix out;
    out.labels = valid.labels;
    out.kind = SeriesKind::Returns;
    out.timestamps.assign(valid.timestamps.begin() + 1, valid.timestamps.end());
    const auto prev = valid.values.topRows(valid.rows() - 1).array();
    const auto next = valid.values.bottomRows(valid.rows() - 1).array();
    if (mode == ReturnMode::Log) {
        out.values = (next / prev).log().matrix();
    } else {
        out.values = ((next - prev) / prev).matrix();
    }
    return out;
}

}  // namespace tica
