#include "tica/estimators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace tica {

namespace {

Matrix maybe_centered(const SeriesMatrix& m, bool center) {
    return center ? centered(m.values) : m.values;
}

Matrix symmetrize(const Matrix& c) { return 0.5 * (c + c.transpose()); }

double resolve_ridge(const EstimatorConfig& cfg, const Matrix& c0) {
    if (cfg.ridge) {
        if (!(*cfg.ridge >= 0.0) || !std::isfinite(*cfg.ridge)) {
            throw Error(ErrorCode::InvalidArgument, "ridge must be a finite non-negative number");
        }
        return *cfg.ridge;
    }
    return kDefaultRidgeScale * c0.trace() / static_cast<double>(c0.rows());
}

void check_k(int k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "moment half-order k must be >= 1");
}

}  // namespace

void check_lag(Index rows, int lag) {
    if (lag < 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "lag must be >= 1 (use covariance for lag 0), got " + std::to_string(lag));
    }
    if (rows <= lag) {
        throw Error(ErrorCode::InsufficientData, std::to_string(rows) +
                                                     " rows cannot support lag " +
                                                     std::to_string(lag));
    }
}

namespace detail {

Matrix symmetrized_cross_moment(const Matrix& x, int lag, Denominator denominator) {
    const Index support = x.rows() - lag;
    const double denom =
        denominator == Denominator::N ? static_cast<double>(x.rows()) : static_cast<double>(support);
    Matrix c = x.bottomRows(support).transpose() * x.topRows(support);
    return symmetrize(c / denom);
}

}  // namespace detail

Matrix covariance(const SeriesMatrix& m, const EstimatorConfig& cfg) {
    if (m.rows() < 2) {
        throw Error(ErrorCode::InsufficientData, "covariance needs at least 2 rows");
    }
    Matrix c = detail::symmetrized_cross_moment(maybe_centered(m, cfg.center), 0, Denominator::N);
    c.diagonal().array() += resolve_ridge(cfg, c);
    return c;
}

Matrix lagged_autocovariance(const SeriesMatrix& m, const EstimatorConfig& cfg) {
    check_lag(m.rows(), cfg.lag);
    return detail::symmetrized_cross_moment(maybe_centered(m, cfg.center), cfg.lag,
                                            cfg.denominator);
}

CovPair cov_pair(const SeriesMatrix& m, const EstimatorConfig& cfg) {
    check_lag(m.rows(), cfg.lag);
    const Matrix x = maybe_centered(m, cfg.center);
    const Index support = m.rows() - cfg.lag;

    CovPair pair;
    pair.lag = cfg.lag;
    pair.cT = detail::symmetrized_cross_moment(x, cfg.lag, cfg.denominator);
    if (cfg.denominator == Denominator::NminusLag) {
        const auto head = x.topRows(support);
        const auto tail = x.bottomRows(support);
        Matrix c0 = head.transpose() * head + tail.transpose() * tail;
        pair.c0 = symmetrize(c0 / (2.0 * static_cast<double>(support)));
        pair.sample_count = support;
    } else {
        pair.c0 = detail::symmetrized_cross_moment(x, 0, Denominator::N);
        pair.sample_count = m.rows();
    }
    pair.c0.diagonal().array() += resolve_ridge(cfg, pair.c0);

    Eigen::SelfAdjointEigenSolver<Matrix> es(pair.c0, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularCovariance, "eigenvalues of c0 could not be computed");
    }
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    const double floor = hi * 16.0 * std::numeric_limits<double>::epsilon() *
                         static_cast<double>(pair.c0.rows());
    if (!(lo > floor)) {
        throw Error(ErrorCode::SingularCovariance,
                    "smallest eigenvalue of c0 is " + std::to_string(lo) + " after ridge");
    }
    return pair;
}

double tail_moment(std::span<const double> u, int k) {
    check_k(k);
    if (u.empty()) throw Error(ErrorCode::InsufficientData, "empty series");
    double s = 0.0;
    for (double x : u) s += detail::ipow(x, 2 * k);
    return s / (2.0 * k * static_cast<double>(u.size()));
}

double tail_autocorrelation(std::span<const double> u, int k, int lag) {
    check_k(k);
    check_lag(static_cast<Index>(u.size()), lag);
    const std::size_t support = u.size() - static_cast<std::size_t>(lag);
    double s = 0.0;
    for (std::size_t t = 0; t < support; ++t) {
        s += detail::ipow(u[t], 2 * k - 1) * u[t + static_cast<std::size_t>(lag)];
    }
    return s / static_cast<double>(support);
}

double normalized_tail_autocorrelation(std::span<const double> u, int k, int lag) {
    check_k(k);
    check_lag(static_cast<Index>(u.size()), lag);
    const std::size_t support = u.size() - static_cast<std::size_t>(lag);
    double cross = 0.0;
    double moment = 0.0;
    for (std::size_t t = 0; t < support; ++t) {
        const double a = u[t];
        const double b = u[t + static_cast<std::size_t>(lag)];
        cross += detail::ipow(a, 2 * k - 1) * b;
        moment += detail::ipow(a, 2 * k) + detail::ipow(b, 2 * k);
    }
    if (moment == 0.0) return 0.0;
    return cross / (0.5 * moment);
}

double tail_moment(const SeriesMatrix& m, const Vector& w, int k) {
    const Vector u = project(m, w);
    return tail_moment(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())), k);
}

double tail_autocorrelation(const SeriesMatrix& m, const Vector& w, int k, int lag) {
    const Vector u = project(m, w);
    return tail_autocorrelation(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())),
                                k, lag);
}

}  // namespace tica
