#include "tica/tail_tica.hpp"

#include "tica/linear_tica.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <random>

namespace tica {

namespace {

constexpr double kDegenerateNorm = 1e-14;

std::uint64_t attempt_seed(std::uint64_t seed, int attempt) {
    return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt + 1));
}

void check_config(const EstimatorConfig& est, const TailConfig& cfg) {
    if (cfg.k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    if (!(cfg.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
    if (cfg.max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
    if (cfg.restarts < 0) throw Error(ErrorCode::InvalidArgument, "restarts must be >= 0");
    if (est.lag != cfg.lag) {
        throw Error(ErrorCode::InvalidArgument, "estimator lag " + std::to_string(est.lag) +
                                                    " differs from tail lag " +
                                                    std::to_string(cfg.lag));
    }
}

double sine_to(const Vector& unit_update, const Vector& w) {
    return (unit_update - unit_update.dot(w) * w).norm();
}

struct Solved {
    Matrix white_weights;
    bool converged = false;
    Index worst_component = 0;
};

Solved solve_deflation(const SeriesMatrix& z, const TailConfig& cfg) {
    const Index n = z.cols();
    Solved out;
    out.white_weights = Matrix::Zero(n, n);

    for (Index i = 0; i < n; ++i) {
        bool found = false;
        for (int attempt = 0; attempt <= cfg.restarts && !found; ++attempt) {
            const Matrix q = random_orthogonal(n, attempt_seed(cfg.seed, attempt));
            TailIterate it;
            it.w = q.row(i).transpose();
            for (Index j = 0; j < i; ++j) {
                const Vector p = out.white_weights.row(j).transpose();
                it.w -= it.w.dot(p) * p;
            }
            if (it.w.norm() < 1e-8) continue;
            it.w.normalize();

            for (it.iter = 1; it.iter <= cfg.max_iters; ++it.iter) {
                Vector f = tail_update(z, it.w, cfg.k, cfg.lag);
                for (Index j = 0; j < i; ++j) {
                    const Vector p = out.white_weights.row(j).transpose();
                    f -= f.dot(p) * p;
                }
                const double norm = f.norm();
                if (norm < kDegenerateNorm) break;
                f /= norm;
                it.residual = sine_to(f, it.w);
                if (f.dot(it.w) < 0.0) f = -f;
                it.delta = 1.0 - std::abs(f.dot(it.w));
                it.w = f;
                if (it.residual < cfg.tol) {
                    it.converged = true;
                    break;
                }
            }
            if (it.converged) {
                out.white_weights.row(i) = it.w.transpose();
                found = true;
            }
        }
        if (!found) {
            out.worst_component = i;
            return out;
        }
    }
    out.converged = true;
    return out;
}

Solved solve_parallel(const SeriesMatrix& z, const TailConfig& cfg) {
    const Index n = z.cols();
    const Vector weights = parallel_ordering_weights(n);
    Solved out;

    // Converged when the symmetric-decorrelation map leaves every row in
    // place: a stationary point of sum_i c_i J(w_i) on the orthogonal group.
    for (int attempt = 0; attempt <= cfg.restarts; ++attempt) {
        Matrix w = random_orthogonal(n, attempt_seed(cfg.seed, attempt));
        for (int iter = 1; iter <= cfg.max_iters; ++iter) {
            Matrix g(n, n);
            for (Index i = 0; i < n; ++i) {
                g.row(i) = weights(i) * tail_update(z, w.row(i).transpose(), cfg.k, cfg.lag).transpose();
            }
            const Matrix next = matrix_inv_sqrt(g * g.transpose()) * g;
            double worst = 0.0;
            Index worst_row = 0;
            for (Index i = 0; i < n; ++i) {
                const double r = sine_to(next.row(i).transpose(), w.row(i).transpose());
                if (r > worst) {
                    worst = r;
                    worst_row = i;
                }
            }
            out.worst_component = worst_row;
            w = next;
            if (worst < cfg.tol) {
                out.white_weights = w;
                out.converged = true;
                return out;
            }
        }
    }
    return out;
}

}  // namespace

// With equal weights every orthonormal basis is a fixed point when k = 1;
// distinct weights leave only isolated stationary points and order them.
// Spread is capped at 2^10 so the decorrelation stays well conditioned.
Vector parallel_ordering_weights(Index n) {
    Vector c(n);
    const double step = n > 1 ? std::min(1.0, 10.0 / static_cast<double>(n - 1)) : 1.0;
    for (Index i = 0; i < n; ++i) c(i) = std::exp2(-step * static_cast<double>(i));
    return c;
}

Matrix random_orthogonal(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) g(i, j) = normal(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return q;
}

Matrix matrix_inv_sqrt(const Matrix& s) {
    if (s.rows() != s.cols()) throw Error(ErrorCode::ShapeMismatch, "matrix must be square");
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::NotPositiveDefinite, "eigendecomposition failed");
    }
    const Vector d = es.eigenvalues();
    if (!(d.minCoeff() > 0.0)) {
        throw Error(ErrorCode::NotPositiveDefinite,
                    "smallest eigenvalue is " + std::to_string(d.minCoeff()));
    }
    const Matrix& v = es.eigenvectors();
    Matrix m = v * d.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
    return 0.5 * (m + m.transpose());
}

SeriesMatrix whiten(const SeriesMatrix& m, const CovPair& pair) {
    if (pair.c0.rows() != m.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "covariance size does not match panel");
    }
    SeriesMatrix out = m;
    out.values = m.values * matrix_inv_sqrt(pair.c0);
    return out;
}

Vector tail_update(const SeriesMatrix& mw, const Vector& w, int k, int lag) {
    check_lag(mw.rows(), lag);
    const Index support = mw.rows() - lag;
    const Vector u = project(mw, w);
    const int odd = 2 * k - 1;

    Vector head_coeff(support);
    Vector tail_coeff(support);
    double even_sum = 0.0;
    for (Index t = 0; t < support; ++t) {
        const double a = u(t);
        const double b = u(t + lag);
        const double a_even = detail::ipow(a, 2 * k - 2);
        const double b_even = detail::ipow(b, 2 * k - 2);
        head_coeff(t) = odd * a_even * b + b_even * b;
        tail_coeff(t) = a_even * a + odd * b_even * a;
        even_sum += a_even + b_even;
    }
    const double s = static_cast<double>(support);
    const Vector grad = 0.5 *
                        (mw.values.topRows(support).transpose() * head_coeff +
                         mw.values.bottomRows(support).transpose() * tail_coeff) /
                        s;
    const double alpha = 2.0 * k * odd * 0.5 * even_sum / s;
    return grad + alpha * w;
}

double stationarity_residual(const SeriesMatrix& mw, const Vector& w, int k, int lag) {
    const Vector f = tail_update(mw, w, k, lag);
    const double norm = f.norm();
    if (norm < kDegenerateNorm) return 1.0;
    return sine_to(f / norm, w);
}

Vector tail_step_deflation(const SeriesMatrix& mw, const Vector& w, int k, int lag) {
    Vector f = tail_update(mw, w, k, lag);
    const double norm = f.norm();
    if (norm < kDegenerateNorm) {
        throw Error(ErrorCode::DegenerateUpdate, "update norm " + std::to_string(norm));
    }
    f /= norm;
    if (f.dot(w) < 0.0) f = -f;
    return f;
}

LagrangeScalars tail_beta(const SeriesMatrix& m, const Vector& w, int k, int lag) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    check_lag(m.rows(), lag);
    const Vector u = project(m, w);
    const Index support = m.rows() - lag;
    double drift = 0.0;
    for (Index t = 0; t < support; ++t) {
        drift += detail::ipow(u(t), 2 * k - 1) * (u(t + lag) - u(t)) / static_cast<double>(lag);
    }
    LagrangeScalars out;
    out.lag = lag;
    out.beta = 2.0 * k * drift / static_cast<double>(support);
    out.lambda = tail_autocorrelation(
        std::span<const double>(u.data(), static_cast<std::size_t>(u.size())), k, lag);
    return out;
}

Decomposition tail_solve(const SeriesMatrix& m, const EstimatorConfig& est, const TailConfig& cfg) {
    check_config(est, cfg);
    const SeriesMatrix valid = validate_series(m);
    const CovPair pair = cov_pair(valid, est);

    SeriesMatrix x = valid;
    if (est.center) x.values = centered(valid.values);
    const Matrix inv_sqrt = matrix_inv_sqrt(pair.c0);
    SeriesMatrix z = x;
    z.values = x.values * inv_sqrt;

    const Solved solved =
        cfg.mode == TailMode::Deflation ? solve_deflation(z, cfg) : solve_parallel(z, cfg);
    if (!solved.converged) {
        throw Error(ErrorCode::NoConvergence,
                    "component " + std::to_string(solved.worst_component) + " after " +
                        std::to_string(cfg.max_iters) + " iterations and " +
                        std::to_string(cfg.restarts) + " restarts");
    }

    const Index n = valid.cols();
    Decomposition d;
    d.weights = canonicalize_signs(solved.white_weights * inv_sqrt);
    d.lambdas.resize(n);
    d.normalized_lambdas.resize(n);
    for (Index i = 0; i < n; ++i) {
        const Vector u = x.values * d.weights.row(i).transpose();
        const std::span<const double> s(u.data(), static_cast<std::size_t>(u.size()));
        d.lambdas(i) = tail_autocorrelation(s, cfg.k, cfg.lag);
        d.normalized_lambdas(i) = normalized_tail_autocorrelation(s, cfg.k, cfg.lag);
    }
    d.timescales = Vector::Zero(n);
    d.timescale_warnings.assign(static_cast<std::size_t>(n), false);
    sort_components(d);

    const Timescales ts = timescales(d.normalized_lambdas, cfg.lag);
    d.timescales = ts.values;
    d.timescale_warnings = ts.warnings;
    d.lag = cfg.lag;
    d.order_k = cfg.k;
    d.method = cfg.mode == TailMode::Deflation ? Method::TailDeflation : Method::TailParallel;
    d.fit_window = full_window(valid);
    return d;
}

}  // namespace tica
