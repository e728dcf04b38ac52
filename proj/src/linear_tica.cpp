#include "tica/linear_tica.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tica {

namespace {

constexpr double kLowerClamp = -1.0 + 1e-12;

bool lexicographically_less(const Matrix& w, Index a, Index b) {
    for (Index j = 0; j < w.cols(); ++j) {
        if (w(a, j) < w(b, j)) return true;
        if (w(a, j) > w(b, j)) return false;
    }
    return false;
}

}  // namespace

GevSolution solve_gev(const CovPair& pair) {
    const Index n = pair.c0.rows();
    if (pair.c0.cols() != n || pair.cT.rows() != n || pair.cT.cols() != n) {
        throw Error(ErrorCode::ShapeMismatch, "c0 and cT must be square and of equal size");
    }
    Eigen::LLT<Matrix> llt(pair.c0);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization of c0 failed");
    }
    const auto L = llt.matrixL();

    // B = L^-1 cT L^-T
    Matrix tmp = L.solve(pair.cT);
    Matrix b = L.solve(tmp.transpose());
    b = 0.5 * (b + b.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> es(b);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::EigenNoConvergence,
                    "symmetric eigensolver did not converge (n=" + std::to_string(n) + ")");
    }

    // w = L^-T v, stored as rows.
    Matrix vectors = L.transpose().solve(es.eigenvectors()).transpose();
    vectors = canonicalize_signs(vectors);

    Decomposition d;
    d.weights = vectors;
    d.lambdas = es.eigenvalues();
    d.normalized_lambdas = d.lambdas;
    d.timescales = Vector::Zero(n);
    d.timescale_warnings.assign(static_cast<std::size_t>(n), false);
    sort_components(d);

    GevSolution sol;
    sol.eigenvalues = d.lambdas;
    sol.eigenvectors = d.weights;
    sol.residual_norms.resize(n);
    for (Index i = 0; i < n; ++i) {
        const Vector w = sol.eigenvectors.row(i).transpose();
        sol.residual_norms(i) = (pair.cT * w - sol.eigenvalues(i) * (pair.c0 * w)).norm();
    }
    return sol;
}

double timescale(double lambda, int lag) {
    if (lambda >= 1.0) return std::numeric_limits<double>::infinity();
    const double l = std::max(lambda, kLowerClamp);
    return -2.0 * static_cast<double>(lag) / (l - 1.0);
}

Timescales timescales(const Vector& lambdas, int lag) {
    Timescales out;
    out.values.resize(lambdas.size());
    out.warnings.resize(static_cast<std::size_t>(lambdas.size()));
    for (Index i = 0; i < lambdas.size(); ++i) {
        out.values(i) = timescale(lambdas(i), lag);
        out.warnings[static_cast<std::size_t>(i)] = lambdas(i) > 1.0;
    }
    return out;
}

double beta_from_lambda(double lambda, int lag) { return 2.0 * lag * lambda - 1.0; }

double lambda_from_beta(double beta, int lag) { return (1.0 + beta) / (2.0 * lag); }

LagrangeScalars linear_scalars(double lambda, int lag) {
    return {beta_from_lambda(lambda, lag), lambda, lag};
}

void sort_components(Decomposition& d) {
    const Index n = d.lambdas.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (d.lambdas(a) != d.lambdas(b)) return d.lambdas(a) > d.lambdas(b);
        return lexicographically_less(d.weights, a, b);
    });

    Decomposition sorted = d;
    for (Index i = 0; i < n; ++i) {
        const Index src = order[static_cast<std::size_t>(i)];
        sorted.weights.row(i) = d.weights.row(src);
        sorted.lambdas(i) = d.lambdas(src);
        sorted.normalized_lambdas(i) = d.normalized_lambdas(src);
        sorted.timescales(i) = d.timescales(src);
        sorted.timescale_warnings[static_cast<std::size_t>(i)] =
            d.timescale_warnings[static_cast<std::size_t>(src)];
    }
    d = std::move(sorted);
}

Decomposition fit_linear(const SeriesMatrix& m, const EstimatorConfig& cfg) {
    const SeriesMatrix valid = validate_series(m);
    const CovPair pair = cov_pair(valid, cfg);
    const GevSolution sol = solve_gev(pair);

    Decomposition d;
    d.weights = sol.eigenvectors;
    d.lambdas = sol.eigenvalues;
    d.normalized_lambdas = sol.eigenvalues;
    const Timescales ts = timescales(sol.eigenvalues, cfg.lag);
    d.timescales = ts.values;
    d.timescale_warnings = ts.warnings;
    d.lag = cfg.lag;
    d.order_k = 1;
    d.method = Method::LinearTica;
    d.fit_window = full_window(valid);
    return d;
}

double orthonormality_error(const Matrix& weights, const Matrix& c0) {
    const Matrix g = weights * c0 * weights.transpose();
    return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace tica
