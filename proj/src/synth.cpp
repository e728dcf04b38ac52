#include "tica/synth.hpp"

#include "tica/linear_tica.hpp"

#include <Eigen/SVD>

#include <charconv>
#include <cmath>
#include <random>

namespace tica {

namespace {

double condition_number(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector& s = svd.singularValues();
    if (s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / s(s.size() - 1);
}

void check_phis(const std::vector<double>& phis, const char* what) {
    for (double p : phis) {
        if (!(std::abs(p) < 1.0)) {
            throw Error(ErrorCode::BadSpec,
                        std::string(what) + " coefficient " + std::to_string(p) + " not in (-1, 1)");
        }
    }
}

}  // namespace

std::string Innovation::to_string() const {
    if (law == Law::Gaussian) return "gaussian";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, dof);
    return "t" + std::string(buf, res.ptr);
}

Innovation Innovation::parse(const std::string& s) {
    if (s == "gaussian" || s == "normal") return gaussian();
    if (s.size() > 1 && s[0] == 't') {
        double dof = 0.0;
        const char* first = s.data() + 1;
        const char* last = s.data() + s.size();
        auto res = std::from_chars(first, last, dof);
        if (res.ec == std::errc{} && res.ptr == last) return student_t(dof);
    }
    throw Error(ErrorCode::BadSpec, "unknown innovation law '" + s + "'");
}

std::pair<SeriesMatrix, GroundTruth> generate(const SynthSpec& spec) {
    const Index n = spec.n_components();
    if (n < 1) throw Error(ErrorCode::BadSpec, "at least one component required");
    if (spec.length < 2) throw Error(ErrorCode::BadSpec, "length must be >= 2");
    if (spec.lag < 1) throw Error(ErrorCode::BadSpec, "lag must be >= 1");
    check_phis(spec.phis, "AR");

    std::vector<Innovation> innovations = spec.innovations;
    if (innovations.empty()) innovations.assign(static_cast<std::size_t>(n), Innovation::gaussian());
    std::vector<double> scales = spec.scales;
    if (scales.empty()) scales.assign(static_cast<std::size_t>(n), 1.0);
    if (static_cast<Index>(innovations.size()) != n || static_cast<Index>(scales.size()) != n) {
        throw Error(ErrorCode::BadSpec, "innovations and scales must have one entry per component");
    }
    for (const auto& inn : innovations) {
        if (inn.law == Innovation::Law::StudentT && !(inn.dof > 2.0)) {
            throw Error(ErrorCode::BadSpec, "Student-t dof must exceed 2 for finite variance");
        }
    }
    for (double s : scales) {
        if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::BadSpec, "scales must be positive");
    }

    Matrix mixing = spec.mixing.size() == 0 ? Matrix::Identity(n, n) : spec.mixing;
    if (mixing.rows() != n || mixing.cols() != n) {
        throw Error(ErrorCode::BadSpec, "mixing must be n x n");
    }
    const double cond = condition_number(mixing);
    if (!(cond < kMaxMixingCondition)) {
        throw Error(ErrorCode::BadSpec, "mixing condition number " + std::to_string(cond) +
                                            " exceeds 1e6");
    }

    std::vector<double> phis_after = spec.phis;
    Index change_at = spec.length;
    if (spec.regime_change) {
        if (static_cast<Index>(spec.regime_change->phis.size()) != n) {
            throw Error(ErrorCode::BadSpec, "regime change needs one coefficient per component");
        }
        check_phis(spec.regime_change->phis, "post-change AR");
        if (spec.regime_change->at < 0 || spec.regime_change->at > spec.length) {
            throw Error(ErrorCode::BadSpec, "regime change row out of range");
        }
        phis_after = spec.regime_change->phis;
        change_at = spec.regime_change->at;
    }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::student_t_distribution<double>> student;
    std::vector<double> t_scale;
    for (const auto& inn : innovations) {
        const double dof = inn.law == Innovation::Law::StudentT ? inn.dof : 3.0;
        student.emplace_back(dof);
        t_scale.push_back(std::sqrt((dof - 2.0) / dof));
    }

    auto draw = [&](Index i) {
        const auto k = static_cast<std::size_t>(i);
        if (innovations[k].law == Innovation::Law::Gaussian) return normal(rng);
        return student[k](rng) * t_scale[k];
    };

    Vector state = Vector::Zero(n);
    for (Index t = 0; t < kBurnIn; ++t) {
        for (Index i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            state(i) = spec.phis[k] * state(i) + scales[k] * draw(i);
        }
    }

    GroundTruth truth;
    truth.latents.resize(spec.length, n);
    for (Index t = 0; t < spec.length; ++t) {
        const std::vector<double>& phis = t < change_at ? spec.phis : phis_after;
        for (Index i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            state(i) = phis[k] * state(i) + scales[k] * draw(i);
        }
        truth.latents.row(t) = state.transpose();
    }

    truth.mixing = mixing;
    truth.unmixing = mixing.inverse();
    truth.lag = spec.lag;
    truth.autocorrelations.resize(n);
    truth.timescales.resize(n);
    for (Index i = 0; i < n; ++i) {
        const double rho = std::pow(spec.phis[static_cast<std::size_t>(i)], spec.lag);
        truth.autocorrelations(i) = rho;
        truth.timescales(i) = timescale(rho, spec.lag);
    }

    SeriesMatrix panel;
    panel.values = truth.latents * mixing.transpose();
    panel.timestamps.resize(static_cast<std::size_t>(spec.length));
    for (Index t = 0; t < spec.length; ++t) {
        panel.timestamps[static_cast<std::size_t>(t)] = spec.start_timestamp + t;
    }
    for (Index i = 0; i < n; ++i) panel.labels.push_back("x" + std::to_string(i));
    panel.kind = SeriesKind::Returns;
    return {std::move(panel), std::move(truth)};
}

Matrix random_mixing(Index n, std::uint64_t seed, double max_condition) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
        Matrix a(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) a(i, j) = normal(rng);
        }
        if (condition_number(a) < max_condition) return a;
    }
}

double abs_correlation(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "series lengths differ");
    const Vector ac = a.array() - a.mean();
    const Vector bc = b.array() - b.mean();
    const double den = ac.norm() * bc.norm();
    if (den == 0.0) return 0.0;
    return std::min(1.0, std::abs(ac.dot(bc)) / den);
}

Alignment alignment_score(const Matrix& recovered, const Matrix& truth) {
    if (recovered.rows() != truth.rows() || recovered.cols() != truth.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "recovered and truth sets must have equal shape");
    }
    const Index m = recovered.cols();
    Matrix corr(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) {
            corr(i, j) = abs_correlation(recovered.col(i), truth.col(j));
        }
    }

    Alignment out;
    out.permutation.assign(static_cast<std::size_t>(m), -1);
    out.scores = Vector::Zero(m);
    std::vector<bool> row_used(static_cast<std::size_t>(m), false);
    std::vector<bool> col_used(static_cast<std::size_t>(m), false);
    for (Index round = 0; round < m; ++round) {
        Index bi = -1;
        Index bj = -1;
        double best = -1.0;
        for (Index i = 0; i < m; ++i) {
            if (row_used[static_cast<std::size_t>(i)]) continue;
            for (Index j = 0; j < m; ++j) {
                if (col_used[static_cast<std::size_t>(j)]) continue;
                if (corr(i, j) > best) {
                    best = corr(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        row_used[static_cast<std::size_t>(bi)] = true;
        col_used[static_cast<std::size_t>(bj)] = true;
        out.permutation[static_cast<std::size_t>(bi)] = bj;
        out.scores(bi) = best;
    }
    return out;
}

}  // namespace tica
