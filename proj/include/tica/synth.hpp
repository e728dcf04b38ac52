// Synthetic multiscale panels with known ground truth.
//
// Latent components follow s_{i,t+1} = phi_i s_{i,t} + sigma_i e_{i,t} and
// the observed rows are x_t = A s_t. Student-t innovations are rescaled to
// unit variance so that the linear autocorrelation structure does not depend
// on the innovation law.

#pragma once

#include "tica/core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tica {

struct Innovation {
    enum class Law { Gaussian, StudentT };
    Law law = Law::Gaussian;
    double dof = 0.0;  // StudentT only, must exceed 2

    static Innovation gaussian() { return {}; }
    static Innovation student_t(double dof) { return {Law::StudentT, dof}; }

    std::string to_string() const;
    static Innovation parse(const std::string& s);  // "gaussian", "t3", "t4.5"
};

/// From row `at` onward the latents evolve with `phis` instead.
struct RegimeChange {
    Index at = 0;
    std::vector<double> phis;
};

struct SynthSpec {
    std::vector<double> phis;
    std::vector<Innovation> innovations;  // empty: all Gaussian
    Matrix mixing;                        // empty: identity
    Index length = 10000;
    std::uint64_t seed = 0;
    std::vector<double> scales;  // empty: all 1
    int lag = 1;                 // lag at which ground-truth autocorrelations are reported
    Timestamp start_timestamp = 0;
    std::optional<RegimeChange> regime_change;

    Index n_components() const { return static_cast<Index>(phis.size()); }
};

struct GroundTruth {
    Matrix latents;             // T x n
    Matrix mixing;              // A
    Matrix unmixing;            // A^-1, row i recovers latent i
    Vector autocorrelations;    // phi_i^lag
    Vector timescales;          // -2 lag / (phi_i^lag - 1)
    int lag = 1;
};

inline constexpr Index kBurnIn = 1000;
inline constexpr double kMaxMixingCondition = 1e6;

/// Deterministic under `spec.seed`. Throws BadSpec on invalid specs.
std::pair<SeriesMatrix, GroundTruth> generate(const SynthSpec& spec);

/// Seeded Gaussian n x n matrix, redrawn until its condition number is
/// below `max_condition`.
Matrix random_mixing(Index n, std::uint64_t seed, double max_condition = 100.0);

struct Alignment {
    std::vector<Index> permutation;  // recovered column i <-> truth column permutation[i]
    Vector scores;                   // |corr| of each matched pair, in [0, 1]
};

/// Greedy maximum-|correlation| matching between the columns of two T x m
/// matrices.
Alignment alignment_score(const Matrix& recovered, const Matrix& truth);

/// |Pearson correlation| of two equally long series; 0 if either is constant.
double abs_correlation(const Vector& a, const Vector& b);

}  // namespace tica
