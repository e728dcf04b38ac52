// JSON, CSV and SVG artifacts for decompositions, projection reports,
// synthetic fixtures and method comparisons.
//
// Non-finite numbers are written as the strings "inf", "-inf" and "nan".
// All output is a pure function of its inputs: no wall-clock data, stable
// key order and shortest round-trip number formatting.

#pragma once

#include "tica/core.hpp"
#include "tica/estimators.hpp"
#include "tica/pipeline.hpp"
#include "tica/synth.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace tica {

using Json = nlohmann::ordered_json;

/// A decomposition as stored on disk, with what is needed to reuse it.
struct DecompositionArtifact {
    Decomposition decomposition;
    std::vector<std::string> labels;
    EstimatorConfig estimator;
    Index selected = 0;
};

Json number_to_json(double x);
double number_from_json(const Json& j);

Json decomposition_to_json(const DecompositionArtifact& a, const std::string& date_format);
DecompositionArtifact decomposition_from_json(const Json& j, const std::string& date_format);
DecompositionArtifact load_decomposition(const std::string& path, const std::string& date_format);

Json report_to_json(const ProjectionReport& r, const std::vector<std::string>& labels,
                    const std::string& date_format);

/// Component series over the full period; the fit window is shaded.
std::string component_svg(const ProjectionReport& r, Index component);

/// Component series (values * gross weights) as a panel.
SeriesMatrix component_panel(const ProjectionReport& r);

Json ground_truth_to_json(const SynthSpec& spec, const GroundTruth& truth);

struct Comparison {
    Matrix weight_cosine;       // |cos| between rows of the two weight matrices
    Matrix series_correlation;  // |corr| between component series on the panel
    Alignment match;            // left component i <-> right component match.permutation[i]
    Vector matched_cosine;
};

/// Compares the first m components of two decompositions of the same panel.
Comparison compare_decompositions(const SeriesMatrix& panel, const Decomposition& left,
                                  const Decomposition& right, Index m);

Json comparison_to_json(const Comparison& c, const Decomposition& left, const Decomposition& right);
std::string comparison_table(const Comparison& c, const Decomposition& left,
                             const Decomposition& right);

}  // namespace tica
