// Batch command-line front end: fit, project, report, synth.
//
// Every flag has a JSON config key of the same name with '-' replaced by '_'.
// Flags given on the command line override keys from --config.

#pragma once

#include "tica/estimators.hpp"
#include "tica/ingest.hpp"
#include "tica/pipeline.hpp"
#include "tica/tail_tica.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tica::cli {

enum class Command { Fit, Project, Synth, Report };

struct RunConfig {
    Command command = Command::Fit;
    std::vector<std::string> inputs;
    std::string out = ".";

    // ingest
    std::string date_format = "%Y-%m-%d";
    MissingPolicy missing = MissingPolicy::DropRow;
    int max_gap = 1;
    SeriesKind kind = SeriesKind::Returns;
    std::optional<ReturnMode> returns;

    // method
    bool use_tail = false;
    std::optional<Index> components;  // unset: min(5, columns)
    std::optional<std::string> fit_start, fit_end, project_start, project_end;
    EstimatorConfig estimator;
    TailConfig tail;
    std::vector<std::string> decompositions;
    std::vector<std::string> ignored_tail_options;  // given together with the linear method

    // synth
    std::vector<double> phis;
    std::vector<std::string> innovations;
    std::string mixing = "random";
    Matrix mixing_matrix;  // from a config file only
    Index length = 10000;
    std::optional<Index> break_at;
    std::vector<double> phis_after;
    std::vector<double> scales;
    std::optional<std::string> start;

    std::uint64_t seed = 0;
};

inline constexpr Index kDefaultComponents = 5;

/// Parses argv-style arguments (without the program name), runs the command
/// and returns the process exit code: 0 ok, 2 config, 3 data, 4 numerical.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs an already resolved configuration. Throws tica::Error.
void execute(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int exit_code(ErrorKind kind);

}  // namespace tica::cli
