#include "tica/cli.hpp"

#include "tica/linear_tica.hpp"
#include "tica/report_io.hpp"
#include "tica/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

namespace tica::cli {

namespace {

namespace fs = std::filesystem;

enum class Type { String, Int, Double, Bool, StringList, DoubleList };

constexpr unsigned kFit = 1, kProject = 2, kReport = 4, kSynth = 8;
constexpr unsigned kMethod = kFit | kProject | kReport;
constexpr unsigned kAll = kMethod | kSynth;

struct OptionDef {
    const char* flag;
    Type type;
    unsigned groups;
    const char* help;
    const char* default_text;
};

// clang-format off
const OptionDef kOptions[] = {
    {"input",         Type::StringList, kMethod,  "input CSV panel(s); several are inner-joined on date", ""},
    {"config",        Type::String,     kAll,     "JSON config file; command-line flags take precedence", ""},
    {"out",           Type::String,     kAll,     "output directory", "."},
    {"seed",          Type::Int,        kAll,     "seed for every random draw", "0"},
    {"date-format",   Type::String,     kAll,     "date pattern (%Y %m %d %H %M %S) or 'ordinal'", "%Y-%m-%d"},
    {"missing",       Type::String,     kMethod,  "missing cells: drop | ffill | error", "drop"},
    {"max-gap",       Type::Int,        kMethod,  "longest run forward-filled per column", "1"},
    {"kind",          Type::String,     kMethod,  "input series kind: returns | prices", "returns"},
    {"returns",       Type::String,     kMethod,  "convert prices to returns: log | simple", "none"},
    {"method",        Type::String,     kMethod,  "linear | tail", "linear"},
    {"k",             Type::Int,        kMethod,  "tail order (tail method)", "4"},
    {"lag",           Type::Int,        kAll,     "lag T in rows", "1"},
    {"components",    Type::Int,        kMethod,  "number of slowest components kept", "5, capped at the panel width"},
    {"fit-start",     Type::String,     kMethod,  "fit window start (inclusive)", "first date"},
    {"fit-end",       Type::String,     kMethod,  "fit window end (exclusive)", "after last date"},
    {"project-start", Type::String,     kProject, "projection window start (inclusive)", "fit end"},
    {"project-end",   Type::String,     kProject, "projection window end (exclusive)", "after last date"},
    {"center",        Type::Bool,       kMethod,  "subtract window means", "true"},
    {"ridge",         Type::Double,     kMethod,  "ridge added to C(0)", "1e-10 * trace(C0) / n"},
    {"denominator",   Type::String,     kMethod,  "n | n-lag", "n-lag"},
    {"tol",           Type::Double,     kMethod,  "tail convergence tolerance", "1e-10"},
    {"max-iters",     Type::Int,        kMethod,  "tail iterations per component", "2000"},
    {"restarts",      Type::Int,        kMethod,  "tail restarts on non-convergence", "8"},
    {"mode",          Type::String,     kMethod,  "tail solver: deflation | parallel", "deflation"},
    {"decomposition", Type::StringList, kProject | kReport, "fitted decomposition.json artifact(s)", ""},
    {"phis",          Type::DoubleList, kSynth,   "AR(1) coefficients, one per latent", ""},
    {"innovations",   Type::StringList, kSynth,   "gaussian | t<dof>, one per latent or one for all", "gaussian"},
    {"mixing",        Type::String,     kSynth,   "random | identity", "random"},
    {"length",        Type::Int,        kSynth,   "rows to generate", "10000"},
    {"break-at",      Type::Int,        kSynth,   "row where the coefficients switch to --phis-after", ""},
    {"phis-after",    Type::DoubleList, kSynth,   "AR(1) coefficients after the break", ""},
    {"scales",        Type::DoubleList, kSynth,   "innovation scales", "1"},
    {"start",         Type::String,     kSynth,   "first date of the generated panel", "2000-01-03"},
};
// clang-format on

const char* kTailKeys[] = {"k", "tol", "max_iters", "restarts", "mode"};

std::string key_of(const char* flag) {
    std::string k = flag;
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

const OptionDef* find_key(const std::string& key) {
    for (const auto& d : kOptions) {
        if (key_of(d.flag) == key) return &d;
    }
    return nullptr;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& detail) {
    throw Error(ErrorCode::InvalidArgument, key + ": " + detail);
}

double parse_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) bad_value(key, "not a number: '" + s + "'");
    return v;
}

long long parse_int(const std::string& key, const std::string& s) {
    long long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) bad_value(key, "not an integer: '" + s + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad_value(key, "not a boolean: '" + s + "'");
}

Json typed_value(const OptionDef& d, const std::vector<std::string>& raw) {
    const std::string key = key_of(d.flag);
    switch (d.type) {
        case Type::String: return raw.back();
        case Type::Int: return parse_int(key, raw.back());
        case Type::Double: return parse_double(key, raw.back());
        case Type::Bool: return parse_bool(key, raw.back());
        case Type::StringList: return raw;
        case Type::DoubleList: {
            Json arr = Json::array();
            for (const auto& s : raw) arr.push_back(parse_double(key, s));
            return arr;
        }
    }
    return nullptr;
}

// Typed access to the merged configuration.
class Settings {
public:
    explicit Settings(Json j) : j_(std::move(j)) {}

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    std::string str(const std::string& key, const std::string& def) const {
        if (!has(key)) return def;
        if (!j_.at(key).is_string()) bad_value(key, "expected a string");
        return j_.at(key).get<std::string>();
    }
    long long integer(const std::string& key, long long def) const {
        if (!has(key)) return def;
        const Json& v = j_.at(key);
        if (!v.is_number_integer()) bad_value(key, "expected an integer");
        return v.get<long long>();
    }
    double number(const std::string& key, double def) const {
        if (!has(key)) return def;
        const Json& v = j_.at(key);
        if (!v.is_number()) bad_value(key, "expected a number");
        return v.get<double>();
    }
    bool boolean(const std::string& key, bool def) const {
        if (!has(key)) return def;
        if (!j_.at(key).is_boolean()) bad_value(key, "expected true or false");
        return j_.at(key).get<bool>();
    }
    std::vector<std::string> strings(const std::string& key) const {
        if (!has(key)) return {};
        const Json& v = j_.at(key);
        if (v.is_string()) return {v.get<std::string>()};
        if (!v.is_array()) bad_value(key, "expected a list of strings");
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) bad_value(key, "expected a list of strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    }
    std::vector<double> numbers(const std::string& key) const {
        if (!has(key)) return {};
        const Json& v = j_.at(key);
        if (v.is_number()) return {v.get<double>()};
        if (!v.is_array()) bad_value(key, "expected a list of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) bad_value(key, "expected a list of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
    const Json& raw(const std::string& key) const { return j_.at(key); }

private:
    Json j_;
};

Json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, "config '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "config '" + path + "' is not an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "config" || !find_key(key)) {
            throw Error(ErrorCode::InvalidArgument, "config '" + path + "': unknown key '" + key + "'");
        }
    }
    return j;
}

template <typename E>
E pick(const std::string& key, const std::string& value,
       std::initializer_list<std::pair<const char*, E>> choices) {
    for (const auto& [name, e] : choices) {
        if (value == name) return e;
    }
    std::string allowed;
    for (const auto& c : choices) allowed += std::string(allowed.empty() ? "" : "|") + c.first;
    bad_value(key, "'" + value + "' is not one of " + allowed);
}

RunConfig resolve(Command command, const Settings& s) {
    RunConfig c;
    c.command = command;
    c.inputs = s.strings("input");
    c.out = s.str("out", ".");
    const long long seed = s.integer("seed", 0);
    if (seed < 0) bad_value("seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);

    c.date_format = s.str("date_format", c.date_format);
    if (c.date_format.empty()) bad_value("date_format", "empty pattern");
    c.missing = pick<MissingPolicy>("missing", s.str("missing", "drop"),
                                    {{"drop", MissingPolicy::DropRow},
                                     {"ffill", MissingPolicy::ForwardFill},
                                     {"error", MissingPolicy::Error}});
    c.max_gap = static_cast<int>(s.integer("max_gap", 1));
    if (c.max_gap < 1) bad_value("max_gap", "must be at least 1");
    c.kind = pick<SeriesKind>("kind", s.str("kind", "returns"),
                              {{"returns", SeriesKind::Returns}, {"prices", SeriesKind::Prices}});
    const std::string returns = s.str("returns", "none");
    if (returns != "none") {
        c.returns = pick<ReturnMode>("returns", returns, {{"log", ReturnMode::Log}, {"simple", ReturnMode::Simple}});
        if (c.kind != SeriesKind::Prices) bad_value("returns", "conversion needs --kind prices");
    }

    c.use_tail = pick<bool>("method", s.str("method", "linear"), {{"linear", false}, {"tail", true}});
    if (s.has("components")) {
        c.components = s.integer("components", kDefaultComponents);
        if (*c.components < 1) bad_value("components", "must be at least 1");
    }
    if (s.has("fit_start")) c.fit_start = s.str("fit_start", "");
    if (s.has("fit_end")) c.fit_end = s.str("fit_end", "");
    if (s.has("project_start")) c.project_start = s.str("project_start", "");
    if (s.has("project_end")) c.project_end = s.str("project_end", "");

    const long long lag = s.integer("lag", 1);
    if (lag < 1) bad_value("lag", "must be at least 1");
    c.estimator.lag = static_cast<int>(lag);
    c.estimator.center = s.boolean("center", true);
    if (s.has("ridge")) {
        c.estimator.ridge = s.number("ridge", 0.0);
        if (!(*c.estimator.ridge >= 0.0)) bad_value("ridge", "must be non-negative");
    }
    c.estimator.denominator = pick<Denominator>(
        "denominator", s.str("denominator", "n-lag"), {{"n", Denominator::N}, {"n-lag", Denominator::NminusLag}});

    c.tail.lag = c.estimator.lag;
    c.tail.k = static_cast<int>(s.integer("k", c.tail.k));
    if (c.tail.k < 1) bad_value("k", "must be at least 1");
    c.tail.tol = s.number("tol", c.tail.tol);
    if (!(c.tail.tol > 0.0)) bad_value("tol", "must be positive");
    c.tail.max_iters = static_cast<int>(s.integer("max_iters", c.tail.max_iters));
    if (c.tail.max_iters < 1) bad_value("max_iters", "must be at least 1");
    c.tail.restarts = static_cast<int>(s.integer("restarts", c.tail.restarts));
    if (c.tail.restarts < 0) bad_value("restarts", "must be non-negative");
    c.tail.mode = pick<TailMode>("mode", s.str("mode", "deflation"),
                                 {{"deflation", TailMode::Deflation}, {"parallel", TailMode::Parallel}});
    c.tail.seed = c.seed;
    if (!c.use_tail && command != Command::Report) {
        for (const char* key : kTailKeys) {
            if (s.has(key)) c.ignored_tail_options.push_back(key);
        }
    }
    c.decompositions = s.strings("decomposition");

    c.phis = s.numbers("phis");
    c.innovations = s.strings("innovations");
    if (s.has("mixing") && s.raw("mixing").is_array()) {
        const Json& m = s.raw("mixing");
        const Index rows = static_cast<Index>(m.size());
        c.mixing_matrix.resize(rows, rows);
        for (Index i = 0; i < rows; ++i) {
            const Json& row = m.at(static_cast<std::size_t>(i));
            if (!row.is_array() || static_cast<Index>(row.size()) != rows) bad_value("mixing", "expected a square matrix");
            for (Index j = 0; j < rows; ++j) {
                const Json& v = row.at(static_cast<std::size_t>(j));
                if (!v.is_number()) bad_value("mixing", "expected numbers");
                c.mixing_matrix(i, j) = v.get<double>();
            }
        }
        c.mixing = "matrix";
    } else {
        c.mixing = s.str("mixing", "random");
        if (c.mixing != "random" && c.mixing != "identity") bad_value("mixing", "'" + c.mixing + "' is not one of random|identity");
    }
    c.length = static_cast<Index>(s.integer("length", c.length));
    if (s.has("break_at")) c.break_at = static_cast<Index>(s.integer("break_at", 0));
    c.phis_after = s.numbers("phis_after");
    c.scales = s.numbers("scales");
    if (s.has("start")) c.start = s.str("start", "");
    return c;
}

// ---------------------------------------------------------------------------

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw Error(ErrorCode::Io, "cannot create output directory '" + dir.string() + "'");
    }
}

void write_json(const fs::path& path, const Json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

Timestamp parse_bound(const RunConfig& c, const std::string& key, const std::string& text) {
    const auto t = parse_timestamp(text, c.date_format);
    if (!t) bad_value(key, "'" + text + "' does not match date format '" + c.date_format + "'");
    return *t;
}

SeriesMatrix load_panel(const RunConfig& c) {
    if (c.inputs.empty()) throw Error(ErrorCode::InvalidArgument, "input: no input panel given");
    IngestConfig ic;
    ic.date_format = c.date_format;
    ic.missing = c.missing;
    ic.max_gap = c.max_gap;
    ic.kind = c.kind;
    std::vector<SeriesMatrix> panels;
    for (const auto& path : c.inputs) {
        if (!fs::exists(path)) throw Error(ErrorCode::Io, "input '" + path + "' does not exist");
        panels.push_back(load_csv(path, ic));
    }
    SeriesMatrix m = panels.size() == 1 ? std::move(panels.front()) : align_panels(panels);
    if (c.returns) m = to_returns(m, *c.returns);
    return m;
}

TimeWindow fit_window_of(const RunConfig& c, const SeriesMatrix& m) {
    TimeWindow w = full_window(m);
    if (c.fit_start) w.start = parse_bound(c, "fit_start", *c.fit_start);
    if (c.fit_end) w.end = parse_bound(c, "fit_end", *c.fit_end);
    return w;
}

Index components_for(const RunConfig& c, Index available) {
    const Index m = c.components ? *c.components : std::min(kDefaultComponents, available);
    if (m > available) {
        throw Error(ErrorCode::TooManyComponents, std::to_string(m) + " components requested, only " +
                                                      std::to_string(available) + " available");
    }
    return m;
}

MethodConfig method_of(const RunConfig& c) {
    MethodConfig mc;
    mc.use_tail = c.use_tail;
    mc.estimator = c.estimator;
    mc.tail = c.tail;
    return mc;
}

std::string fmt(const char* pattern, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, x);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string component_csv(const SeriesMatrix& panel, const Matrix& gross, const std::string& date_format) {
    SeriesMatrix series;
    series.timestamps = panel.timestamps;
    series.values = panel.values * gross.transpose();
    for (Index i = 0; i < gross.rows(); ++i) series.labels.push_back("c" + std::to_string(i));
    return format_csv(series, date_format);
}

void cmd_fit(const RunConfig& c, std::ostream& out) {
    const SeriesMatrix panel = validate_series(load_panel(c));
    const Index m = components_for(c, panel.cols());
    const TimeWindow window = fit_window_of(c, panel);
    const Decomposition d = fit_window(panel, window, method_of(c));

    DecompositionArtifact a{d, panel.labels, c.estimator, m};
    Matrix gross(m, panel.cols());
    for (Index i = 0; i < m; ++i) gross.row(i) = rescale_gross(d.weights.row(i).transpose()).transpose();

    const fs::path dir = c.out;
    ensure_dir(dir);
    write_json(dir / "decomposition.json", decomposition_to_json(a, c.date_format));
    write_file_atomic(dir / "components.csv", component_csv(panel, gross, c.date_format));

    out << to_string(d.method) << " k=" << d.order_k << " lag=" << d.lag << " rows="
        << window_rows(panel, window).second - window_rows(panel, window).first << "\n";
    out << "component      lambda   timescale\n";
    for (Index i = 0; i < m; ++i) {
        out << pad(std::to_string(i), 9) << pad(fmt("%.6f", d.normalized_lambdas(i)), 12)
            << pad(fmt("%.4g", d.timescales(i)), 12)
            << (d.timescale_warnings[static_cast<std::size_t>(i)] ? "  (lambda >= 1)" : "") << "\n";
    }
}

void cmd_project(const RunConfig& c, std::ostream& out) {
    const SeriesMatrix panel = validate_series(load_panel(c));
    if (c.decompositions.size() > 1) bad_value("decomposition", "project takes a single artifact");

    Decomposition fitted;
    EstimatorConfig estimator = c.estimator;
    Index m = 0;
    bool fitted_here = false;
    if (!c.decompositions.empty()) {
        const DecompositionArtifact a = load_decomposition(c.decompositions.front(), c.date_format);
        if (a.decomposition.weights.cols() != panel.cols()) {
            throw Error(ErrorCode::ShapeMismatch, "artifact has " + std::to_string(a.decomposition.weights.cols()) +
                                                      " assets, panel has " + std::to_string(panel.cols()));
        }
        fitted = a.decomposition;
        estimator = a.estimator;
        m = c.components ? components_for(c, fitted.size()) : a.selected;
    } else {
        m = components_for(c, panel.cols());
        fitted = fit_window(panel, fit_window_of(c, panel), method_of(c));
        fitted_here = true;
    }

    WindowSplit split;
    split.fit = fitted.fit_window;
    const TimeWindow all = full_window(panel);
    if (c.project_start || c.project_end) {
        split.project.start = c.project_start ? parse_bound(c, "project_start", *c.project_start) : split.fit.end;
        split.project.end = c.project_end ? parse_bound(c, "project_end", *c.project_end) : all.end;
    } else {
        split.project = {split.fit.end, all.end};
        const auto [first, last] = window_rows(panel, split.project);
        if (split.project.start >= split.project.end || first == last) split.project = split.fit;
    }

    const ProjectionReport r = project_decomposition(panel, split, fitted, estimator, m);

    const fs::path dir = c.out;
    ensure_dir(dir);
    if (fitted_here) {
        write_json(dir / "decomposition.json",
                   decomposition_to_json({fitted, panel.labels, estimator, m}, c.date_format));
    }
    write_json(dir / "report.json", report_to_json(r, panel.labels, c.date_format));
    write_file_atomic(dir / "components.csv", format_csv(component_panel(r), c.date_format));
    for (Index i = 0; i < m; ++i) {
        write_file_atomic(dir / ("component_" + std::to_string(i) + ".svg"), component_svg(r, i));
    }

    out << "fit [" << format_timestamp(split.fit.start, c.date_format) << ", "
        << format_timestamp(split.fit.end, c.date_format) << ")  project ["
        << format_timestamp(split.project.start, c.date_format) << ", "
        << format_timestamp(split.project.end, c.date_format) << ")\n";
    out << "component   lambda_in  lambda_out        t_in       t_out  persistence\n";
    for (Index i = 0; i < m; ++i) {
        out << pad(std::to_string(i), 9) << pad(fmt("%.6f", r.insample_lambda(i)), 12)
            << pad(fmt("%.6f", r.outsample_lambda(i)), 12) << pad(fmt("%.4g", r.insample_timescale(i)), 12)
            << pad(fmt("%.4g", r.outsample_timescale(i)), 12)
            << pad(fmt("%.4f", r.timescale_persistence(i)), 13) << "\n";
    }
    if (!r.orthogonality_drift.empty()) {
        out << "orthogonality drift: first " << fmt("%.4g", r.orthogonality_drift.front().drift) << "  last "
            << fmt("%.4g", r.orthogonality_drift.back().drift) << "  windows "
            << r.orthogonality_drift.size() << "\n";
    }
}

void cmd_report(const RunConfig& c, std::ostream& out) {
    const SeriesMatrix panel = validate_series(load_panel(c));
    Decomposition left, right;
    if (c.decompositions.size() == 2) {
        left = load_decomposition(c.decompositions[0], c.date_format).decomposition;
        right = load_decomposition(c.decompositions[1], c.date_format).decomposition;
    } else if (c.decompositions.empty()) {
        const TimeWindow window = fit_window_of(c, panel);
        MethodConfig lin = method_of(c);
        lin.use_tail = false;
        MethodConfig tail = method_of(c);
        tail.use_tail = true;
        left = fit_window(panel, window, lin);
        right = fit_window(panel, window, tail);
    } else {
        bad_value("decomposition", "report compares exactly two artifacts, or fits both methods");
    }
    const Index m = components_for(c, std::min(left.size(), right.size()));
    const SeriesMatrix window = slice_window(panel, left.fit_window);
    const Comparison cmp = compare_decompositions(window, left, right, m);

    const fs::path dir = c.out;
    ensure_dir(dir);
    write_json(dir / "comparison.json", comparison_to_json(cmp, left, right));
    out << comparison_table(cmp, left, right);
}

void cmd_synth(const RunConfig& c) {
    if (c.phis.empty()) bad_value("phis", "at least one coefficient is required");
    SynthSpec spec;
    spec.phis = c.phis;
    spec.length = c.length;
    spec.seed = c.seed;
    spec.lag = c.estimator.lag;
    spec.scales = c.scales;
    const auto n = spec.phis.size();
    if (!c.innovations.empty()) {
        if (c.innovations.size() != 1 && c.innovations.size() != n) {
            bad_value("innovations", "give one law, or one per latent");
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = c.innovations.size() == 1 ? c.innovations.front() : c.innovations[i];
            try {
                spec.innovations.push_back(Innovation::parse(s));
            } catch (const Error& e) {
                bad_value("innovations", e.what());
            }
        }
    }
    if (c.mixing == "random") {
        spec.mixing = random_mixing(static_cast<Index>(n), c.seed + 1);
    } else if (c.mixing == "matrix") {
        spec.mixing = c.mixing_matrix;
    }
    if (c.break_at) {
        if (c.phis_after.empty()) bad_value("phis_after", "required with break_at");
        spec.regime_change = RegimeChange{*c.break_at, c.phis_after};
    } else if (!c.phis_after.empty()) {
        bad_value("phis_after", "needs break_at");
    }

    if (c.start) {
        spec.start_timestamp = parse_bound(c, "start", *c.start);
    } else if (c.date_format != "ordinal") {
        // 2000-01-03 in days; patterns with a time part count seconds.
        const Timestamp day = *parse_timestamp("2000-01-03", "%Y-%m-%d");
        const bool has_time = c.date_format.find("%H") != std::string::npos ||
                              c.date_format.find("%M") != std::string::npos ||
                              c.date_format.find("%S") != std::string::npos;
        spec.start_timestamp = has_time ? day * 86400 : day;
    }

    const auto [panel, truth] = generate(spec);
    SeriesMatrix latents;
    latents.timestamps = panel.timestamps;
    latents.values = truth.latents;
    for (std::size_t i = 0; i < n; ++i) latents.labels.push_back("s" + std::to_string(i));

    const fs::path dir = c.out;
    ensure_dir(dir);
    write_file_atomic(dir / "panel.csv", format_csv(panel, c.date_format));
    write_file_atomic(dir / "latents.csv", format_csv(latents, c.date_format));
    write_json(dir / "ground_truth.json", ground_truth_to_json(spec, truth));
}

}  // namespace

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return 2;
        case ErrorKind::Data: return 3;
        case ErrorKind::Numerical: return 4;
    }
    return 4;
}

void execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    for (const auto& key : cfg.ignored_tail_options) {
        err << "warning: '" << key << "' only applies to the tail method and is ignored\n";
    }
    switch (cfg.command) {
        case Command::Fit: cmd_fit(cfg, out); break;
        case Command::Project: cmd_project(cfg, out); break;
        case Command::Report: cmd_report(cfg, out); break;
        case Command::Synth: cmd_synth(cfg); break;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Timescale decomposition of multivariate time series (linear and tail tICA)", "tica"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every command");

    struct Sub {
        CLI::App* app;
        Command command;
        unsigned group;
    };
    const std::vector<std::pair<const char*, std::pair<Command, unsigned>>> subs_def = {
        {"fit", {Command::Fit, kFit}},
        {"project", {Command::Project, kProject}},
        {"report", {Command::Report, kReport}},
        {"synth", {Command::Synth, kSynth}},
    };
    const std::map<std::string, const char*> descriptions = {
        {"fit", "fit a decomposition; writes decomposition.json and components.csv"},
        {"project", "fit (or load) and project; writes report.json, components.csv, component_<i>.svg"},
        {"report", "compare linear and tail decompositions; writes comparison.json"},
        {"synth", "generate a mixed AR(1) panel; writes panel.csv, latents.csv, ground_truth.json"},
    };

    std::vector<Sub> subs;
    // raw[subcommand][flag] -> strings as given
    std::map<std::string, std::map<std::string, std::vector<std::string>>> raw;
    std::map<std::string, std::map<std::string, CLI::Option*>> opts;
    for (const auto& [name, spec] : subs_def) {
        CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
        subs.push_back({sub, spec.first, spec.second});
        for (const auto& d : kOptions) {
            if (!(d.groups & spec.second)) continue;
            auto& slot = raw[name][d.flag];
            CLI::Option* o = sub->add_option(std::string("--") + d.flag, slot, d.help);
            if (d.type == Type::StringList || d.type == Type::DoubleList) {
                o->delimiter(',')->expected(1, -1);
            } else {
                o->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
            }
            if (*d.default_text) o->default_str(d.default_text);
            opts[name][d.flag] = o;
        }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        // Subcommand-level help arrives as a CallForHelp from the subcommand.
        err << "error: " << e.what() << "\n";
        return 2;
    }

    const Sub* chosen = nullptr;
    for (const auto& s : subs) {
        if (s.app->parsed()) chosen = &s;
    }
    if (!chosen) {
        err << "error: no command given\n";
        return 2;
    }
    const std::string name = chosen->app->get_name();

    try {
        Json merged = Json::object();
        const auto& cfg_opt = opts[name]["config"];
        if (cfg_opt->count() > 0) merged = load_config(raw[name]["config"].back());
        for (const auto& d : kOptions) {
            if (!(d.groups & chosen->group) || std::string(d.flag) == "config") continue;
            if (opts[name][d.flag]->count() == 0) continue;
            merged[key_of(d.flag)] = typed_value(d, raw[name][d.flag]);
        }
        const RunConfig cfg = resolve(chosen->command, Settings(std::move(merged)));
        execute(cfg, out, err);
        return 0;
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "error: Io: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace tica::cli
