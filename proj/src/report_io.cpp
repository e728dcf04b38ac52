#include "tica/report_io.hpp"

#include "tica/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace tica {

namespace {

Json vector_json(const Vector& v) {
    Json arr = Json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(number_to_json(v(i)));
    return arr;
}

Json row_json(const Matrix& m, Index row) {
    Json arr = Json::array();
    for (Index j = 0; j < m.cols(); ++j) arr.push_back(number_to_json(m(row, j)));
    return arr;
}

Json matrix_json(const Matrix& m) {
    Json arr = Json::array();
    for (Index i = 0; i < m.rows(); ++i) arr.push_back(row_json(m, i));
    return arr;
}

const char* denominator_name(Denominator d) { return d == Denominator::N ? "n" : "n-lag"; }

std::string fmt(const char* pattern, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, x);
    return buf;
}

[[noreturn]] void bad_artifact(const std::string& what) {
    throw Error(ErrorCode::BadSpec, "decomposition artifact: " + what);
}

}  // namespace

Json number_to_json(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double number_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw Error(ErrorCode::BadSpec, "expected a number, got " + j.dump());
}

Json decomposition_to_json(const DecompositionArtifact& a, const std::string& date_format) {
    const Decomposition& d = a.decomposition;
    Json j;
    j["method"] = to_string(d.method);
    j["order_k"] = d.order_k;
    j["lag"] = d.lag;
    j["fit_window"] = {{"start", format_timestamp(d.fit_window.start, date_format)},
                       {"end", format_timestamp(d.fit_window.end, date_format)}};
    j["estimator"] = {{"center", a.estimator.center},
                      {"ridge", a.estimator.ridge ? Json(*a.estimator.ridge) : Json(nullptr)},
                      {"denominator", denominator_name(a.estimator.denominator)}};
    j["timescale_basis"] = d.method == Method::LinearTica
                               ? "generalized eigenvalue"
                               : "normalized tail autocorrelation";
    j["labels"] = a.labels;
    j["selected"] = a.selected;
    Json comps = Json::array();
    for (Index i = 0; i < d.size(); ++i) {
        Json c;
        c["index"] = i;
        c["lambda"] = number_to_json(d.lambdas(i));
        c["normalized_lambda"] = number_to_json(d.normalized_lambdas(i));
        c["timescale"] = number_to_json(d.timescales(i));
        c["timescale_warning"] = static_cast<bool>(d.timescale_warnings[static_cast<std::size_t>(i)]);
        c["weights"] = row_json(d.weights, i);
        c["gross_weights"] = vector_json(rescale_gross(d.weights.row(i).transpose()));
        comps.push_back(std::move(c));
    }
    j["components"] = std::move(comps);
    return j;
}

DecompositionArtifact decomposition_from_json(const Json& j, const std::string& date_format) {
    try {
        DecompositionArtifact a;
        Decomposition& d = a.decomposition;
        d.method = method_from_string(j.at("method").get<std::string>());
        d.order_k = j.at("order_k").get<int>();
        d.lag = j.at("lag").get<int>();
        const auto start = parse_timestamp(j.at("fit_window").at("start").get<std::string>(), date_format);
        const auto end = parse_timestamp(j.at("fit_window").at("end").get<std::string>(), date_format);
        if (!start || !end) bad_artifact("fit window does not match date format " + date_format);
        d.fit_window = {*start, *end};
        const Json& est = j.at("estimator");
        a.estimator.lag = d.lag;
        a.estimator.center = est.at("center").get<bool>();
        if (!est.at("ridge").is_null()) a.estimator.ridge = est.at("ridge").get<double>();
        a.estimator.denominator =
            est.at("denominator").get<std::string>() == "n" ? Denominator::N : Denominator::NminusLag;
        a.labels = j.at("labels").get<std::vector<std::string>>();
        a.selected = j.at("selected").get<Index>();

        const Json& comps = j.at("components");
        const Index n = static_cast<Index>(comps.size());
        if (n == 0) bad_artifact("no components");
        const Index cols = static_cast<Index>(comps.at(0).at("weights").size());
        d.weights.resize(n, cols);
        d.lambdas.resize(n);
        d.normalized_lambdas.resize(n);
        d.timescales.resize(n);
        d.timescale_warnings.assign(static_cast<std::size_t>(n), false);
        for (Index i = 0; i < n; ++i) {
            const Json& c = comps.at(static_cast<std::size_t>(i));
            const Json& w = c.at("weights");
            if (static_cast<Index>(w.size()) != cols) bad_artifact("ragged weight matrix");
            for (Index k = 0; k < cols; ++k) d.weights(i, k) = number_from_json(w.at(static_cast<std::size_t>(k)));
            d.lambdas(i) = number_from_json(c.at("lambda"));
            d.normalized_lambdas(i) = number_from_json(c.at("normalized_lambda"));
            d.timescales(i) = number_from_json(c.at("timescale"));
            d.timescale_warnings[static_cast<std::size_t>(i)] = c.at("timescale_warning").get<bool>();
        }
        return a;
    } catch (const nlohmann::json::exception& e) {
        bad_artifact(e.what());
    }
}

DecompositionArtifact load_decomposition(const std::string& path, const std::string& date_format) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open decomposition '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        bad_artifact(std::string("invalid JSON in '") + path + "': " + e.what());
    }
    return decomposition_from_json(j, date_format);
}

Json report_to_json(const ProjectionReport& r, const std::vector<std::string>& labels,
                    const std::string& date_format) {
    Json j;
    j["method"] = to_string(r.decomposition.method);
    j["order_k"] = r.decomposition.order_k;
    j["lag"] = r.decomposition.lag;
    j["fit_window"] = {{"start", format_timestamp(r.split.fit.start, date_format)},
                       {"end", format_timestamp(r.split.fit.end, date_format)}};
    j["project_window"] = {{"start", format_timestamp(r.split.project.start, date_format)},
                           {"end", format_timestamp(r.split.project.end, date_format)}};
    j["labels"] = labels;
    j["component_series"] = "components.csv";
    Json comps = Json::array();
    for (Index i = 0; i < r.n_selected; ++i) {
        Json c;
        c["index"] = i;
        c["gross_weights"] = row_json(r.gross_weights, i);
        c["insample_lambda"] = number_to_json(r.insample_lambda(i));
        c["outsample_lambda"] = number_to_json(r.outsample_lambda(i));
        c["insample_timescale"] = number_to_json(r.insample_timescale(i));
        c["outsample_timescale"] = number_to_json(r.outsample_timescale(i));
        c["timescale_persistence"] = number_to_json(r.timescale_persistence(i));
        c["svg"] = "component_" + std::to_string(i) + ".svg";
        comps.push_back(std::move(c));
    }
    j["components"] = std::move(comps);
    Json drift = Json::array();
    for (const auto& p : r.orthogonality_drift) {
        drift.push_back({{"window_start", format_timestamp(p.window_start, date_format)},
                         {"window_end", format_timestamp(p.window_end, date_format)},
                         {"drift", number_to_json(p.drift)}});
    }
    j["orthogonality_drift"] = std::move(drift);
    return j;
}

SeriesMatrix component_panel(const ProjectionReport& r) {
    SeriesMatrix m;
    m.timestamps = r.timestamps;
    m.values = r.component_series;
    for (Index i = 0; i < r.component_series.cols(); ++i) m.labels.push_back("c" + std::to_string(i));
    return m;
}

std::string component_svg(const ProjectionReport& r, Index component) {
    constexpr double width = 900.0;
    constexpr double height = 260.0;
    constexpr double left = 50.0;
    constexpr double right = 10.0;
    constexpr double top = 30.0;
    constexpr double bottom = 20.0;
    constexpr Index buckets = 800;

    const Vector series = r.component_series.col(component);
    const Index t_count = series.size();
    const double lo = series.minCoeff();
    const double hi = series.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto x_of = [&](Index t) {
        return left + (t_count > 1 ? plot_w * static_cast<double>(t) / static_cast<double>(t_count - 1) : 0.0);
    };
    auto y_of = [&](double v) { return top + plot_h * (hi - v) / span; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"260\" viewBox=\"0 0 900 260\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"900\" height=\"260\" fill=\"#ffffff\"/>\n";

    std::vector<Timestamp> ts = r.timestamps;
    const auto first = std::lower_bound(ts.begin(), ts.end(), r.split.fit.start) - ts.begin();
    const auto last = std::lower_bound(ts.begin(), ts.end(), r.split.fit.end) - ts.begin();
    if (last > first) {
        const double x0 = x_of(first);
        const double x1 = x_of(last - 1);
        svg += "<rect x=\"" + fmt("%.2f", x0) + "\" y=\"" + fmt("%.2f", top) + "\" width=\"" +
               fmt("%.2f", std::max(x1 - x0, 1.0)) + "\" height=\"" + fmt("%.2f", plot_h) +
               "\" fill=\"#d9f2d9\"/>\n";
    }

    svg += "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1\" points=\"";
    if (t_count <= 2 * buckets) {
        for (Index t = 0; t < t_count; ++t) {
            svg += fmt("%.2f", x_of(t)) + "," + fmt("%.2f", y_of(series(t))) + " ";
        }
    } else {
        // Min/max envelope per bucket, emitted in time order.
        for (Index b = 0; b < buckets; ++b) {
            const Index s = t_count * b / buckets;
            const Index e = t_count * (b + 1) / buckets;
            Index imin = s;
            Index imax = s;
            for (Index t = s; t < e; ++t) {
                if (series(t) < series(imin)) imin = t;
                if (series(t) > series(imax)) imax = t;
            }
            const Index a = std::min(imin, imax);
            const Index c = std::max(imin, imax);
            svg += fmt("%.2f", x_of(a)) + "," + fmt("%.2f", y_of(series(a))) + " ";
            if (c != a) svg += fmt("%.2f", x_of(c)) + "," + fmt("%.2f", y_of(series(c))) + " ";
        }
    }
    svg += "\"/>\n";

    svg += "<line x1=\"" + fmt("%.2f", left) + "\" y1=\"" + fmt("%.2f", top + plot_h) + "\" x2=\"" +
           fmt("%.2f", width - right) + "\" y2=\"" + fmt("%.2f", top + plot_h) +
           "\" stroke=\"#444444\"/>\n";
    svg += "<text x=\"" + fmt("%.2f", left) + "\" y=\"18\" font-family=\"sans-serif\" font-size=\"12\">" +
           "component " + std::to_string(component) + "  lambda in " +
           fmt("%.4f", r.insample_lambda(component)) + " / out " +
           fmt("%.4f", r.outsample_lambda(component)) + "  persistence " +
           fmt("%.3f", r.timescale_persistence(component)) + "</text>\n";
    svg += "<text x=\"4\" y=\"" + fmt("%.2f", top + 10) + "\" font-family=\"sans-serif\" font-size=\"10\">" +
           fmt("%.3g", hi) + "</text>\n";
    svg += "<text x=\"4\" y=\"" + fmt("%.2f", top + plot_h) + "\" font-family=\"sans-serif\" font-size=\"10\">" +
           fmt("%.3g", lo) + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

Json ground_truth_to_json(const SynthSpec& spec, const GroundTruth& truth) {
    Json j;
    j["seed"] = spec.seed;
    j["length"] = spec.length;
    j["lag"] = truth.lag;
    j["burn_in"] = kBurnIn;
    Json phis = Json::array();
    for (double p : spec.phis) phis.push_back(p);
    j["phis"] = std::move(phis);
    Json inn = Json::array();
    const Index n = spec.n_components();
    for (Index i = 0; i < n; ++i) {
        inn.push_back(spec.innovations.empty() ? "gaussian"
                                               : spec.innovations[static_cast<std::size_t>(i)].to_string());
    }
    j["innovations"] = std::move(inn);
    if (spec.regime_change) {
        Json after = Json::array();
        for (double p : spec.regime_change->phis) after.push_back(p);
        j["regime_change"] = {{"at", spec.regime_change->at}, {"phis", std::move(after)}};
    }
    j["mixing"] = matrix_json(truth.mixing);
    j["unmixing"] = matrix_json(truth.unmixing);
    j["autocorrelations"] = vector_json(truth.autocorrelations);
    j["timescales"] = vector_json(truth.timescales);
    j["latent_series"] = "latents.csv";
    return j;
}

Comparison compare_decompositions(const SeriesMatrix& panel, const Decomposition& left,
                                  const Decomposition& right, Index m) {
    if (left.weights.cols() != panel.cols() || right.weights.cols() != panel.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "decompositions do not match the panel width");
    }
    if (m < 1 || m > left.size() || m > right.size()) {
        throw Error(ErrorCode::TooManyComponents, "cannot compare " + std::to_string(m) + " components");
    }
    Comparison c;
    const Matrix lw = left.weights.topRows(m).rowwise().normalized();
    const Matrix rw = right.weights.topRows(m).rowwise().normalized();
    c.weight_cosine = (lw * rw.transpose()).cwiseAbs();

    const Matrix ls = panel.values * left.weights.topRows(m).transpose();
    const Matrix rs = panel.values * right.weights.topRows(m).transpose();
    c.series_correlation.resize(m, m);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < m; ++j) c.series_correlation(i, j) = abs_correlation(ls.col(i), rs.col(j));
    }
    c.match = alignment_score(ls, rs);
    c.matched_cosine.resize(m);
    for (Index i = 0; i < m; ++i) {
        c.matched_cosine(i) = c.weight_cosine(i, c.match.permutation[static_cast<std::size_t>(i)]);
    }
    return c;
}

Json comparison_to_json(const Comparison& c, const Decomposition& left, const Decomposition& right) {
    Json j;
    j["left"] = {{"method", to_string(left.method)}, {"order_k", left.order_k}};
    j["right"] = {{"method", to_string(right.method)}, {"order_k", right.order_k}};
    j["weight_cosine"] = matrix_json(c.weight_cosine);
    j["series_correlation"] = matrix_json(c.series_correlation);
    Json pairs = Json::array();
    for (Index i = 0; i < c.match.scores.size(); ++i) {
        const Index r = c.match.permutation[static_cast<std::size_t>(i)];
        pairs.push_back({{"left", i},
                         {"right", r},
                         {"series_correlation", number_to_json(c.match.scores(i))},
                         {"weight_cosine", number_to_json(c.matched_cosine(i))},
                         {"left_lambda", number_to_json(left.normalized_lambdas(i))},
                         {"right_lambda", number_to_json(right.normalized_lambdas(r))}});
    }
    j["matches"] = std::move(pairs);
    return j;
}

std::string comparison_table(const Comparison& c, const Decomposition& left,
                             const Decomposition& right) {
    std::string out = std::string("left: ") + to_string(left.method) + " (k=" +
                      std::to_string(left.order_k) + ")  right: " + to_string(right.method) +
                      " (k=" + std::to_string(right.order_k) + ")\n";
    out += " left  right   |corr|    |cos|  lambda_l  lambda_r\n";
    for (Index i = 0; i < c.match.scores.size(); ++i) {
        const Index r = c.match.permutation[static_cast<std::size_t>(i)];
        char line[160];
        std::snprintf(line, sizeof line, "%5lld  %5lld  %7.4f  %7.4f  %8.4f  %8.4f\n",
                      static_cast<long long>(i), static_cast<long long>(r), c.match.scores(i),
                      c.matched_cosine(i), left.normalized_lambdas(i), right.normalized_lambdas(r));
        out += line;
    }
    return out;
}

}  // namespace tica
