#include "tica/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tica {

namespace {

constexpr std::string_view kOrdinal = "ordinal";

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

bool is_missing(std::string_view cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan";
}

std::optional<double> parse_number(std::string_view cell) {
    double v = 0.0;
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) return std::nullopt;
    return v;
}

bool has_time_part(std::string_view format) {
    return format.find("%H") != std::string_view::npos ||
           format.find("%M") != std::string_view::npos ||
           format.find("%S") != std::string_view::npos;
}

bool read_int(std::string_view& s, int max_digits, long long& out) {
    int digits = 0;
    bool negative = false;
    if (!s.empty() && s.front() == '-') {
        negative = true;
        s.remove_prefix(1);
    }
    long long v = 0;
    while (!s.empty() && digits < max_digits && s.front() >= '0' && s.front() <= '9') {
        v = v * 10 + (s.front() - '0');
        s.remove_prefix(1);
        ++digits;
    }
    out = negative ? -v : v;
    return digits > 0;
}

struct Row {
    Index line = 0;
    Timestamp t = 0;
    std::vector<std::optional<double>> cells;
};

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format) {
    text = trim(text);
    if (format == kOrdinal) {
        Timestamp v = 0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
        return v;
    }
    long long year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0;
    for (std::size_t i = 0; i < format.size(); ++i) {
        if (format[i] != '%' || i + 1 == format.size()) {
            if (text.empty() || text.front() != format[i]) return std::nullopt;
            text.remove_prefix(1);
            continue;
        }
        const char spec = format[++i];
        bool ok = true;
        switch (spec) {
            case 'Y': ok = read_int(text, 4, year); break;
            case 'm': ok = read_int(text, 2, month); break;
            case 'd': ok = read_int(text, 2, day); break;
            case 'H': ok = read_int(text, 2, hour); break;
            case 'M': ok = read_int(text, 2, minute); break;
            case 'S': ok = read_int(text, 2, second); break;
            case '%':
                ok = !text.empty() && text.front() == '%';
                if (ok) text.remove_prefix(1);
                break;
            default: return std::nullopt;
        }
        if (!ok) return std::nullopt;
    }
    if (!text.empty()) return std::nullopt;
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{static_cast<int>(year)},
                             std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 ||
        second > 60) {
        return std::nullopt;
    }
    const Timestamp days = sys_days{ymd}.time_since_epoch().count();
    if (!has_time_part(format)) return days;
    return days * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_timestamp(Timestamp t, std::string_view format) {
    if (format == kOrdinal) return std::to_string(t);
    using namespace std::chrono;
    Timestamp days = t;
    Timestamp secs = 0;
    if (has_time_part(format)) {
        days = t >= 0 ? t / 86400 : -((-t + 86399) / 86400);
        secs = t - days * 86400;
    }
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    auto pad = [](long long v, int width) {
        std::string s = std::to_string(v < 0 ? -v : v);
        if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
        return v < 0 ? "-" + s : s;
    };
    std::string out;
    for (std::size_t i = 0; i < format.size(); ++i) {
        if (format[i] != '%' || i + 1 == format.size()) {
            out += format[i];
            continue;
        }
        switch (format[++i]) {
            case 'Y': out += pad(static_cast<int>(ymd.year()), 4); break;
            case 'm': out += pad(static_cast<unsigned>(ymd.month()), 2); break;
            case 'd': out += pad(static_cast<unsigned>(ymd.day()), 2); break;
            case 'H': out += pad(secs / 3600, 2); break;
            case 'M': out += pad((secs / 60) % 60, 2); break;
            case 'S': out += pad(secs % 60, 2); break;
            case '%': out += '%'; break;
            default: break;
        }
    }
    return out;
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

SeriesMatrix parse_csv(std::string_view text, const IngestConfig& cfg) {
    if (cfg.missing == MissingPolicy::ForwardFill && cfg.max_gap < 1) {
        throw Error(ErrorCode::InvalidArgument, "forward-fill max_gap must be >= 1");
    }
    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t nl = text.find('\n', start);
            if (nl == std::string_view::npos) nl = text.size();
            lines.push_back(text.substr(start, nl - start));
            start = nl + 1;
        }
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw Error::at_line(ErrorCode::ParseError, 1, "missing header row");

    std::string_view header_line = lines[0];
    if (header_line.substr(0, 3) == "\xEF\xBB\xBF") header_line.remove_prefix(3);
    const auto header = split(header_line);
    if (header.size() < 2) throw Error::at_line(ErrorCode::ParseError, 1, "header needs a date and a value column");
    if (!cfg.date_column.empty() && header[0] != cfg.date_column) {
        throw Error(ErrorCode::MissingColumn, "date column '" + cfg.date_column +
                                                  "' is not the first column");
    }

    std::vector<std::size_t> selected;
    std::vector<std::string> labels;
    if (cfg.column_filter.empty()) {
        for (std::size_t c = 1; c < header.size(); ++c) {
            selected.push_back(c);
            labels.emplace_back(header[c]);
        }
    } else {
        for (const auto& name : cfg.column_filter) {
            auto it = std::find(header.begin() + 1, header.end(), name);
            if (it == header.end()) throw Error(ErrorCode::MissingColumn, "column '" + name + "' not found");
            selected.push_back(static_cast<std::size_t>(it - header.begin()));
            labels.push_back(name);
        }
    }

    std::vector<Row> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Index line_no = static_cast<Index>(i + 1);
        if (trim(lines[i]).empty()) continue;
        const auto cells = split(lines[i]);
        if (cells.size() != header.size()) {
            throw Error::at_line(ErrorCode::ParseError, line_no,
                                 "expected " + std::to_string(header.size()) + " cells, found " +
                                     std::to_string(cells.size()));
        }
        const auto t = parse_timestamp(cells[0], cfg.date_format);
        if (!t) {
            throw Error::at_line(ErrorCode::UnparseableDate, line_no,
                                 "cannot parse '" + std::string(cells[0]) + "' with format '" +
                                     cfg.date_format + "'");
        }
        Row row;
        row.line = line_no;
        row.t = *t;
        for (std::size_t c : selected) {
            if (is_missing(cells[c])) {
                if (cfg.missing == MissingPolicy::Error) {
                    throw Error::at_line(ErrorCode::ParseError, line_no,
                                         "missing value in column '" + std::string(header[c]) + "'");
                }
                row.cells.emplace_back(std::nullopt);
                continue;
            }
            const auto v = parse_number(cells[c]);
            if (!v) {
                throw Error::at_line(ErrorCode::ParseError, line_no,
                                     "not a number: '" + std::string(cells[c]) + "'");
            }
            row.cells.emplace_back(*v);
        }
        rows.push_back(std::move(row));
    }

    const std::size_t n = selected.size();
    std::vector<Row> kept;
    if (cfg.missing == MissingPolicy::ForwardFill) {
        std::vector<std::optional<double>> last(n);
        std::vector<int> run(n, 0);
        for (auto& row : rows) {
            bool complete = true;
            for (std::size_t c = 0; c < n; ++c) {
                if (row.cells[c]) {
                    last[c] = row.cells[c];
                    run[c] = 0;
                    continue;
                }
                if (!last[c]) {
                    complete = false;
                    continue;
                }
                if (++run[c] > cfg.max_gap) {
                    Error e = Error::at_line(ErrorCode::GapTooLarge, row.line,
                                             "column '" + labels[c] + "' missing for more than " +
                                                 std::to_string(cfg.max_gap) + " rows");
                    e.col = static_cast<Index>(c);
                    throw e;
                }
                row.cells[c] = last[c];
            }
            if (complete) kept.push_back(std::move(row));
        }
    } else {
        for (auto& row : rows) {
            const bool complete = std::all_of(row.cells.begin(), row.cells.end(),
                                              [](const auto& v) { return v.has_value(); });
            if (complete) kept.push_back(std::move(row));
        }
    }

    SeriesMatrix m;
    m.labels = std::move(labels);
    m.kind = cfg.kind;
    m.values.resize(static_cast<Index>(kept.size()), static_cast<Index>(n));
    for (std::size_t r = 0; r < kept.size(); ++r) {
        m.timestamps.push_back(kept[r].t);
        for (std::size_t c = 0; c < n; ++c) {
            m.values(static_cast<Index>(r), static_cast<Index>(c)) = *kept[r].cells[c];
        }
    }
    return validate_series(m);
}

SeriesMatrix load_csv(const std::filesystem::path& path, const IngestConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), cfg);
}

SeriesMatrix align_panels(const std::vector<SeriesMatrix>& panels) {
    if (panels.empty()) throw Error(ErrorCode::EmptyPanel, "no panels to align");
    for (const auto& p : panels) validate_series(p);
    std::vector<Timestamp> common = panels[0].timestamps;
    for (std::size_t i = 1; i < panels.size(); ++i) {
        std::vector<Timestamp> next;
        std::set_intersection(common.begin(), common.end(), panels[i].timestamps.begin(),
                              panels[i].timestamps.end(), std::back_inserter(next));
        common = std::move(next);
    }
    if (common.empty()) throw Error(ErrorCode::EmptyIntersection, "panels share no timestamps");

    Index total_cols = 0;
    for (const auto& p : panels) total_cols += p.cols();

    SeriesMatrix out;
    out.timestamps = common;
    out.kind = panels[0].kind;
    out.values.resize(static_cast<Index>(common.size()), total_cols);
    Index col = 0;
    for (const auto& p : panels) {
        for (std::size_t r = 0; r < common.size(); ++r) {
            auto it = std::lower_bound(p.timestamps.begin(), p.timestamps.end(), common[r]);
            const Index src = it - p.timestamps.begin();
            out.values.block(static_cast<Index>(r), col, 1, p.cols()) = p.values.row(src);
        }
        for (Index c = 0; c < p.cols(); ++c) {
            out.labels.push_back(c < static_cast<Index>(p.labels.size())
                                     ? p.labels[static_cast<std::size_t>(c)]
                                     : "col" + std::to_string(col + c));
        }
        col += p.cols();
    }
    return out;
}

std::string format_csv(const SeriesMatrix& m, const std::string& date_format,
                       const std::string& date_header) {
    std::string out = date_header;
    for (const auto& l : m.labels) out += "," + l;
    out += "\n";
    for (Index r = 0; r < m.rows(); ++r) {
        out += format_timestamp(m.timestamps[static_cast<std::size_t>(r)], date_format);
        for (Index c = 0; c < m.cols(); ++c) {
            out += ',';
            out += format_double(m.values(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out) throw Error(ErrorCode::Io, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot rename into '" + path.string() + "': " + ec.message());
}

}  // namespace tica
