#include "tica/core.hpp"

#include <algorithm>
#include <cmath>

namespace tica {

ErrorKind kind_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::BadSpec:
        case ErrorCode::WindowOutOfRange:
        case ErrorCode::TooManyComponents:
        case ErrorCode::InvalidArgument:
        case ErrorCode::MissingColumn:
        case ErrorCode::Io:
            return ErrorKind::Config;
        case ErrorCode::SingularCovariance:
        case ErrorCode::NotPositiveDefinite:
        case ErrorCode::EigenNoConvergence:
        case ErrorCode::DegenerateUpdate:
        case ErrorCode::NoConvergence:
        case ErrorCode::ZeroWeight:
            return ErrorKind::Numerical;
        default:
            return ErrorKind::Data;
    }
}

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::EmptyPanel: return "EmptyPanel";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::SingularCovariance: return "SingularCovariance";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::EigenNoConvergence: return "EigenNoConvergence";
        case ErrorCode::DegenerateUpdate: return "DegenerateUpdate";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::BadSpec: return "BadSpec";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::ZeroWeight: return "ZeroWeight";
        case ErrorCode::WindowOutOfRange: return "WindowOutOfRange";
        case ErrorCode::TooManyComponents: return "TooManyComponents";
        case ErrorCode::NonPositivePrice: return "NonPositivePrice";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnparseableDate: return "UnparseableDate";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::GapTooLarge: return "GapTooLarge";
        case ErrorCode::EmptyIntersection: return "EmptyIntersection";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

Error Error::non_finite(Index row, Index col) {
    Error e(ErrorCode::NonFiniteValue,
            "non-finite value at (" + std::to_string(row) + "," + std::to_string(col) + ")");
    e.row = row;
    e.col = col;
    return e;
}

Error Error::at_line(ErrorCode code, Index line, const std::string& detail) {
    Error e(code, "line " + std::to_string(line) + ": " + detail);
    e.line = line;
    return e;
}

const char* to_string(Method m) {
    switch (m) {
        case Method::LinearTica: return "linear_tica";
        case Method::TailDeflation: return "tail_deflation";
        case Method::TailParallel: return "tail_parallel";
    }
    return "unknown";
}

Method method_from_string(const std::string& s) {
    if (s == "linear_tica") return Method::LinearTica;
    if (s == "tail_deflation") return Method::TailDeflation;
    if (s == "tail_parallel") return Method::TailParallel;
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + s + "'");
}

SeriesMatrix validate_series(const SeriesMatrix& m) {
    if (m.rows() < 2 || m.cols() < 1) {
        throw Error(ErrorCode::EmptyPanel, "panel needs at least 2 rows and 1 column, got " +
                                               std::to_string(m.rows()) + "x" +
                                               std::to_string(m.cols()));
    }
    if (static_cast<Index>(m.timestamps.size()) != m.rows()) {
        throw Error(ErrorCode::NonMonotonicTime, "timestamp count does not match row count");
    }
    for (std::size_t i = 1; i < m.timestamps.size(); ++i) {
        if (m.timestamps[i] <= m.timestamps[i - 1]) {
            throw Error(ErrorCode::NonMonotonicTime,
                        "timestamps not strictly increasing at row " + std::to_string(i));
        }
    }
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (!std::isfinite(m.values(r, c))) throw Error::non_finite(r, c);
        }
    }
    return m;
}

Vector canonicalize_sign(const Vector& w) {
    Index arg = 0;
    double best = -1.0;
    for (Index j = 0; j < w.size(); ++j) {
        if (std::abs(w(j)) > best) {
            best = std::abs(w(j));
            arg = j;
        }
    }
    if (w.size() > 0 && w(arg) < 0.0) return -w;
    return w;
}

Matrix canonicalize_signs(const Matrix& weights) {
    Matrix out = weights;
    for (Index i = 0; i < out.rows(); ++i) {
        out.row(i) = canonicalize_sign(out.row(i).transpose()).transpose();
    }
    return out;
}

SeriesMatrix slice_rows(const SeriesMatrix& m, Index begin, Index end) {
    SeriesMatrix out;
    out.timestamps.assign(m.timestamps.begin() + begin, m.timestamps.begin() + end);
    out.values = m.values.middleRows(begin, end - begin);
    out.labels = m.labels;
    out.kind = m.kind;
    return out;
}

std::pair<Index, Index> window_rows(const SeriesMatrix& m, const TimeWindow& window) {
    auto first = std::lower_bound(m.timestamps.begin(), m.timestamps.end(), window.start);
    auto last = std::lower_bound(first, m.timestamps.end(), window.end);
    return {first - m.timestamps.begin(), last - m.timestamps.begin()};
}

SeriesMatrix slice_window(const SeriesMatrix& m, const TimeWindow& window) {
    auto [first, last] = window_rows(m, window);
    return slice_rows(m, first, last);
}

TimeWindow full_window(const SeriesMatrix& m) {
    if (m.timestamps.empty()) return {};
    return {m.timestamps.front(), m.timestamps.back() + 1};
}

Matrix centered(const Matrix& values) {
    if (values.rows() == 0) return values;
    return values.rowwise() - values.colwise().mean();
}

Vector project(const SeriesMatrix& m, const Vector& w) {
    if (w.size() != m.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "weight length " + std::to_string(w.size()) +
                                                  " does not match column count " +
                                                  std::to_string(m.cols()));
    }
    return m.values * w;
}

}  // namespace tica
