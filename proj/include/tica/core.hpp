// Shared domain types for timescale separation of multivariate series.
//
// Convention used everywhere: rows of a value matrix are observations and
// columns are assets. A weight vector w produces the component series
// values * w, and a weight matrix stores one component per row.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tica {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Timestamp = std::int64_t;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorCode {
    NonMonotonicTime,
    NonFiniteValue,
    EmptyPanel,
    InsufficientData,
    SingularCovariance,
    NotPositiveDefinite,
    EigenNoConvergence,
    DegenerateUpdate,
    NoConvergence,
    BadSpec,
    ShapeMismatch,
    ZeroWeight,
    WindowOutOfRange,
    TooManyComponents,
    NonPositivePrice,
    ParseError,
    UnparseableDate,
    MissingColumn,
    GapTooLarge,
    EmptyIntersection,
    InvalidArgument,
    Io,
};

/// Broad failure class; drives the CLI exit code (2, 3, 4).
enum class ErrorKind { Config, Data, Numerical };

ErrorKind kind_of(ErrorCode code);
const char* to_string(ErrorCode code);

/// Every failure in the library is reported as a tica::Error. Location
/// fields are populated when the code refers to a cell, line or component.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }
    ErrorKind kind() const noexcept { return kind_of(code_); }

    std::optional<Index> row;
    std::optional<Index> col;
    std::optional<Index> line;

    static Error non_finite(Index row, Index col);
    static Error at_line(ErrorCode code, Index line, const std::string& detail);

private:
    ErrorCode code_;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class SeriesKind { Prices, Returns };

/// T x n panel of aligned observations.
struct SeriesMatrix {
    std::vector<Timestamp> timestamps;
    Matrix values;
    std::vector<std::string> labels;
    SeriesKind kind = SeriesKind::Returns;

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }
};

/// Half-open interval of timestamps [start, end).
struct TimeWindow {
    Timestamp start = 0;
    Timestamp end = 0;

    bool contains(Timestamp t) const { return t >= start && t < end; }
    bool operator==(const TimeWindow&) const = default;
};

/// Instantaneous covariance and symmetrized lag-T autocovariance.
struct CovPair {
    Matrix c0;
    Matrix cT;
    int lag = 1;
    Index sample_count = 0;
};

enum class Method { LinearTica, TailDeflation, TailParallel };

const char* to_string(Method m);
Method method_from_string(const std::string& s);

/// A full timescale decomposition. Row i of `weights` is component i;
/// components are ordered slowest first (largest lambda).
///
/// `lambdas` holds the value used for ordering: the generalized eigenvalue
/// for the linear method and the raw tail autocorrelation for the tail
/// methods. `normalized_lambdas` is the autocorrelation-scale quantity that
/// feeds the timescale formula; for the linear method both coincide.
struct Decomposition {
    Matrix weights;
    Vector lambdas;
    Vector normalized_lambdas;
    Vector timescales;
    std::vector<bool> timescale_warnings;
    int lag = 1;
    int order_k = 1;
    Method method = Method::LinearTica;
    TimeWindow fit_window;

    Index size() const { return weights.rows(); }
};

/// Lagrange multiplier paired with its autocorrelation.
struct LagrangeScalars {
    double beta = 0.0;
    double lambda = 0.0;
    int lag = 1;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Returns `m` unchanged if timestamps are strictly increasing, the panel is
/// at least 2 x 1 and every value is finite; throws otherwise.
SeriesMatrix validate_series(const SeriesMatrix& m);

/// Flips each row so that its largest-magnitude entry is positive. Among
/// entries of equal magnitude the first one decides.
Matrix canonicalize_signs(const Matrix& weights);
Vector canonicalize_sign(const Vector& w);

/// Rows [begin, end) as a new panel.
SeriesMatrix slice_rows(const SeriesMatrix& m, Index begin, Index end);

/// Row range [first, last) covered by `window`.
std::pair<Index, Index> window_rows(const SeriesMatrix& m, const TimeWindow& window);

/// Panel restricted to rows whose timestamp lies in `window`.
SeriesMatrix slice_window(const SeriesMatrix& m, const TimeWindow& window);

/// Window spanning every row of `m`: [first, last + 1).
TimeWindow full_window(const SeriesMatrix& m);

/// Columns minus their means.
Matrix centered(const Matrix& values);

/// values * w, one entry per observation.
Vector project(const SeriesMatrix& m, const Vector& w);

}  // namespace tica
