#include "fixtures.hpp"
#include "tica/core.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace tica;

TEST(ValidateSeries, AcceptsFiniteIncreasingPanel) {
    Matrix v(3, 2);
    v << 1, 2, 3, 4, 5, 6;
    SeriesMatrix m = fixtures::panel(v, 1);
    const SeriesMatrix out = validate_series(m);
    EXPECT_EQ(out.timestamps, (std::vector<Timestamp>{1, 2, 3}));
    EXPECT_EQ(out.values, v);
}

TEST(ValidateSeries, RejectsRepeatedTimestamp) {
    SeriesMatrix m = fixtures::panel(Matrix::Ones(3, 2));
    m.timestamps = {1, 1, 2};
    try {
        validate_series(m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonMonotonicTime);
    }
}

TEST(ValidateSeries, ReportsNonFiniteCell) {
    Matrix v = Matrix::Ones(3, 2);
    v(0, 1) = std::numeric_limits<double>::quiet_NaN();
    try {
        validate_series(fixtures::panel(v));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonFiniteValue);
        EXPECT_EQ(e.row, 0);
        EXPECT_EQ(e.col, 1);
    }
}

TEST(ValidateSeries, RejectsTooSmallPanel) {
    try {
        validate_series(fixtures::panel(Matrix::Ones(1, 2)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyPanel);
    }
}

TEST(ErrorKinds, MapToExitClasses) {
    EXPECT_EQ(kind_of(ErrorCode::TooManyComponents), ErrorKind::Config);
    EXPECT_EQ(kind_of(ErrorCode::Io), ErrorKind::Config);
    EXPECT_EQ(kind_of(ErrorCode::NonFiniteValue), ErrorKind::Data);
    EXPECT_EQ(kind_of(ErrorCode::ParseError), ErrorKind::Data);
    EXPECT_EQ(kind_of(ErrorCode::NoConvergence), ErrorKind::Numerical);
    EXPECT_EQ(kind_of(ErrorCode::SingularCovariance), ErrorKind::Numerical);
}

TEST(Signs, LargestEntryMadePositive) {
    Vector w(3);
    w << 0.1, -0.9, 0.3;
    EXPECT_EQ(canonicalize_sign(w), -w);
    Matrix m(2, 2);
    m << -1, 0.5, 0.2, 0.1;
    Matrix expected(2, 2);
    expected << 1, -0.5, 0.2, 0.1;
    EXPECT_EQ(canonicalize_signs(m), expected);
}

TEST(Signs, TieDecidedByFirstEntry) {
    Vector w(2);
    w << -0.5, 0.5;
    EXPECT_EQ(canonicalize_sign(w), -w);
}

TEST(Windows, HalfOpenSelection) {
    const SeriesMatrix m = fixtures::panel(Matrix::Random(10, 2), 100);
    const auto [first, last] = window_rows(m, {102, 105});
    EXPECT_EQ(first, 2);
    EXPECT_EQ(last, 5);
    const SeriesMatrix s = slice_window(m, {102, 105});
    EXPECT_EQ(s.rows(), 3);
    EXPECT_EQ(s.timestamps.front(), 102);
    EXPECT_EQ(s.values.row(0), m.values.row(2));
    EXPECT_EQ(full_window(m), (TimeWindow{100, 110}));
    EXPECT_TRUE(full_window(m).contains(109));
    EXPECT_FALSE(full_window(m).contains(110));
}

TEST(Project, ShapeMismatch) {
    const SeriesMatrix m = fixtures::panel(Matrix::Ones(4, 3));
    EXPECT_THROW(project(m, Vector::Ones(2)), Error);
    EXPECT_EQ(project(m, Vector::Ones(3)), Vector::Constant(4, 3.0));
}

TEST(Centered, ZeroColumnMeans) {
    const Matrix c = centered(Matrix::Random(50, 3) + Matrix::Constant(50, 3, 5.0));
    EXPECT_LT(c.colwise().mean().cwiseAbs().maxCoeff(), 1e-14);
}

TEST(MethodNames, RoundTrip) {
    for (Method m : {Method::LinearTica, Method::TailDeflation, Method::TailParallel}) {
        EXPECT_EQ(method_from_string(to_string(m)), m);
    }
    EXPECT_THROW(method_from_string("pca"), Error);
}
