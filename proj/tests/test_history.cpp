#include <doctest.h>

#include <cmath>

#include "amodelay/errors.hpp"
#include "amodelay/history.hpp"
#include "support/generators.hpp"

using namespace amodelay;

namespace {

HistoryBuffer linear_buffer(double t0, double h, std::size_t n, double a, double b) {
    HistoryBuffer buf(t0, h);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = buf.time(k);
        buf.push_back(Vec2(a * t + b, -2.0 * a * t));
    }
    return buf;
}

}  // namespace

TEST_CASE("construction and span") {
    CHECK_THROWS_AS(HistoryBuffer(0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(HistoryBuffer(0.0, -1.0), ConfigError);
    HistoryBuffer empty(-1.0, 0.1);
    CHECK(empty.empty());
    CHECK_FALSE(empty.covers(-1.0));
    CHECK_THROWS_AS(empty.at(-1.0), NumericalError);

    const HistoryBuffer b = linear_buffer(-2.0, 0.25, 9, 1.0, 0.5);
    CHECK(b.t_end() == doctest::Approx(0.0));
    CHECK(b.covers(-2.0));
    CHECK(b.covers(0.0));
    CHECK_FALSE(b.covers(0.01));
    CHECK_FALSE(b.covers(-2.01));
    CHECK_THROWS_AS(b.at(0.5), NumericalError);
}

TEST_CASE("interpolation is exact for linear data") {
    testsupport::Gen gen(77);
    const HistoryBuffer b = linear_buffer(-3.0, 0.1, 31, 0.7, -0.2);
    for (int i = 0; i < 200; ++i) {
        const double t = gen.uniform(-3.0, 0.0);
        const Vec2 v = b.at(t);
        CHECK(v(0) == doctest::Approx(0.7 * t - 0.2).epsilon(1e-12));
        CHECK(v(1) == doctest::Approx(-1.4 * t).epsilon(1e-12));
    }
    CHECK(b.at(b.time(7))(0) == b[7](0));
}

TEST_CASE("finite-difference derivatives") {
    HistoryBuffer b(-5.0, 0.01);
    for (std::size_t k = 0; k <= 500; ++k) {
        const double t = b.time(k);
        b.push_back(Vec2(std::sin(t), t * t));
    }
    for (double t : {-4.0, -2.5, -1.0}) {
        CHECK(b.derivative(t)(0) == doctest::Approx(std::cos(t)).epsilon(1e-4));
        CHECK(b.derivative(t)(1) == doctest::Approx(2 * t).epsilon(1e-9));
        CHECK(b.second_derivative(t)(0) == doctest::Approx(-std::sin(t)).epsilon(1e-3));
        CHECK(b.second_derivative(t)(1) == doctest::Approx(2.0).epsilon(1e-6));
    }
    CHECK_THROWS_AS(b.derivative(0.0), NumericalError);
}

TEST_CASE("resampling ends on the target and keeps linear data") {
    Trajectory src;
    for (int k = 0; k <= 100; ++k) src.push(0.03 * k, 2.0 * 0.03 * k, 1.0);
    const HistoryBuffer b = HistoryBuffer::resample(src, 0.07, 3.0);
    CHECK(b.t_end() == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(b.t_begin() >= 0.0 - 1e-12);
    CHECK(b.t_begin() < 0.07);
    for (std::size_t k = 0; k < b.size(); ++k) {
        CHECK(b[k](0) == doctest::Approx(2.0 * b.time(k)).epsilon(1e-12));
        CHECK(b[k](1) == doctest::Approx(1.0));
    }
    const Trajectory back = b.to_trajectory();
    CHECK(back.size() == b.size());
    CHECK(back.t.back() == doctest::Approx(3.0));

    Trajectory one;
    one.push(0.0, 1.0, 1.0);
    CHECK_THROWS_AS(HistoryBuffer::resample(one, 0.1, 0.0), ConfigError);
    CHECK_THROWS_AS(HistoryBuffer::resample(src, 0.0, 3.0), ConfigError);
}
