#pragma once

#include <cstddef>
#include <vector>

#include "amodelay/types.hpp"

namespace amodelay {

/// Uniformly spaced (T1, T2) record with linear interpolation. Sample k sits
/// at time t_begin + k * spacing.
class HistoryBuffer {
public:
    HistoryBuffer() = default;
    HistoryBuffer(double t_begin, double spacing);

    /// Builds a buffer by linear resampling of an arbitrary uniform record so
    /// that the last sample lands exactly on `t_end_target`.
    static HistoryBuffer resample(const Trajectory& src, double spacing, double t_end_target);

    void push_back(const Vec2& v) { values_.push_back(v); }
    void reserve(std::size_t n) { values_.reserve(n); }

    double spacing() const { return h_; }
    double t_begin() const { return t0_; }
    double t_end() const;
    double time(std::size_t k) const { return t0_ + static_cast<double>(k) * h_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    const Vec2& operator[](std::size_t k) const { return values_[k]; }
    const Vec2& back() const { return values_.back(); }

    /// True when t lies within the stored span (with a small tolerance).
    bool covers(double t) const;

    /// Linearly interpolated value. Throws NumericalError outside the span.
    Vec2 at(double t) const;

    /// Centered differences of the interpolant with the native spacing.
    Vec2 derivative(double t) const;
    Vec2 second_derivative(double t) const;

    Trajectory to_trajectory() const;

private:
    double t0_ = 0.0;
    double h_ = 1.0;
    std::vector<Vec2> values_;
};

}  // namespace amodelay
