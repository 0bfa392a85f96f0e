#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace amodelay {

using Complex = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using CVec2 = Eigen::Vector2cd;
using CMat2 = Eigen::Matrix2cd;

/// Uniformly sampled (T1, T2) record at one location.
struct Trajectory {
    std::vector<double> t;
    std::vector<double> T1;
    std::vector<double> T2;

    std::size_t size() const { return t.size(); }
    bool empty() const { return t.empty(); }

    void push(double time, double v1, double v2) {
        t.push_back(time);
        T1.push_back(v1);
        T2.push_back(v2);
    }
    void push(double time, const Vec2& v) { push(time, v(0), v(1)); }

    Vec2 value(std::size_t i) const { return Vec2(T1[i], T2[i]); }

    /// Component by layer index (1 or 2).
    const std::vector<double>& component(int layer) const { return layer == 2 ? T2 : T1; }
};

}  // namespace amodelay
