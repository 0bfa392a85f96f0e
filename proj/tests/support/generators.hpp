#pragma once

// Seeded generators for property tests.

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "amodelay/params.hpp"

namespace testsupport {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    /// Positive advection coefficients; the discriminant is then positive.
    amodelay::ModelCoeffs admissible_coeffs() {
        amodelay::ModelCoeffs c;
        c.a1 = uniform(0.02, 1.0);
        c.b1 = uniform(0.02, 1.0);
        c.a2 = uniform(0.02, 1.0);
        c.b2 = uniform(0.02, 1.0);
        return c;
    }

    Eigen::VectorXd vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
        return v;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace testsupport
