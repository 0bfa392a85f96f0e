#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "amodelay/types.hpp"

namespace amodelay {

/// A set of eigenvalues with optional eigenvectors and residuals.
struct EigenSet {
    std::vector<Complex> values;
    std::string label;
    std::vector<Eigen::VectorXcd> vectors;
    /// ||M v - lambda v|| / ||v|| per eigenvalue, when computed.
    std::vector<double> residuals;
    bool converged = true;
};

struct DenseEigenOptions {
    bool residuals = true;
    int max_iterations_per_value = 60;
};

/// Complete spectrum of a real square matrix (dimension <= 1024) by
/// Householder reduction to Hessenberg form and Francis double-shift QR.
/// On iteration failure the values found so far are returned with
/// `converged == false`.
EigenSet dense_eigensolver(const Eigen::MatrixXd& M, const DenseEigenOptions& opts = {},
                           const std::string& label = "qr");

/// Reduces `a` in place to upper Hessenberg form by Householder similarity.
void hessenberg_reduce(Eigen::MatrixXd& a);

/// Eigenvector for an approximate eigenvalue by shifted inverse iteration.
Eigen::VectorXcd inverse_iteration(const Eigen::MatrixXd& M, Complex lambda, int iterations = 3);

/// Greedy nearest-neighbour matching distance between two multisets.
/// Returns +inf when the sizes differ.
double multiset_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

}  // namespace amodelay
