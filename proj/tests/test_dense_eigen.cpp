#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "amodelay/dense_eigen.hpp"
#include "amodelay/errors.hpp"
#include "amodelay/mz_reduce.hpp"
#include "amodelay/pde_sim.hpp"
#include "amodelay/spectral.hpp"
#include "support/generators.hpp"

using namespace amodelay;

TEST_CASE("diagonal matrix") {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(5, 5);
    D.diagonal() << 3.0, -1.0, 0.5, 7.0, -2.5;
    const EigenSet e = dense_eigensolver(D);
    CHECK(e.converged);
    std::vector<Complex> expect;
    for (int i = 0; i < 5; ++i) expect.emplace_back(D(i, i), 0.0);
    CHECK(multiset_distance(e.values, expect) < 1e-14);
    for (double r : e.residuals) CHECK(r < 1e-12);
}

TEST_CASE("rotation generator") {
    Eigen::MatrixXd R(2, 2);
    R << 0, 1, -1, 0;
    const EigenSet e = dense_eigensolver(R);
    CHECK(multiset_distance(e.values, {Complex(0, 1), Complex(0, -1)}) < 1e-14);
    REQUIRE(e.vectors.size() == 2);
    for (double r : e.residuals) CHECK(r < 1e-12);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(dense_eigensolver(Eigen::MatrixXd::Zero(2, 3)), ConfigError);
    CHECK_THROWS_AS(dense_eigensolver(Eigen::MatrixXd::Zero(1025, 1025)), ConfigError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
    bad(1, 2) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(dense_eigensolver(bad), NumericalError);
    CHECK(dense_eigensolver(Eigen::MatrixXd(0, 0)).values.empty());
}

TEST_CASE("random matrices agree with a library solver") {
    testsupport::Gen gen(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = gen.integer(2, 60);
        Eigen::MatrixXd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = gen.normal();
        const EigenSet e = dense_eigensolver(A);
        const Eigen::EigenSolver<Eigen::MatrixXd> ref(A, false);
        std::vector<Complex> expect(ref.eigenvalues().data(), ref.eigenvalues().data() + n);
        CAPTURE(n);
        CHECK(e.converged);
        CHECK(multiset_distance(e.values, expect) < 1e-9);
        for (double r : e.residuals) CHECK(r < 1e-8);
    }
}

TEST_CASE("Hessenberg reduction preserves the spectrum") {
    testsupport::Gen gen(3);
    Eigen::MatrixXd A(12, 12);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) A(i, j) = gen.normal();
    Eigen::MatrixXd H = A;
    hessenberg_reduce(H);
    for (int i = 2; i < 12; ++i)
        for (int j = 0; j < i - 1; ++j) CHECK(H(i, j) == 0.0);
    CHECK(H.trace() == doctest::Approx(A.trace()).epsilon(1e-12));
    CHECK(H.norm() == doctest::Approx(A.norm()).epsilon(1e-12));
}

TEST_CASE("discretized model: QR equals the closed form") {
    ModelCoeffs c = derive_coeffs(PhysicalParams{});
    for (double alpha : {0.0, 0.01}) {
        c.alpha = alpha;
        for (int N : {4, 8, 16, 32}) {
            const EigenSet qr = dense_eigensolver(build_system_matrix(c, N, ModelVariant::two_layer));
            const EigenSet cf = discrete_eigen_closed_form(c, N);
            CAPTURE(N);
            CHECK(qr.converged);
            CHECK(multiset_distance(qr.values, cf.values) <= 1e-8);
            for (const Complex& z : qr.values) CHECK(z.real() <= -alpha + 1e-12);
        }
    }
}

TEST_CASE("both-variable projection: QR equals the Jordan structure") {
    ModelCoeffs c = derive_coeffs(PhysicalParams{});
    c.alpha = 0.001;
    for (int N : {4, 8, 16}) {
        const Eigen::MatrixXd MQ =
            build_system_matrix(c, N, ModelVariant::two_layer, resolved_indices(Resolved::both));
        DenseEigenOptions o;
        o.residuals = false;
        const EigenSet qr = dense_eigensolver(MQ, o);
        const EigenSet cf = orthogonal_spectrum(c, N, Resolved::both);
        CAPTURE(N);
        CHECK(qr.values.size() == static_cast<std::size_t>(2 * (N - 1)));
        CHECK(multiset_distance(qr.values, cf.values) <= 1e-8);
    }
}

TEST_CASE("inverse iteration and multiset distance") {
    Eigen::MatrixXd A(3, 3);
    A << 2, 1, 0, 0, 3, 1, 0, 0, 5;
    const Eigen::VectorXcd v = inverse_iteration(A, Complex(3.0001, 0));
    CHECK((A.cast<Complex>() * v - 3.0 * v).norm() < 1e-6 * v.norm());
    CHECK(std::isinf(multiset_distance({Complex(1, 0)}, {})));
    CHECK(multiset_distance({Complex(1, 0), Complex(2, 0)}, {Complex(2, 0), Complex(1, 1e-3)}) ==
          doctest::Approx(1e-3));
}
