#include <doctest.h>

#include <cmath>
#include <numbers>

#include "krylab/errors.hpp"
#include "krylab/linalg.hpp"
#include "oracles.hpp"

using namespace krylab;

namespace {

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("eigendecompose diagonal input") {
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = 2.0;
    h(1, 1) = 1.0;
    const Eigensystem es = hermitian_eigendecompose(h);
    CHECK(es.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(es.eigenvalues(1) == doctest::Approx(2.0));
    // eigenvectors are a permutation of the identity (up to phase)
    CHECK(std::abs(es.eigenvectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(es.eigenvectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("eigendecompose Pauli-X") {
    const Eigensystem es = hermitian_eigendecompose(pauli_x());
    CHECK(es.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(es.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
    const StateVector minus = es.eigenvectors.col(0);
    const StateVector plus = es.eigenvectors.col(1);
    CHECK(std::abs(minus(0) + minus(1)) < 1e-14);
    CHECK(std::abs(plus(0) - plus(1)) < 1e-14);
    CHECK(std::abs(std::abs(minus(0)) - 1.0 / std::numbers::sqrt2) < 1e-14);
}

TEST_CASE("eigendecompose random Hermitian: invariants and independent eigenvalues") {
    for (std::uint32_t seed = 1; seed <= 20; ++seed) {
        const int n = 2 + static_cast<int>(seed % 9);
        const ComplexMatrix h = oracle::random_hermitian(n, seed);
        const Eigensystem es = hermitian_eigendecompose(h);
        for (int i = 0; i + 1 < n; ++i) CHECK(es.eigenvalues(i) <= es.eigenvalues(i + 1));
        const ComplexMatrix& v = es.eigenvectors;
        CHECK(max_abs(v.adjoint() * v - ComplexMatrix::Identity(n, n)) <= 1e-10);
        CHECK(max_abs(es.reconstruct(es.eigenvalues.cast<cplx>()) - h) <= 1e-9 * max_abs(h));
        const Eigen::VectorXd ref = oracle::eigenvalues(h);
        CHECK((es.eigenvalues - ref).cwiseAbs().maxCoeff() <= 1e-11);
    }
}

TEST_CASE("eigendecompose 8x8 reconstruction") {
    const ComplexMatrix h = oracle::random_hermitian(8, 808);
    const Eigensystem es = hermitian_eigendecompose(h);
    CHECK(max_abs(es.reconstruct(es.eigenvalues.cast<cplx>()) - h) <= 1e-9 * max_abs(h));
}

TEST_CASE("eigendecompose rejects bad input") {
    CHECK_THROWS_AS(hermitian_eigendecompose(ComplexMatrix::Zero(2, 3)), StructuralError);
    ComplexMatrix nh(2, 2);
    nh << 0, 1, 2, 0;
    CHECK_THROWS_AS(hermitian_eigendecompose(nh), StructuralError);
    ComplexMatrix complex_diag = ComplexMatrix::Identity(2, 2);
    complex_diag(0, 0) = cplx(1.0, 0.5);
    CHECK_THROWS_AS(hermitian_eigendecompose(complex_diag), StructuralError);
}

TEST_CASE("eigendecompose handles degenerate and zero spectra") {
    const Eigensystem zero = hermitian_eigendecompose(ComplexMatrix::Zero(3, 3));
    CHECK(zero.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
    const Eigensystem ident = hermitian_eigendecompose(ComplexMatrix::Identity(4, 4) * 3.0);
    CHECK((ident.eigenvalues.array() - 3.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("spectral norm") {
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = -3.0;
    d(1, 1) = 2.0;
    CHECK(spectral_norm(d) == doctest::Approx(3.0));
    CHECK(spectral_norm(pauli_x()) == doctest::Approx(1.0).epsilon(1e-14));

    SUBCASE("matches power iteration on a 50x50 Hermitian matrix") {
        const ComplexMatrix h = oracle::random_hermitian(50, 5050);
        const double ours = spectral_norm(h);
        const double ref = oracle::spectral_norm_power(h);
        CHECK(std::abs(ours - ref) <= 1e-8 * ref);
    }
}

TEST_CASE("matrix_function") {
    const ComplexMatrix h = oracle::random_hermitian(6, 66);
    const Eigensystem es = hermitian_eigendecompose(h);

    SUBCASE("identity function returns H") {
        CHECK(max_abs(matrix_function(es, [](double x) { return cplx(x); }) - h) <= 1e-10);
    }
    SUBCASE("exp(-i pi X) squares to the identity") {
        const ComplexMatrix u =
            matrix_function(pauli_x(), [](double x) { return std::exp(cplx(0, -x * std::numbers::pi)); });
        CHECK(max_abs(u * u - ComplexMatrix::Identity(2, 2)) <= 1e-10);
        CHECK(max_abs(u + ComplexMatrix::Identity(2, 2)) <= 1e-10);  // e^{-i pi X} = -I
    }
    SUBCASE("exp(-ixt) on diag(1,2) at t = pi") {
        ComplexMatrix d = ComplexMatrix::Zero(2, 2);
        d(0, 0) = 1.0;
        d(1, 1) = 2.0;
        const ComplexMatrix u = matrix_function(d, [](double x) { return std::exp(cplx(0, -x * std::numbers::pi)); });
        CHECK(std::abs(u(0, 0) - cplx(-1.0)) < 1e-14);
        CHECK(std::abs(u(1, 1) - cplx(1.0)) < 1e-14);
        CHECK(std::abs(u(0, 1)) < 1e-14);
    }
    SUBCASE("unitary and matches an independent Taylor exponential") {
        const double t = 1.7;
        const ComplexMatrix u = matrix_function(es, [t](double x) { return std::exp(cplx(0, -x * t)); });
        CHECK(max_abs(u.adjoint() * u - ComplexMatrix::Identity(6, 6)) <= 1e-10);
        CHECK(max_abs(u - oracle::expm_taylor(h, cplx(0, -t))) <= 1e-10);
    }
    SUBCASE("forward and backward evolution compose to the identity") {
        for (double t : {0.3, 2.0, 11.0}) {
            const ComplexMatrix f = matrix_function(es, [t](double x) { return std::exp(cplx(0, -x * t)); });
            const ComplexMatrix b = matrix_function(es, [t](double x) { return std::exp(cplx(0, x * t)); });
            CHECK(max_abs(f * b - ComplexMatrix::Identity(6, 6)) <= 1e-9);
        }
    }
}

TEST_CASE("orthonormalize") {
    SUBCASE("already orthonormal input is unchanged") {
        std::vector<StateVector> in{StateVector::Unit(2, 0), StateVector::Unit(2, 1)};
        const OrthonormalSet out = orthonormalize(in);
        REQUIRE(out.basis.size() == 2);
        CHECK(out.kept_indices == std::vector<std::size_t>{0, 1});
        CHECK((out.basis[0] - in[0]).norm() < 1e-15);
        CHECK((out.basis[1] - in[1]).norm() < 1e-15);
    }
    SUBCASE("exact duplicate is deflated") {
        std::vector<StateVector> in{StateVector::Unit(2, 0), StateVector::Unit(2, 0)};
        const OrthonormalSet out = orthonormalize(in);
        CHECK(out.basis.size() == 1);
        CHECK(out.kept_indices == std::vector<std::size_t>{0});
    }
    SUBCASE("six random vectors in dimension four") {
        std::vector<StateVector> in;
        for (std::uint32_t s = 0; s < 6; ++s) in.push_back(oracle::random_unit_vector(4, 100 + s));
        REQUIRE(oracle::gram_rank(as_columns(in)) == 4);
        const OrthonormalSet out = orthonormalize(in);
        REQUIRE(out.basis.size() == 4);
        CHECK(out.kept_indices == std::vector<std::size_t>{0, 1, 2, 3});
        const ComplexMatrix q = as_columns(out.basis);
        CHECK(max_abs(q.adjoint() * q - ComplexMatrix::Identity(4, 4)) <= 1e-10);
    }
    SUBCASE("empty input and bad tolerance") {
        CHECK_THROWS_AS(orthonormalize({}), StructuralError);
        std::vector<StateVector> in{StateVector::Unit(2, 0)};
        CHECK_THROWS_AS(orthonormalize(in, 0.0), StructuralError);
    }
}

TEST_CASE("orthonormalize property: orthonormal output spanning every input") {
    for (std::uint32_t trial = 0; trial < 30; ++trial) {
        const int dim = 3 + static_cast<int>(trial % 6);
        const int count = 1 + static_cast<int>((trial * 7) % 9);
        std::vector<StateVector> in;
        for (int k = 0; k < count; ++k) {
            StateVector v = oracle::random_unit_vector(dim, trial * 31 + static_cast<std::uint32_t>(k));
            // every third vector is a combination of the previous two
            if (k >= 2 && k % 3 == 2) v = 0.3 * in[k - 1] - cplx(0, 1.2) * in[k - 2];
            in.push_back(v);
        }
        const double tol = 1e-8;
        const OrthonormalSet out = orthonormalize(in, tol);
        const ComplexMatrix q = as_columns(out.basis);
        const auto m = static_cast<Eigen::Index>(out.basis.size());
        CHECK(max_abs(q.adjoint() * q - ComplexMatrix::Identity(m, m)) <= 1e-10);
        CHECK(m == oracle::gram_rank(as_columns(in), 1e-12));
        for (const auto& v : in) {
            const StateVector proj = q * (q.adjoint() * v);
            CHECK((proj - v).norm() <= tol * v.norm());
        }
    }
}
