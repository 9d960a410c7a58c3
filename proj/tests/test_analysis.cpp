#include <doctest.h>

#include <cmath>

#include "krylab/analysis.hpp"
#include "krylab/ensemble.hpp"
#include "krylab/errors.hpp"
#include "krylab/rng.hpp"
#include "krylab/timescales.hpp"
#include "oracles.hpp"

using namespace krylab;

namespace {

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ProjectedMatrix wrap(ComplexMatrix entries, double threshold = kDefaultSupportThreshold) {
    ProjectedMatrix m;
    m.entries = std::move(entries);
    m.support_threshold = threshold;
    return m;
}

// Spread complexity at t from a Householder-QR basis of raw generator powers.
double oracle_complexity(const ComplexMatrix& g, const ComplexMatrix& h, const StateVector& psi0, double t) {
    const auto n = psi0.size();
    ComplexMatrix raw(n, n);
    StateVector v = psi0;
    for (Eigen::Index k = 0; k < n; ++k) {
        raw.col(k) = v / v.norm();
        v = g * v;
    }
    const ComplexMatrix q = Eigen::HouseholderQR<ComplexMatrix>(raw).householderQ() * ComplexMatrix::Identity(n, n);
    const StateVector psi_t = oracle::expm_taylor(h, cplx(0, -t)) * psi0;
    double c = 0.0;
    for (Eigen::Index k = 1; k < n; ++k) c += static_cast<double>(k) * std::norm(q.col(k).dot(psi_t));
    return c;
}

} // namespace

TEST_CASE("projection of Pauli-X onto its own Krylov basis") {
    const Hamiltonian h(pauli_x());
    const KrylovBasis b = build_basis(h, GeneratorOrder::finite(1), 0.0, StateVector::Unit(2, 0));
    const ProjectedMatrix m = project_hamiltonian(b, h);
    CHECK(std::abs(m.entries(0, 0)) < 1e-15);
    CHECK(std::abs(m.entries(1, 1)) < 1e-15);
    CHECK(std::abs(m.entries(0, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(m.entries(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("first-order projection is tridiagonal with Lanczos entries") {
    const Hamiltonian h(sample_gue({10, 4, false}));
    const StateVector psi = uniform_eigenstate_superposition(h.spectrum).psi;
    const KrylovBasis b = build_basis(h, GeneratorOrder::finite(1), 0.0, psi);
    const ProjectedMatrix m = project_hamiltonian(b, h);
    CHECK(off_tridiagonal_max(m) <= 1e-10 * h.norm());
    const LanczosCoefficients c = lanczos_coefficients(b);
    for (std::size_t i = 0; i < c.a.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        CHECK(std::abs(m.entries(k, k) - c.a[i]) <= 1e-10);
        if (i + 1 < c.a.size()) CHECK(std::abs(m.entries(k, k + 1) - c.b[i]) <= 1e-10);
    }
    CHECK(bandwidth_profile(m).max_band == 1);
}

TEST_CASE("bandwidth profile") {
    SUBCASE("full tridiagonal") {
        ComplexMatrix t = ComplexMatrix::Zero(4, 4);
        for (int i = 0; i < 4; ++i) t(i, i) = 1.0;
        for (int i = 0; i < 3; ++i) t(i, i + 1) = t(i + 1, i) = 0.5;
        const BandwidthProfile p = bandwidth_profile(wrap(t));
        CHECK(p.max_band == 1);
        CHECK(p.mean_band == doctest::Approx(6.0 / 10.0));
        CHECK(p.mask.count() == 10);
    }
    SUBCASE("diagonal") {
        const BandwidthProfile p = bandwidth_profile(wrap(ComplexMatrix::Identity(3, 3)));
        CHECK(p.max_band == 0);
        CHECK(p.mean_band == 0.0);
    }
    SUBCASE("threshold excludes small entries") {
        ComplexMatrix t = ComplexMatrix::Identity(3, 3);
        t(0, 2) = t(2, 0) = 1e-7;
        CHECK(bandwidth_profile(wrap(t)).max_band == 0);
        CHECK(bandwidth_profile(wrap(t, 1e-8)).max_band == 2);
    }
    SUBCASE("empty support") {
        CHECK_THROWS_AS(bandwidth_profile(wrap(ComplexMatrix::Zero(3, 3))), NumericError);
    }
}

TEST_CASE("tau sweep") {
    const std::vector<double> t = TauSweep{5, 1e-2}.taus(10.0);
    REQUIRE(t.size() == 5);
    CHECK(t.front() == doctest::Approx(0.1));
    CHECK(t.back() == 10.0);
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] / t[i - 1] == doctest::Approx(std::sqrt(10.0)));
    CHECK_THROWS_AS((TauSweep{5, 0.0}.taus(1.0)), StructuralError);
    CHECK_THROWS_AS((TauSweep{5, 0.1}.taus(0.0)), StructuralError);
}

TEST_CASE("first-order vs infinite-order comparison against an independent oracle") {
    const std::uint64_t seed = derive_seed(11, 0);
    const Hamiltonian h(sample_gue({3, seed, false}));
    const StateVector psi = uniform_eigenstate_superposition(h.spectrum).psi;
    const double tau_h = compute_timescales(h, 3).tau_H;
    for (double tau : TauSweep{6, 1e-2}.taus(tau_h)) {
        const double c1 = oracle_complexity(h.matrix, h.matrix, psi, tau);
        const double cinf = oracle_complexity(oracle::expm_taylor(h.matrix, cplx(0, -tau)), h.matrix, psi, tau);
        const KrylovBasis b1 = build_basis(h, GeneratorOrder::finite(1), 0.0, psi);
        const KrylovBasis binf = build_basis(h, GeneratorOrder::infinite(), tau, psi);
        CHECK(std::abs(spread_complexity(krylov_amplitudes(b1, h, psi, tau)) - c1) <= 1e-9);
        CHECK(std::abs(spread_complexity(krylov_amplitudes(binf, h, psi, tau)) - cinf) <= 1e-9);
        CHECK(cinf < c1);
    }
}

TEST_CASE("verify_theorem1 small run") {
    const Theorem1Report r = verify_theorem1(10, 3, TauSweep{8, 1e-2}, 5);
    CHECK(r.trials == 10);
    CHECK(r.records.size() == 80);
    CHECK(r.violations == 0);
    CHECK(r.min_margin > 0.0);
    CHECK(r.grade3_trials == 10);
    CHECK(r.max_kappa0_defect <= 1e-10);
    CHECK(r.max_kappa2_inf <= 1e-10);
    CHECK(r.max_transfer_defect <= 1e-10);
    for (const auto& rec : r.records) CHECK(rec.margin == rec.c1 - rec.c_inf);

    const Theorem1Report again = verify_theorem1(10, 3, TauSweep{8, 1e-2}, 5);
    CHECK(again.min_margin == r.min_margin);

    CHECK_THROWS_AS(verify_theorem1(10, 2, TauSweep{}, 5), StructuralError);
    CHECK_THROWS_AS(verify_theorem1(0, 3, TauSweep{}, 5), StructuralError);
}

TEST_CASE("small-time Taylor coefficients") {
    const Hamiltonian h(sample_gue({6, 66, false}));
    const StateVector psi = uniform_eigenstate_superposition(h.spectrum).psi;
    const TaylorCheck c = small_time_taylor(h, psi);
    CHECK(c.b1 > 0.0);
    CHECK(c.b2 > 0.0);
    CHECK(c.kappa1_rel_error <= 1e-3);
    CHECK(c.kappa2_rel_error <= 1e-3);

    const Eigensystem es = hermitian_eigendecompose(h.matrix);
    StateVector two = (es.eigenvectors.col(0) + es.eigenvectors.col(1)) / std::sqrt(2.0);
    CHECK_THROWS_AS(small_time_taylor(h, two), StructuralError);
}

TEST_CASE("forward leakage vanishes for the backward exponential") {
    const Hamiltonian h(sample_gue({8, 8, false}));
    const StateVector psi = uniform_eigenstate_superposition(h.spectrum).psi;
    const KrylovBasis b = build_basis(h, GeneratorOrder::infinite(), 0.2, psi);
    CHECK(forward_leakage(b, h, psi) <= 1e-10);

    const KrylovBasis fwd = build_basis(h, GeneratorOrder::infinite(), 0.2, psi, kDefaultDeflationTol,
                                        GeneratorSign::Forward);
    CHECK_THROWS_AS(forward_leakage(fwd, h, psi), StructuralError);
    CHECK_THROWS_AS(forward_leakage(build_basis(h, GeneratorOrder::finite(1), 0.0, psi), h, psi), StructuralError);
}

TEST_CASE("large-step infinite-order projection spreads beyond half the grade") {
    const Hamiltonian h(sample_gue({50, 2024, false}));
    const StateVector psi = uniform_eigenstate_superposition(h.spectrum).psi;
    const double dt = 1.5 * compute_timescales(h, 50).dt_scr;
    const KrylovBasis b = build_basis(h, GeneratorOrder::infinite(), dt, psi);
    REQUIRE(b.grade() == 50);
    CHECK(bandwidth_profile(project_hamiltonian(b, h)).max_band > 25);
}
