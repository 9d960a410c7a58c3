#pragma once

#include <cstdint>
#include <vector>

#include "krylab/dynamics.hpp"
#include "krylab/krylov.hpp"
#include "krylab/linalg.hpp"

namespace krylab {

inline constexpr double kDefaultSupportThreshold = 1e-6;

/// H in a generator's orthonormal basis: entries(i, j) = <b_i|H|b_j>.
/// For the first-order generator this is the Lanczos tridiagonal matrix;
/// higher orders fill in progressively more bands.
struct ProjectedMatrix {
    ComplexMatrix entries;
    GeneratorOrder order = GeneratorOrder::finite(1);
    double dt = 0.0;
    double support_threshold = kDefaultSupportThreshold;
};

ProjectedMatrix project_hamiltonian(const KrylovBasis& basis, const Hamiltonian& h,
                                    double support_threshold = kDefaultSupportThreshold);

struct BandwidthProfile {
    std::size_t max_band = 0;
    double mean_band = 0.0;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
};

/// Support mask |M_ij| > threshold and the |i - j| statistics over it.
/// Throws NumericError if nothing is above threshold.
BandwidthProfile bandwidth_profile(const ProjectedMatrix& m);

/// Largest |<k_i|H|k_j>| with |i - j| > 1.
double off_tridiagonal_max(const ProjectedMatrix& m);

/// Log-spaced tau values in (0, tau_H]: tau_k = tau_H * min_fraction^{1 - k/(points-1)}.
struct TauSweep {
    std::size_t points = 20;
    double min_fraction = 1e-2;

    std::vector<double> taus(double tau_h) const;
};

struct Theorem1Record {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double tau = 0.0;
    double c1 = 0.0;
    double c_inf = 0.0;
    double margin = 0.0;  // c1 - c_inf
};

struct Theorem1Report {
    std::size_t trials = 0;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::size_t violations = 0;
    std::size_t resamples = 0;
    double min_margin = 0.0;
    /// Proof-step identities, maxima over all grade-3 (trial, tau) pairs.
    double max_kappa0_defect = 0.0;      // | kappa^(1)_0 - kappa^(inf)_0 |
    double max_kappa2_inf = 0.0;         // | kappa^(inf)_2(tau) |
    double max_transfer_defect = 0.0;    // | |k1inf|^2 - |k1|^2 - |k2|^2 |
    std::size_t grade3_trials = 0;
    std::vector<Theorem1Record> records;
};

/// Samples `trials` GUE Hamiltonians of size `dim` (per-trial seeds derived
/// from `seed`), builds the uniform superposition, and for every tau in the
/// sweep compares the first-order basis with the infinite-order basis built
/// at dt = tau, both evaluated at t = tau. Samples with first-order grade < 3
/// are redrawn from a further derived seed.
Theorem1Report verify_theorem1(std::size_t trials, std::size_t dim, const TauSweep& sweep, std::uint64_t seed,
                               double deflation_tol = kDefaultDeflationTol,
                               GeneratorSign sign = GeneratorSign::Backward);

struct TaylorCheck {
    double t = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double kappa1_rel_error = 0.0;  // |kappa_1 + i b1 t| / (b1 t)
    double kappa2_rel_error = 0.0;  // |kappa_2 + (b1 b2 / 2) t^2| / ((b1 b2 / 2) t^2)
};

/// Compares first-order amplitudes at t = t_scale / ||H|| with their leading
/// Taylor terms. Needs first-order grade >= 3.
TaylorCheck small_time_taylor(const Hamiltonian& h, const StateVector& psi0, double t_scale = 1e-3);

/// max |kappa_n(k dt)| over k < grade and n > k for an infinite-order basis.
double forward_leakage(const KrylovBasis& basis, const Hamiltonian& h, const StateVector& psi0);

} // namespace krylab
