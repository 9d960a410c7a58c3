#include "krylab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "krylab/ensemble.hpp"
#include "krylab/errors.hpp"
#include "krylab/rng.hpp"
#include "krylab/timescales.hpp"

namespace krylab {

ProjectedMatrix project_hamiltonian(const KrylovBasis& basis, const Hamiltonian& h, double support_threshold) {
    if (basis.vectors.rows() != h.dim()) {
        throw StructuralError("project_hamiltonian: basis and Hamiltonian dimensions differ");
    }
    ProjectedMatrix m;
    m.entries = basis.vectors.adjoint() * h.matrix * basis.vectors;
    m.order = basis.order;
    m.dt = basis.dt;
    m.support_threshold = support_threshold;

    const double scale = m.entries.cwiseAbs().maxCoeff();
    if (hermiticity_defect(m.entries) > 1e-9 * scale) {
        throw NumericError("project_hamiltonian: projected matrix is not Hermitian");
    }
    return m;
}

BandwidthProfile bandwidth_profile(const ProjectedMatrix& m) {
    const Eigen::Index n = m.entries.rows();
    BandwidthProfile p;
    p.mask = (m.entries.cwiseAbs().array() > m.support_threshold).matrix();
    std::size_t count = 0;
    double band_sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!p.mask(i, j)) continue;
            const auto band = static_cast<std::size_t>(std::abs(i - j));
            p.max_band = std::max(p.max_band, band);
            band_sum += static_cast<double>(band);
            ++count;
        }
    }
    if (count == 0) {
        throw NumericError("bandwidth_profile: no entries above threshold " + std::to_string(m.support_threshold));
    }
    p.mean_band = band_sum / static_cast<double>(count);
    return p;
}

double off_tridiagonal_max(const ProjectedMatrix& m) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
            if (std::abs(i - j) > 1) worst = std::max(worst, std::abs(m.entries(i, j)));
        }
    }
    return worst;
}

std::vector<double> TauSweep::taus(double tau_h) const {
    if (points < 1 || !(min_fraction > 0.0) || !(min_fraction <= 1.0) || !(tau_h > 0.0)) {
        throw StructuralError("TauSweep: need points >= 1, 0 < min_fraction <= 1, tau_H > 0");
    }
    std::vector<double> out(points);
    for (std::size_t k = 0; k < points; ++k) {
        const double frac = points == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(points - 1);
        out[k] = tau_h * std::pow(min_fraction, 1.0 - frac);
    }
    out.back() = tau_h;
    return out;
}

namespace {

cplx component(const Eigen::VectorXcd& v, Eigen::Index n) { return n < v.size() ? v(n) : cplx(0.0); }

} // namespace

Theorem1Report verify_theorem1(std::size_t trials, std::size_t dim, const TauSweep& sweep, std::uint64_t seed,
                               double deflation_tol, GeneratorSign sign) {
    if (dim < 3) throw StructuralError("verify_theorem1: dim must be >= 3");
    if (trials < 1) throw StructuralError("verify_theorem1: trials must be >= 1");

    Theorem1Report report;
    report.trials = trials;
    report.dim = dim;
    report.seed = seed;
    report.min_margin = std::numeric_limits<double>::infinity();

    constexpr int kMaxResamples = 64;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        std::uint64_t trial_seed = derive_seed(seed, trial);
        int attempt = 0;
        for (;;) {
            const Hamiltonian h(sample_gue({dim, trial_seed, false}));
            const StateVector psi0 = uniform_eigenstate_superposition(h.spectrum).psi;
            const KrylovBasis first = build_basis(h, GeneratorOrder::finite(1), 0.0, psi0, deflation_tol);
            if (first.grade() < 3) {
                if (++attempt > kMaxResamples) {
                    throw NumericError("verify_theorem1: could not draw a grade >= 3 sample");
                }
                ++report.resamples;
                trial_seed = derive_seed(trial_seed, static_cast<std::uint64_t>(attempt));
                continue;
            }
            const bool grade3 = first.grade() == 3;
            if (grade3) ++report.grade3_trials;

            const TimescaleReport ts = compute_timescales(h, first.grade());
            for (double tau : sweep.taus(ts.tau_H)) {
                const KrylovBasis inf = build_basis(h, GeneratorOrder::infinite(), tau, psi0, deflation_tol, sign);
                const Eigen::VectorXcd k1 = krylov_amplitudes(first, h, psi0, tau);
                const Eigen::VectorXcd kinf = krylov_amplitudes(inf, h, psi0, tau);

                Theorem1Record rec;
                rec.trial = trial;
                rec.seed = trial_seed;
                rec.tau = tau;
                rec.c1 = spread_complexity(k1);
                rec.c_inf = spread_complexity(kinf);
                rec.margin = rec.c1 - rec.c_inf;
                if (!(rec.c_inf < rec.c1)) ++report.violations;
                report.min_margin = std::min(report.min_margin, rec.margin);
                report.records.push_back(rec);

                if (grade3) {
                    report.max_kappa0_defect =
                        std::max(report.max_kappa0_defect, std::abs(component(k1, 0) - component(kinf, 0)));
                    report.max_kappa2_inf = std::max(report.max_kappa2_inf, std::abs(component(kinf, 2)));
                    const double transfer = std::norm(component(kinf, 1)) - std::norm(component(k1, 1)) -
                                            std::norm(component(k1, 2));
                    report.max_transfer_defect = std::max(report.max_transfer_defect, std::abs(transfer));
                }
            }
            break;
        }
    }
    return report;
}

TaylorCheck small_time_taylor(const Hamiltonian& h, const StateVector& psi0, double t_scale) {
    const KrylovBasis basis = build_basis(h, GeneratorOrder::finite(1), 0.0, psi0);
    if (basis.grade() < 3) {
        throw StructuralError("small_time_taylor: needs Krylov grade >= 3, got " + std::to_string(basis.grade()));
    }
    const LanczosCoefficients c = lanczos_coefficients(basis);
    TaylorCheck out;
    out.t = t_scale / h.norm();
    out.b1 = c.b[0];
    out.b2 = c.b[1];
    const Eigen::VectorXcd kappa = krylov_amplitudes(basis, h, psi0, out.t);
    const cplx k1_lead(0.0, -out.b1 * out.t);
    const double k2_lead = -0.5 * out.b1 * out.b2 * out.t * out.t;
    out.kappa1_rel_error = std::abs(kappa(1) - k1_lead) / std::abs(k1_lead);
    out.kappa2_rel_error = std::abs(kappa(2) - k2_lead) / std::abs(k2_lead);
    return out;
}

double forward_leakage(const KrylovBasis& basis, const Hamiltonian& h, const StateVector& psi0) {
    if (!basis.order.is_infinite() || basis.sign != GeneratorSign::Backward) {
        throw StructuralError("forward_leakage: needs an infinite-order basis built from e^{-iH dt}");
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < basis.grade(); ++k) {
        const Eigen::VectorXcd kappa = krylov_amplitudes(basis, h, psi0, static_cast<double>(k) * basis.dt);
        for (Eigen::Index n = static_cast<Eigen::Index>(k) + 1; n < kappa.size(); ++n) {
            worst = std::max(worst, std::abs(kappa(n)));
        }
    }
    return worst;
}

} // namespace krylab
