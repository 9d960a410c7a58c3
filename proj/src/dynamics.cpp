#include "krylab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "krylab/errors.hpp"

namespace krylab {

TimeGrid::TimeGrid(double start_, double stop_, std::size_t points_)
    : start(start_), stop(stop_), points(points_) {
    if (!(start >= 0.0) || !(stop > start) || points < 2) {
        std::ostringstream msg;
        msg << "invalid time grid [" << start << ", " << stop << "] x " << points
            << " (need 0 <= start < stop, points >= 2)";
        throw StructuralError(msg.str());
    }
}

double TimeGrid::at(std::size_t i) const {
    if (i + 1 == points) return stop;
    return start + static_cast<double>(i) * spacing();
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> t(points);
    for (std::size_t i = 0; i < points; ++i) t[i] = at(i);
    return t;
}

double ComplexityTrace::max_row_sum_defect() const {
    if (amplitudes_sq.rows() == 0) return 0.0;
    return (amplitudes_sq.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

StateVector evolve(const Hamiltonian& h, const StateVector& psi0, double t) {
    if (psi0.size() != h.dim()) {
        throw StructuralError("evolve: state dimension does not match Hamiltonian");
    }
    if (t == 0.0) return psi0;
    const auto& es = h.spectrum;
    Eigen::VectorXcd coeffs = es.eigenvectors.adjoint() * psi0;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        coeffs(i) *= std::exp(cplx(0.0, -es.eigenvalues(i) * t));
    }
    return es.eigenvectors * coeffs;
}

StateVector evolve(const ComplexMatrix& h, const StateVector& psi0, double t) {
    return evolve(Hamiltonian(h), psi0, t);
}

namespace {

// Overlaps <k_n|phi_j> and <phi_j|psi0>, so that
// kappa(t) = overlaps * (phase(t) .* weights).
struct SpectralProjection {
    ComplexMatrix overlaps;
    Eigen::VectorXcd weights;
    const RealVector* energies;

    SpectralProjection(const KrylovBasis& basis, const Hamiltonian& h, const StateVector& psi0)
        : overlaps(basis.vectors.adjoint() * h.spectrum.eigenvectors),
          weights(h.spectrum.eigenvectors.adjoint() * psi0),
          energies(&h.spectrum.eigenvalues) {
        if (basis.vectors.rows() != h.dim() || psi0.size() != h.dim()) {
            throw StructuralError("amplitudes: basis, Hamiltonian and state dimensions differ");
        }
    }

    Eigen::VectorXcd at(double t) const {
        Eigen::VectorXcd phased(weights.size());
        for (Eigen::Index j = 0; j < weights.size(); ++j) {
            phased(j) = weights(j) * std::exp(cplx(0.0, -(*energies)(j) * t));
        }
        return overlaps * phased;
    }
};

} // namespace

Eigen::VectorXcd krylov_amplitudes(const KrylovBasis& basis, const Hamiltonian& h, const StateVector& psi0,
                                   double t) {
    if (t == 0.0) return basis.vectors.adjoint() * psi0;
    return SpectralProjection(basis, h, psi0).at(t);
}

double spread_complexity(const Eigen::VectorXcd& kappa) {
    double c = 0.0;
    for (Eigen::Index n = 1; n < kappa.size(); ++n) {
        c += static_cast<double>(n) * std::norm(kappa(n));
    }
    return c;
}

namespace {

double weighted_sum(const Eigen::MatrixXd& rows, Eigen::Index r) {
    double c = 0.0;
    for (Eigen::Index n = 1; n < rows.cols(); ++n) c += static_cast<double>(n) * rows(r, n);
    return c;
}

} // namespace

ComplexityTrace amplitudes(const KrylovBasis& basis, const Hamiltonian& h, const StateVector& psi0,
                           const TimeGrid& grid) {
    const SpectralProjection projection(basis, h, psi0);
    const auto m = static_cast<Eigen::Index>(basis.grade());

    ComplexityTrace trace;
    trace.grid = grid;
    trace.order = basis.order;
    trace.dt = basis.dt;
    trace.amplitudes_sq.resize(static_cast<Eigen::Index>(grid.points), m);
    trace.complexity.resize(grid.points);
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double t = grid.at(i);
        const Eigen::VectorXcd kappa =
            t == 0.0 ? Eigen::VectorXcd(basis.vectors.adjoint() * psi0) : projection.at(t);
        const auto row = static_cast<Eigen::Index>(i);
        trace.amplitudes_sq.row(row) = kappa.cwiseAbs2().transpose();
        trace.complexity[i] = weighted_sum(trace.amplitudes_sq, row);
    }

    const double defect = trace.max_row_sum_defect();
    if (defect > 1e-6) {
        std::ostringstream msg;
        msg << "amplitudes: probability leaks out of the order-" << basis.order.label()
            << " basis (max row-sum defect " << defect << ", grade " << basis.grade()
            << "); grade detection failed upstream";
        throw BasisIncompleteError(msg.str());
    }
    return trace;
}

ComplexityTrace chain_ode_integrate(std::span<const double> a, std::span<const double> b, const TimeGrid& grid) {
    if (a.empty()) throw StructuralError("chain_ode_integrate: empty coefficient list");
    if (b.size() + 1 != a.size()) {
        throw StructuralError("chain_ode_integrate: need a of length m and b of length m-1");
    }
    if (grid.start != 0.0) throw StructuralError("chain_ode_integrate: grid must start at t = 0");

    const std::size_t m = a.size();
    double scale = 1.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    for (double x : b) scale = std::max(scale, std::abs(x));
    const double spacing = grid.spacing();
    const double h_max = std::min(spacing, 1e-3 / scale);
    const auto substeps = static_cast<std::size_t>(std::ceil(spacing / h_max - 1e-12));
    const double h = spacing / static_cast<double>(substeps);

    // d/dt kappa = -i T kappa, T tridiagonal with diagonal a and off-diagonal b.
    auto rhs = [&](const Eigen::VectorXcd& k, Eigen::VectorXcd& out) {
        for (std::size_t n = 0; n < m; ++n) {
            cplx acc = a[n] * k(static_cast<Eigen::Index>(n));
            if (n > 0) acc += b[n - 1] * k(static_cast<Eigen::Index>(n - 1));
            if (n + 1 < m) acc += b[n] * k(static_cast<Eigen::Index>(n + 1));
            out(static_cast<Eigen::Index>(n)) = cplx(0.0, -1.0) * acc;
        }
    };

    const auto dim = static_cast<Eigen::Index>(m);
    Eigen::VectorXcd kappa = Eigen::VectorXcd::Zero(dim);
    kappa(0) = 1.0;
    Eigen::VectorXcd k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

    ComplexityTrace trace;
    trace.grid = grid;
    trace.order = GeneratorOrder::finite(1);
    trace.amplitudes_sq.resize(static_cast<Eigen::Index>(grid.points), dim);
    trace.complexity.resize(grid.points);

    double drift = 0.0;
    for (std::size_t i = 0; i < grid.points; ++i) {
        if (i > 0) {
            for (std::size_t s = 0; s < substeps; ++s) {
                rhs(kappa, k1);
                tmp = kappa + (0.5 * h) * k1;
                rhs(tmp, k2);
                tmp = kappa + (0.5 * h) * k2;
                rhs(tmp, k3);
                tmp = kappa + h * k3;
                rhs(tmp, k4);
                kappa += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
        const auto row = static_cast<Eigen::Index>(i);
        trace.amplitudes_sq.row(row) = kappa.cwiseAbs2().transpose();
        trace.complexity[i] = weighted_sum(trace.amplitudes_sq, row);
        drift = std::max(drift, std::abs(kappa.squaredNorm() - 1.0));
    }
    if (drift > 1e-6) {
        std::ostringstream msg;
        msg << "chain_ode_integrate: norm drift " << drift << " exceeds 1e-6 with step " << h
            << "; use a finer grid or smaller step";
        throw StepSizeError(msg.str());
    }
    return trace;
}

std::vector<double> complexity_difference(const ComplexityTrace& trace_p, const ComplexityTrace& trace_1) {
    if (!(trace_p.grid == trace_1.grid) || trace_p.complexity.size() != trace_1.complexity.size()) {
        throw StructuralError("complexity_difference: traces are on different time grids");
    }
    std::vector<double> diff(trace_p.complexity.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = trace_p.complexity[i] - trace_1.complexity[i];
    }
    return diff;
}

double window_mean(const TimeGrid& grid, std::span<const double> values, double lo, double hi, double scale,
                   bool include_lo) {
    if (values.size() != grid.points) {
        throw StructuralError("window_mean: value count does not match grid");
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double x = grid.at(i) * scale;
        const bool above = include_lo ? x >= lo : x > lo;
        if (above && x <= hi) {
            sum += values[i];
            ++count;
        }
    }
    if (count == 0) throw StructuralError("window_mean: no grid points in window");
    return sum / static_cast<double>(count);
}

} // namespace krylab
