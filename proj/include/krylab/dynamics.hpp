#pragma once

#include <span>
#include <vector>

#include "krylab/krylov.hpp"
#include "krylab/linalg.hpp"

namespace krylab {

/// Uniform grid, endpoints included.
struct TimeGrid {
    double start = 0.0;
    double stop = 1.0;
    std::size_t points = 2;

    TimeGrid() = default;
    TimeGrid(double start, double stop, std::size_t points);

    double spacing() const { return (stop - start) / static_cast<double>(points - 1); }
    double at(std::size_t i) const;
    std::vector<double> times() const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

struct ComplexityTrace {
    TimeGrid grid;
    /// |kappa_n(t)|^2, one row per grid time, one column per level n.
    Eigen::MatrixXd amplitudes_sq;
    /// C(t) = sum_n n |kappa_n(t)|^2
    std::vector<double> complexity;
    GeneratorOrder order = GeneratorOrder::finite(1);
    double dt = 0.0;

    std::size_t levels() const { return static_cast<std::size_t>(amplitudes_sq.cols()); }
    /// max_t |sum_n |kappa_n(t)|^2 - 1|
    double max_row_sum_defect() const;
};

/// e^{-iHt} psi0 by spectral calculus.
StateVector evolve(const Hamiltonian& h, const StateVector& psi0, double t);
StateVector evolve(const ComplexMatrix& h, const StateVector& psi0, double t);

/// kappa_n(t) = <k_n | psi(t)> for every basis vector.
Eigen::VectorXcd krylov_amplitudes(const KrylovBasis& basis, const Hamiltonian& h, const StateVector& psi0,
                                   double t);

/// sum_n n |kappa_n|^2
double spread_complexity(const Eigen::VectorXcd& kappa);

/// Trace of |kappa_n(t)|^2 and C(t) over the grid. Throws BasisIncompleteError
/// when any row sum deviates from 1 by more than 1e-6.
ComplexityTrace amplitudes(const KrylovBasis& basis, const Hamiltonian& h, const StateVector& psi0,
                           const TimeGrid& grid);

/// Integrates i d/dt kappa_n = b_n kappa_{n-1} + a_n kappa_n + b_{n+1} kappa_{n+1}
/// from kappa(0) = e_0 with classical RK4. `b` holds b_1..b_{m-1}. The step is
/// min(grid spacing, 1e-3 / max(|a|_inf, |b|_inf, 1)), shrunk to divide the
/// spacing evenly. Throws StepSizeError if the norm drifts by more than 1e-6.
ComplexityTrace chain_ode_integrate(std::span<const double> a, std::span<const double> b, const TimeGrid& grid);

/// C_p(t) - C_1(t) pointwise. Grids must match.
std::vector<double> complexity_difference(const ComplexityTrace& trace_p, const ComplexityTrace& trace_1);

/// Mean of values[i] over grid points with lo <= times[i] * scale <= hi.
/// Pass scale = 1/tau_H to select windows in Heisenberg units. Throws
/// StructuralError for an empty window.
double window_mean(const TimeGrid& grid, std::span<const double> values, double lo, double hi,
                   double scale = 1.0, bool include_lo = true);

} // namespace krylab
