#include "krylab/timescales.hpp"

#include <numbers>
#include <string>

#include "krylab/errors.hpp"

namespace krylab {

double dyson_term_norm(const Hamiltonian& h, double t, unsigned n) {
    if (!(t >= 0.0)) throw StructuralError("dyson_term_norm: T must be >= 0");
    const double x = h.norm() * t;
    double value = 1.0;
    for (unsigned k = 1; k <= n; ++k) value *= x / static_cast<double>(k);
    return value;
}

double dyson_term_norm(const ComplexMatrix& h, double t, unsigned n) {
    return dyson_term_norm(Hamiltonian(h), t, n);
}

double mean_level_spacing(const Eigensystem& es) {
    const auto n = es.eigenvalues.size();
    double sum = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) sum += es.eigenvalues(i + 1) - es.eigenvalues(i);
    return sum / static_cast<double>(n);
}

TimescaleReport compute_timescales(const Hamiltonian& h, std::size_t grade) {
    if (grade < 1) throw StructuralError("compute_timescales: grade must be >= 1");
    TimescaleReport r;
    r.h_norm = h.norm();
    if (!(r.h_norm > 0.0)) throw NumericError("compute_timescales: zero Hamiltonian has no timescales");
    r.grade = grade;
    r.tau_scr = static_cast<double>(grade) / r.h_norm;
    r.dt_scr = 1.0 / r.h_norm;
    r.mean_spacing = mean_level_spacing(h.spectrum);
    if (!(r.mean_spacing > 0.0)) {
        throw NumericError("compute_timescales: fully degenerate spectrum, Heisenberg time undefined");
    }
    r.tau_H = 2.0 * std::numbers::pi / r.mean_spacing;
    return r;
}

} // namespace krylab
