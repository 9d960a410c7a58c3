#pragma once

#include "krylab/linalg.hpp"

namespace krylab {

struct TimescaleReport {
    double h_norm = 0.0;      // sigma_max(H)
    std::size_t grade = 0;    // Krylov grade m
    double tau_scr = 0.0;     // m / ||H||
    double dt_scr = 0.0;      // 1 / ||H||
    double mean_spacing = 0.0;
    double tau_H = 0.0;       // 2 pi / mean_spacing
};

/// Spectral norm of the Dyson term (-iHT)^n / n!, i.e. (sigma_max T)^n / n!.
double dyson_term_norm(const Hamiltonian& h, double t, unsigned n);
double dyson_term_norm(const ComplexMatrix& h, double t, unsigned n);

/// Mean level spacing (1/N) sum_{n} (e_{n+1} - e_n), which telescopes to
/// (e_max - e_min) / N. The divisor is N, not N - 1.
double mean_level_spacing(const Eigensystem& es);

/// Throws NumericError when the spectrum is fully degenerate (tau_H undefined).
TimescaleReport compute_timescales(const Hamiltonian& h, std::size_t grade);

} // namespace krylab
