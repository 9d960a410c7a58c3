#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krylab/linalg.hpp"

namespace krylab {

struct EnsembleSpec {
    std::size_t dim = 2;
    std::uint64_t seed = 0;
    bool normalize_spectral_norm = false;
};

/// H = (A + A^dagger)/2 with Re, Im of every A entry i.i.d. standard normal:
/// diagonal variance 1, off-diagonal variance 1/2 per component.
/// With normalize_spectral_norm the result is rescaled to sigma_max(H) = 1.
ComplexMatrix sample_gue(const EnsembleSpec& spec);

struct InitialState {
    StateVector psi;
    /// Empty unless two eigenvalues are closer than 1e-10.
    std::vector<std::string> warnings;
};

/// Rotates each eigenvector so its largest-magnitude entry is real positive.
/// Ties go to the lowest index.
void fix_eigenvector_phases(Eigensystem& es);

/// (1/sqrt N) sum_n |phi_n>, eigenvectors in ascending eigenvalue order with
/// phases fixed by fix_eigenvector_phases.
InitialState uniform_eigenstate_superposition(const ComplexMatrix& h);
InitialState uniform_eigenstate_superposition(Eigensystem es);

} // namespace krylab
