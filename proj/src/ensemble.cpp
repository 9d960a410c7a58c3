#include "krylab/ensemble.hpp"

#include <cmath>
#include <sstream>

#include "krylab/errors.hpp"
#include "krylab/rng.hpp"

namespace krylab {

ComplexMatrix sample_gue(const EnsembleSpec& spec) {
    if (spec.dim < 2) {
        throw StructuralError("sample_gue: dim must be >= 2, got " + std::to_string(spec.dim));
    }
    const auto n = static_cast<Eigen::Index>(spec.dim);
    Xoshiro256 rng(spec.seed);
    NormalSampler normal;

    // Column-major fill, real part then imaginary part of each entry.
    ComplexMatrix a(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            a(i, j) = cplx(re, im);
        }
    }
    ComplexMatrix h(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            h(i, j) = (a(i, j) + std::conj(a(j, i))) * 0.5;
        }
    }
    if (spec.normalize_spectral_norm) {
        h /= spectral_norm(h);
    }
    return h;
}

void fix_eigenvector_phases(Eigensystem& es) {
    for (Eigen::Index j = 0; j < es.eigenvectors.cols(); ++j) {
        auto col = es.eigenvectors.col(j);
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            const double mag = std::abs(col(i));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (best > 0.0) {
            col *= std::conj(col(arg)) / best;
            col(arg) = best;
        }
    }
}

InitialState uniform_eigenstate_superposition(Eigensystem es) {
    fix_eigenvector_phases(es);
    const Eigen::Index n = es.eigenvectors.cols();

    InitialState out;
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        const double gap = es.eigenvalues(j + 1) - es.eigenvalues(j);
        if (gap < 1e-10) {
            std::ostringstream msg;
            msg << "near-degenerate eigenvalues " << j << "," << j + 1 << " (gap " << gap
                << "); superposition depends on the eigenvector phase convention";
            out.warnings.push_back(msg.str());
        }
    }
    out.psi = es.eigenvectors.rowwise().sum() / std::sqrt(static_cast<double>(n));
    out.psi /= out.psi.norm();
    return out;
}

InitialState uniform_eigenstate_superposition(const ComplexMatrix& h) {
    return uniform_eigenstate_superposition(hermitian_eigendecompose(h));
}

} // namespace krylab
