#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace krylab {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDefaultDeflationTol = 1e-8;
inline constexpr int kJacobiMaxSweeps = 100;

/// Eigenvalues ascending; column j of `eigenvectors` belongs to eigenvalues[j].
struct Eigensystem {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;

    std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }

    /// V diag(values) V^dagger
    ComplexMatrix reconstruct(const Eigen::VectorXcd& values) const;
};

/// max|A - A^dagger|
double hermiticity_defect(const ComplexMatrix& a);

/// True when max|A - A^dagger| <= rel_tol * max|A|. Non-square matrices are never Hermitian.
bool is_hermitian(const ComplexMatrix& a, double rel_tol = kHermitianTol);

/// Throws StructuralError unless `a` is square and Hermitian within tolerance.
void require_hermitian(const ComplexMatrix& a, const char* what, double rel_tol = kHermitianTol);

/// Cyclic complex Jacobi. Sweeps until the off-diagonal Frobenius norm falls
/// below 1e-12 * ||H||_F; throws NumericError after kJacobiMaxSweeps.
Eigensystem hermitian_eigendecompose(const ComplexMatrix& h);

/// sigma_max of a Hermitian matrix, i.e. max |eigenvalue|.
double spectral_norm(const ComplexMatrix& h);
double spectral_norm(const Eigensystem& es);

using ScalarFunction = std::function<cplx(double)>;

/// V f(Lambda) V^dagger.
ComplexMatrix matrix_function(const ComplexMatrix& h, const ScalarFunction& f);
ComplexMatrix matrix_function(const Eigensystem& es, const ScalarFunction& f);

/// Removes from `v` its components along the orthonormal columns of
/// `basis` (first `count` columns). Modified Gram-Schmidt, run twice.
void orthogonalize_against(const ComplexMatrix& basis, Eigen::Index count, StateVector& v);

struct OrthonormalSet {
    std::vector<StateVector> basis;
    std::vector<std::size_t> kept_indices;
};

/// Orthonormalizes in input order. A candidate whose residual norm after
/// projection is below deflation_tol times its own norm is dropped.
OrthonormalSet orthonormalize(std::span<const StateVector> vectors,
                              double deflation_tol = kDefaultDeflationTol);

/// A Hermitian matrix together with its eigensystem, decomposed once and
/// shared by everything that needs exact spectral calculus.
struct Hamiltonian {
    ComplexMatrix matrix;
    Eigensystem spectrum;

    explicit Hamiltonian(ComplexMatrix h);

    Eigen::Index dim() const { return matrix.rows(); }
    double norm() const { return spectral_norm(spectrum); }
};

/// Packs vectors as the columns of a dim x count matrix.
ComplexMatrix as_columns(std::span<const StateVector> vectors);

} // namespace krylab
