#include "krylab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "krylab/errors.hpp"

namespace krylab {

ComplexMatrix Eigensystem::reconstruct(const Eigen::VectorXcd& values) const {
    return eigenvectors * values.asDiagonal() * eigenvectors.adjoint();
}

double hermiticity_defect(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) {
        throw StructuralError("hermiticity_defect: matrix is not square");
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
    if (a.rows() != a.cols() || a.size() == 0) return false;
    const double scale = a.cwiseAbs().maxCoeff();
    return hermiticity_defect(a) <= rel_tol * scale;
}

void require_hermitian(const ComplexMatrix& a, const char* what, double rel_tol) {
    if (a.size() == 0) {
        throw StructuralError(std::string(what) + ": empty matrix");
    }
    if (a.rows() != a.cols()) {
        throw StructuralError(std::string(what) + ": matrix is " + std::to_string(a.rows()) + "x" +
                              std::to_string(a.cols()) + ", expected square");
    }
    if (!is_hermitian(a, rel_tol)) {
        throw StructuralError(std::string(what) + ": matrix is not Hermitian (defect " +
                              std::to_string(hermiticity_defect(a)) + ")");
    }
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i != j) sum += std::norm(a(i, j));
        }
    }
    return std::sqrt(sum);
}

// One complex Jacobi rotation annihilating a(p,q). The rotation is
// J = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on the (p,q) plane, where
// phi = arg a(p,q); the phase factor makes the pivot real first.
void rotate(ComplexMatrix& a, ComplexMatrix& v, Eigen::Index p, Eigen::Index q) {
    const cplx apq = a(p, q);
    const double r = std::abs(apq);
    if (r == 0.0) return;

    const cplx phase_conj = std::conj(apq) / r;
    const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
    double t;
    if (std::abs(theta) > 1e150) {
        t = 0.5 / theta;
    } else {
        t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    }
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    const cplx jpp = c;
    const cplx jpq = s;
    const cplx jqp = -s * phase_conj;
    const cplx jqq = c * phase_conj;

    // A <- A J
    {
        const StateVector colp = a.col(p);
        const StateVector colq = a.col(q);
        a.col(p) = colp * jpp + colq * jqp;
        a.col(q) = colp * jpq + colq * jqq;
    }
    // A <- J^dagger A
    {
        const Eigen::RowVectorXcd rowp = a.row(p);
        const Eigen::RowVectorXcd rowq = a.row(q);
        a.row(p) = std::conj(jpp) * rowp + std::conj(jqp) * rowq;
        a.row(q) = std::conj(jpq) * rowp + std::conj(jqq) * rowq;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = a(p, p).real();
    a(q, q) = a(q, q).real();

    // V <- V J
    const StateVector vp = v.col(p);
    const StateVector vq = v.col(q);
    v.col(p) = vp * jpp + vq * jqp;
    v.col(q) = vp * jpq + vq * jqq;
}

} // namespace

Eigensystem hermitian_eigendecompose(const ComplexMatrix& h) {
    require_hermitian(h, "hermitian_eigendecompose");
    const Eigen::Index n = h.rows();

    ComplexMatrix a = (h + h.adjoint()) * 0.5;
    ComplexMatrix v = ComplexMatrix::Identity(n, n);
    const double tol = 1e-12 * a.norm();

    int sweep = 0;
    while (off_diagonal_norm(a) > tol) {
        if (sweep == kJacobiMaxSweeps) {
            throw NumericError("hermitian_eigendecompose: Jacobi did not converge within " +
                               std::to_string(kJacobiMaxSweeps) + " sweeps");
        }
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                rotate(a, v, p, q);
            }
        }
        ++sweep;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return a(x, x).real() < a(y, y).real();
    });

    Eigensystem es;
    es.eigenvalues.resize(n);
    es.eigenvectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        es.eigenvalues(j) = a(src, src).real();
        es.eigenvectors.col(j) = v.col(src);
    }
    return es;
}

double spectral_norm(const Eigensystem& es) {
    return es.eigenvalues.cwiseAbs().maxCoeff();
}

double spectral_norm(const ComplexMatrix& h) {
    return spectral_norm(hermitian_eigendecompose(h));
}

ComplexMatrix matrix_function(const Eigensystem& es, const ScalarFunction& f) {
    Eigen::VectorXcd values(es.eigenvalues.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        values(i) = f(es.eigenvalues(i));
    }
    return es.reconstruct(values);
}

ComplexMatrix matrix_function(const ComplexMatrix& h, const ScalarFunction& f) {
    return matrix_function(hermitian_eigendecompose(h), f);
}

void orthogonalize_against(const ComplexMatrix& basis, Eigen::Index count, StateVector& v) {
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index j = 0; j < count; ++j) {
            const cplx overlap = basis.col(j).dot(v);  // conjugates the left operand
            v -= overlap * basis.col(j);
        }
    }
}

OrthonormalSet orthonormalize(std::span<const StateVector> vectors, double deflation_tol) {
    if (vectors.empty()) {
        throw StructuralError("orthonormalize: empty input");
    }
    if (!(deflation_tol > 0.0)) {
        throw StructuralError("orthonormalize: deflation_tol must be positive");
    }
    const Eigen::Index dim = vectors.front().size();
    for (const auto& v : vectors) {
        if (v.size() != dim) {
            throw StructuralError("orthonormalize: vectors differ in dimension");
        }
    }

    ComplexMatrix q(dim, static_cast<Eigen::Index>(std::min<std::size_t>(vectors.size(), dim)));
    Eigen::Index count = 0;
    OrthonormalSet out;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const double original = vectors[i].norm();
        if (original == 0.0 || count == dim) continue;
        StateVector r = vectors[i];
        orthogonalize_against(q, count, r);
        const double residual = r.norm();
        if (residual < deflation_tol * original) continue;
        q.col(count++) = r / residual;
        out.kept_indices.push_back(i);
    }
    out.basis.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index j = 0; j < count; ++j) out.basis.emplace_back(q.col(j));
    return out;
}

Hamiltonian::Hamiltonian(ComplexMatrix h)
    : matrix(std::move(h)), spectrum(hermitian_eigendecompose(matrix)) {}

ComplexMatrix as_columns(std::span<const StateVector> vectors) {
    if (vectors.empty()) return {};
    ComplexMatrix m(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t j = 0; j < vectors.size(); ++j) {
        if (vectors[j].size() != m.rows()) {
            throw StructuralError("as_columns: vectors differ in dimension");
        }
        m.col(static_cast<Eigen::Index>(j)) = vectors[j];
    }
    return m;
}

} // namespace krylab
