#include "krylab/krylov.hpp"

#include <cmath>

#include "krylab/errors.hpp"

namespace krylab {

GeneratorOrder GeneratorOrder::finite(int p) {
    if (p < 1) {
        throw StructuralError("generator order must be >= 1, got " + std::to_string(p));
    }
    return GeneratorOrder(p, false);
}

GeneratorOrder GeneratorOrder::parse(const std::string& text) {
    if (text == "inf" || text == "infinite" || text == "∞") return infinite();
    std::size_t used = 0;
    int p = 0;
    try {
        p = std::stoi(text, &used);
    } catch (const std::exception&) {
        throw StructuralError("invalid generator order '" + text + "'");
    }
    if (used != text.size()) {
        throw StructuralError("invalid generator order '" + text + "'");
    }
    return finite(p);
}

int GeneratorOrder::p() const {
    if (infinite_) throw StructuralError("infinite generator order has no finite p");
    return p_;
}

std::string GeneratorOrder::label() const {
    return infinite_ ? "inf" : std::to_string(p_);
}

namespace {

cplx step_factor(double dt, GeneratorSign sign) {
    return sign == GeneratorSign::Backward ? cplx(0.0, -dt) : cplx(0.0, dt);
}

void check_dt(GeneratorOrder order, double dt) {
    if (!order.is_first_order() && !(dt > 0.0)) {
        throw StructuralError("generator of order " + order.label() + " needs dt > 0");
    }
}

void check_initial_state(const ComplexMatrix& h, const StateVector& psi0) {
    if (psi0.size() != h.rows()) {
        throw StructuralError("initial state has dimension " + std::to_string(psi0.size()) +
                              ", Hamiltonian has " + std::to_string(h.rows()));
    }
    if (std::abs(psi0.norm() - 1.0) > 1e-10) {
        throw StructuralError("initial state is not normalized");
    }
}

} // namespace

ComplexMatrix build_generator(const Hamiltonian& h, GeneratorOrder order, double dt, GeneratorSign sign) {
    check_dt(order, dt);
    if (order.is_first_order()) return h.matrix;

    const cplx z = step_factor(dt, sign);
    if (order.is_infinite()) {
        return matrix_function(h.spectrum, [z](double x) { return std::exp(z * x); });
    }
    const int p = order.p();
    // sum_{k=1}^{p} z^{k-1} x^k / k!, accumulated term by term
    return matrix_function(h.spectrum, [z, p](double x) {
        cplx term = x;
        cplx sum = term;
        for (int k = 2; k <= p; ++k) {
            term *= z * x / static_cast<double>(k);
            sum += term;
        }
        return sum;
    });
}

ComplexMatrix build_generator(const ComplexMatrix& h, GeneratorOrder order, double dt, GeneratorSign sign) {
    check_dt(order, dt);
    if (order.is_first_order()) {
        require_hermitian(h, "build_generator");
        return h;
    }
    return build_generator(Hamiltonian(h), order, dt, sign);
}

KrylovSequence krylov_sequence(const ComplexMatrix& g, const StateVector& psi0, std::size_t max_len) {
    if (g.rows() != g.cols() || g.cols() != psi0.size()) {
        throw StructuralError("krylov_sequence: dimension mismatch");
    }
    if (max_len == 0) {
        throw StructuralError("krylov_sequence: max_len must be >= 1");
    }
    KrylovSequence seq;
    seq.vectors.reserve(max_len);
    seq.vectors.push_back(psi0);
    while (seq.vectors.size() < max_len) {
        StateVector next = g * seq.vectors.back();
        const double norm = next.norm();
        if (norm == 0.0) {
            seq.truncated = true;
            break;
        }
        seq.vectors.push_back(next / norm);
    }
    return seq;
}

namespace {

KrylovBasis lanczos_basis(const Hamiltonian& h, const StateVector& psi0, KrylovBasis basis) {
    const Eigen::Index dim = h.dim();
    ComplexMatrix q(dim, dim);
    q.col(0) = psi0;
    Eigen::Index count = 1;

    std::vector<double> a;
    std::vector<double> b;
    for (;;) {
        const Eigen::Index n = count - 1;
        StateVector w = h.matrix * q.col(n);
        const double original = w.norm();
        a.push_back(q.col(n).dot(w).real());
        w -= a.back() * q.col(n);
        if (n > 0) w -= b.back() * q.col(n - 1);
        orthogonalize_against(q, count, w);
        const double beta = w.norm();
        const double rel = original > 0.0 ? beta / original : 0.0;
        basis.relative_residuals.push_back(rel);
        if (original == 0.0 || rel < basis.deflation_tol || count == dim) {
            basis.deflated = true;
            break;
        }
        b.push_back(beta);
        q.col(count++) = w / beta;
    }
    basis.vectors = q.leftCols(count);
    basis.lanczos_a = std::move(a);
    basis.lanczos_b = std::move(b);
    return basis;
}

KrylovBasis arnoldi_basis(const ComplexMatrix& g, const StateVector& psi0, KrylovBasis basis) {
    const Eigen::Index dim = g.rows();
    ComplexMatrix q(dim, dim);
    q.col(0) = psi0;
    Eigen::Index count = 1;
    for (;;) {
        StateVector w = g * q.col(count - 1);
        const double original = w.norm();
        orthogonalize_against(q, count, w);
        const double residual = w.norm();
        const double rel = original > 0.0 ? residual / original : 0.0;
        basis.relative_residuals.push_back(rel);
        if (original == 0.0 || rel < basis.deflation_tol || count == dim) {
            basis.deflated = true;
            break;
        }
        q.col(count++) = w / residual;
    }
    basis.vectors = q.leftCols(count);
    return basis;
}

} // namespace

KrylovBasis build_basis(const Hamiltonian& h, GeneratorOrder order, double dt, const StateVector& psi0,
                        double deflation_tol, GeneratorSign sign) {
    check_dt(order, dt);
    check_initial_state(h.matrix, psi0);
    if (!(deflation_tol > 0.0)) {
        throw StructuralError("build_basis: deflation_tol must be positive");
    }
    KrylovBasis basis;
    basis.order = order;
    basis.dt = dt;
    basis.sign = sign;
    basis.deflation_tol = deflation_tol;
    if (order.is_first_order()) {
        return lanczos_basis(h, psi0, std::move(basis));
    }
    return arnoldi_basis(build_generator(h, order, dt, sign), psi0, std::move(basis));
}

KrylovBasis build_basis(const ComplexMatrix& h, GeneratorOrder order, double dt, const StateVector& psi0,
                        double deflation_tol, GeneratorSign sign) {
    return build_basis(Hamiltonian(h), order, dt, psi0, deflation_tol, sign);
}

LanczosCoefficients lanczos_coefficients(const KrylovBasis& basis) {
    if (!basis.order.is_first_order() || !basis.lanczos_a || !basis.lanczos_b) {
        throw StructuralError("Lanczos coefficients are defined only for first-order bases (order " +
                              basis.order.label() + ")");
    }
    return {*basis.lanczos_a, *basis.lanczos_b};
}

} // namespace krylab
