#pragma once

#include <optional>
#include <string>
#include <vector>

#include "krylab/linalg.hpp"

namespace krylab {

/// Order p of the truncated-exponential generator, or the full exponential.
class GeneratorOrder {
public:
    static GeneratorOrder finite(int p);
    static GeneratorOrder infinite() { return GeneratorOrder(0, true); }

    /// Accepts "1", "2", ..., "inf", "infinite", "∞".
    static GeneratorOrder parse(const std::string& text);

    bool is_infinite() const { return infinite_; }
    bool is_first_order() const { return !infinite_ && p_ == 1; }
    /// Finite order; throws StructuralError on the infinite order.
    int p() const;
    /// "1", "2", ... or "inf"
    std::string label() const;

    friend bool operator==(const GeneratorOrder&, const GeneratorOrder&) = default;

private:
    GeneratorOrder(int p, bool infinite) : p_(p), infinite_(infinite) {}
    int p_;
    bool infinite_;
};

/// Sign of the exponent used by generators of order >= 2. `Backward` builds
/// e^{-iH dt} (Schroedinger evolution); `Forward` builds e^{+iH dt}.
enum class GeneratorSign { Backward, Forward };

/// p = 1: H.  Finite p >= 2: sum_{k=1}^{p} (-i dt)^{k-1} H^k / k!, the
/// truncated series with the identity and one factor of -i dt removed.
/// Infinite: e^{-iH dt}. Forward sign replaces -i by +i.
ComplexMatrix build_generator(const Hamiltonian& h, GeneratorOrder order, double dt,
                              GeneratorSign sign = GeneratorSign::Backward);
ComplexMatrix build_generator(const ComplexMatrix& h, GeneratorOrder order, double dt,
                              GeneratorSign sign = GeneratorSign::Backward);

struct KrylovSequence {
    std::vector<StateVector> vectors;
    /// Set when G annihilated a vector before max_len entries were produced.
    bool truncated = false;
};

/// (psi0, G psi0, G^2 psi0, ...) with every entry rescaled to unit length.
KrylovSequence krylov_sequence(const ComplexMatrix& g, const StateVector& psi0, std::size_t max_len);

struct KrylovBasis {
    GeneratorOrder order = GeneratorOrder::finite(1);
    double dt = 0.0;
    GeneratorSign sign = GeneratorSign::Backward;
    double deflation_tol = kDefaultDeflationTol;

    /// dim x grade, orthonormal columns; column 0 is psi0.
    ComplexMatrix vectors;
    /// Lanczos a_0..a_{m-1} and b_1..b_{m-1}; first order only.
    std::optional<std::vector<double>> lanczos_a;
    std::optional<std::vector<double>> lanczos_b;
    /// Relative residual ||r|| / ||G k_n|| of every candidate tried, including
    /// the one that deflated (if any).
    std::vector<double> relative_residuals;
    bool deflated = false;

    std::size_t grade() const { return static_cast<std::size_t>(vectors.cols()); }
    StateVector vector(std::size_t n) const { return vectors.col(static_cast<Eigen::Index>(n)); }
};

/// Orthonormal basis of the flag span{psi0, G psi0, G^2 psi0, ...}, grown
/// until the first candidate deflates. First order runs Lanczos with full
/// reorthogonalization and records a_n, b_n. Higher orders run the Arnoldi
/// form of the same construction (candidate = G k_n instead of G g_n), which
/// spans the same nested subspaces without the conditioning loss of
/// orthogonalizing raw powers.
KrylovBasis build_basis(const Hamiltonian& h, GeneratorOrder order, double dt, const StateVector& psi0,
                        double deflation_tol = kDefaultDeflationTol,
                        GeneratorSign sign = GeneratorSign::Backward);
KrylovBasis build_basis(const ComplexMatrix& h, GeneratorOrder order, double dt, const StateVector& psi0,
                        double deflation_tol = kDefaultDeflationTol,
                        GeneratorSign sign = GeneratorSign::Backward);

struct LanczosCoefficients {
    std::vector<double> a;
    std::vector<double> b;  // b_1 .. b_{m-1}
};

/// Throws StructuralError unless the basis is first order.
LanczosCoefficients lanczos_coefficients(const KrylovBasis& basis);

} // namespace krylab
