// linalg.hpp: dense complex linear algebra shared by the simulator and the factor engine
//
// Composite basis convention: indices are lexicographic with the leftmost
// tensor factor most significant. For subsystems with dims {d0, d1, d2} the
// basis state |i0 i1 i2> sits at index (i0 * d1 + i1) * d2 + i2.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace purtel {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Default cap on the number of entries of any matrix built by tensor_product.
inline constexpr std::size_t kDefaultMaxEntries = std::size_t{1} << 20;

struct Tolerances {
    double hermitian = 1e-10;
    double psd = 1e-10;
    double trace = 1e-10;
};

/// Normalized ket. Construction validates the norm.
class PureState {
public:
    /// Throws ValidationError unless sum |a_j|^2 = 1 within `tol`.
    explicit PureState(ComplexVector amplitudes, double tol = 1e-12);

    /// Normalizes a nonzero vector.
    static PureState normalized(const ComplexVector& v);

    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    const ComplexVector& amplitudes() const { return amps_; }
    Complex operator[](std::size_t j) const { return amps_(static_cast<Eigen::Index>(j)); }

private:
    ComplexVector amps_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
public:
    /// Validates Hermiticity, unit trace and positivity against `tol`.
    explicit DensityMatrix(ComplexMatrix m, const Tolerances& tol = {});

    static DensityMatrix from_pure(const PureState& psi);

    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    const ComplexMatrix& matrix() const { return m_; }
    Complex operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

private:
    ComplexMatrix m_;
};

double max_abs(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product a ⊗ b. Throws SizingError when the result would exceed max_entries.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b,
                             std::size_t max_entries = kDefaultMaxEntries);

/// Partial trace of an arbitrary (not necessarily normalized) operator over
/// every subsystem not listed in `keep`. Kept subsystems retain their order.
ComplexMatrix partial_trace(const ComplexMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

/// exp(-i t h) for Hermitian h, via eigendecomposition.
ComplexMatrix hermitian_exp(const ComplexMatrix& h, double t, double tol = 1e-10);

/// <psi|rho|psi>, clamped to [0, 1].
double fidelity_pure(const PureState& psi, const DensityMatrix& rho);

/// (m + m^†) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& m);

namespace detail {
/// Composite-index offsets of every multi-index over `subsystems` (in the given
/// order, leftmost slowest), with all other subsystems at digit 0.
std::vector<std::size_t> subsystem_offsets(std::span<const std::size_t> dims,
                                           std::span<const std::size_t> subsystems);
}  // namespace detail

}  // namespace purtel
