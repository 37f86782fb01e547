#include "purtel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "purtel/errors.hpp"

namespace purtel {

namespace {
using Index = Eigen::Index;
}  // namespace

namespace detail {

std::vector<std::size_t> subsystem_offsets(std::span<const std::size_t> dims,
                                           std::span<const std::size_t> subsystems) {
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * dims[k];

    std::vector<std::size_t> offsets{0};
    for (std::size_t s : subsystems) {
        std::vector<std::size_t> next;
        next.reserve(offsets.size() * dims[s]);
        for (std::size_t base : offsets)
            for (std::size_t i = 0; i < dims[s]; ++i) next.push_back(base + i * strides[s]);
        offsets = std::move(next);
    }
    return offsets;
}

}  // namespace detail

PureState::PureState(ComplexVector amplitudes, double tol) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw ShapeError("PureState: empty amplitude vector");
    if (!amps_.allFinite()) throw ValidationError("PureState: non-finite amplitude");
    const double norm2 = amps_.squaredNorm();
    if (std::abs(norm2 - 1.0) > tol)
        throw ValidationError("PureState: squared norm " + std::to_string(norm2) + " differs from 1");
}

PureState PureState::normalized(const ComplexVector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("PureState: cannot normalize zero vector");
    return PureState(v / n);
}

DensityMatrix::DensityMatrix(ComplexMatrix m, const Tolerances& tol) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) throw ShapeError("DensityMatrix: matrix must be square and nonempty");
    if (!m_.allFinite()) throw ValidationError("DensityMatrix: non-finite entry");
    if (!is_hermitian(m_, tol.hermitian)) throw ValidationError("DensityMatrix: not Hermitian");
    const double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > tol.trace) throw ValidationError("DensityMatrix: trace " + std::to_string(tr) + " != 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m_), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol.psd) throw ValidationError("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw ShapeError("commutator: operands must be square with equal dims");
    return a * b - b * a;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
    return (m + m.adjoint()) * 0.5;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t max_entries) {
    if (a.size() == 0 || b.size() == 0) throw ShapeError("tensor_product: empty operand");
    const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
    const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
    if (rows * cols > max_entries)
        throw SizingError("tensor_product: result of " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " exceeds the entry limit");
    ComplexMatrix out(static_cast<Index>(rows), static_cast<Index>(cols));
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
    std::size_t total = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw ShapeError("partial_trace: zero subsystem dimension");
        total *= d;
    }
    if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != total)
        throw ShapeError("partial_trace: product of dims does not match the operator size");
    if (keep.empty()) throw ShapeError("partial_trace: keep set is empty");

    std::vector<std::size_t> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    if (kept.back() >= dims.size()) throw IndexError("partial_trace: keep index out of range");

    std::vector<std::size_t> traced;
    for (std::size_t s = 0; s < dims.size(); ++s)
        if (!std::binary_search(kept.begin(), kept.end(), s)) traced.push_back(s);

    const auto kept_off = detail::subsystem_offsets(dims, kept);
    const auto traced_off = detail::subsystem_offsets(dims, traced);
    const auto n = static_cast<Index>(kept_off.size());
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c) {
            Complex acc{0.0, 0.0};
            for (std::size_t t : traced_off)
                acc += rho(static_cast<Index>(kept_off[r] + t), static_cast<Index>(kept_off[c] + t));
            out(r, c) = acc;
        }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
    return DensityMatrix(hermitian_part(partial_trace(rho.matrix(), dims, keep)));
}

ComplexMatrix hermitian_exp(const ComplexMatrix& h, double t, double tol) {
    if (h.rows() == 0 || h.rows() != h.cols()) throw ShapeError("hermitian_exp: matrix must be square and nonempty");
    if (!std::isfinite(t)) throw ValidationError("hermitian_exp: non-finite time");
    if (!is_hermitian(h, tol)) throw ValidationError("hermitian_exp: input is not Hermitian");
    if (t == 0.0) return ComplexMatrix::Identity(h.rows(), h.cols());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
    const Eigen::VectorXd& lam = es.eigenvalues();
    ComplexVector phases(lam.size());
    for (Index k = 0; k < lam.size(); ++k) phases(k) = std::exp(Complex{0.0, -t * lam(k)});
    const ComplexMatrix& u = es.eigenvectors();
    return u * phases.asDiagonal() * u.adjoint();
}

double fidelity_pure(const PureState& psi, const DensityMatrix& rho) {
    if (psi.dim() != rho.dim()) throw ShapeError("fidelity_pure: dimension mismatch");
    const double f = (psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes())(0, 0).real();
    return std::clamp(f, 0.0, 1.0);
}

}  // namespace purtel
