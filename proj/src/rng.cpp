#include "purtel/rng.hpp"

#include <cmath>
#include <numbers>

namespace purtel {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    return r * std::cos(phi);
}

ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
    const auto k = static_cast<Eigen::Index>(n);
    ComplexMatrix a(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) a(i, j) = rng.complex_normal();
    return hermitian_part(a);
}

ComplexMatrix random_unitary(std::size_t n, Rng& rng) {
    const auto k = static_cast<Eigen::Index>(n);
    ComplexMatrix g(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) g(i, j) = rng.complex_normal();
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < k; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0.0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

DensityMatrix random_mixed_state(std::size_t n, Rng& rng) {
    const auto k = static_cast<Eigen::Index>(n);
    ComplexMatrix g(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) g(i, j) = rng.complex_normal();
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(hermitian_part(rho));
}

PureState random_pure_state(std::size_t n, Rng& rng) {
    ComplexVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
    return PureState::normalized(v);
}

}  // namespace purtel
