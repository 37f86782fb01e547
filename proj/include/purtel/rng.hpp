// rng.hpp: reproducible random ensembles
//
// The bit stream is std::mt19937_64 (MT19937-64, Matsumoto & Nishimura 2000),
// whose output sequence is fixed by the C++ standard. Doubles are formed as
// (x >> 11) * 2^-53 and normals by Box–Muller, so every ensemble below is
// reproducible from the seed on any platform and in any language.

#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "purtel/linalg.hpp"

namespace purtel {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform();
    /// Standard normal.
    double normal();
    /// Real and imaginary parts independent standard normals.
    Complex complex_normal() {
        const double re = normal();
        return {re, normal()};
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// (A + A^†)/2 with A a complex Gaussian matrix.
ComplexMatrix random_hermitian(std::size_t n, Rng& rng);
/// Haar-random unitary (QR of a Ginibre matrix with the phase correction of R's diagonal).
ComplexMatrix random_unitary(std::size_t n, Rng& rng);
/// G G^† / Tr(G G^†), full rank with probability one.
DensityMatrix random_mixed_state(std::size_t n, Rng& rng);
PureState random_pure_state(std::size_t n, Rng& rng);

}  // namespace purtel
