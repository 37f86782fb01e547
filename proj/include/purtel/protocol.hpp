// protocol.hpp: exact two-step teleportation through a shared dephasing environment
//
// Step one: A carries ψ, BC holds the resource, U(τ1) acts on BC⊗E, AB is
// measured in the Bell basis and C is corrected. Step two: A'B' is prepared
// in the Bell state of the first outcome, U(τ2) acts on A'B'⊗E (the same
// environment register), B'C is measured and A' is corrected. Every outcome
// pair is enumerated; nothing is sampled.

#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "purtel/env_models.hpp"
#include "purtel/linalg.hpp"

namespace purtel {

/// Bell label (n, m) of |Ψ_nm> = d^{-1/2} Σ_j e^{2πijn/d} |j, j⊕m>.
/// For d = 2: (0,0) Φ+, (1,0) Φ-, (0,1) Ψ+, (1,1) Ψ-.
struct BellIndex {
    std::size_t n = 0;
    std::size_t m = 0;

    friend bool operator==(const BellIndex&, const BellIndex&) = default;
};

/// Entangled resource on BC. `psi` is Ψ+ on BC and is defined for d = 2 only;
/// the step-one corrections stay those of the Φ+ protocol, so after step one
/// C carries σ_x|ψ> and step two absorbs the flip into its correction.
enum class Resource { phi_plus, psi };

PureState bell_state(std::size_t d, std::size_t n, std::size_t m);

/// U_nm = Σ_j e^{2πijn/d} |j><j⊕m|
ComplexMatrix correction_unitary(std::size_t d, std::size_t n, std::size_t m);

/// Second-step correction (N, M) for the Φ+ resource chain:
/// N = (n' - n) mod d, M = [d - (m ⊕ m')] mod d.
std::pair<std::size_t, std::size_t> correction_indices(std::size_t d, std::size_t n, std::size_t m,
                                                       std::size_t n_prime, std::size_t m_prime);

/// Ratio ρ_jj' / (ψ_j ψ*_j'). Entries where |ψ_j ψ_j'| < 1e-8 are undefined and hold NaN.
struct Coherences {
    ComplexMatrix value;
    std::vector<bool> defined;  // row-major

    std::size_t dim() const { return static_cast<std::size_t>(value.rows()); }
    bool is_defined(std::size_t j, std::size_t k) const { return defined[j * dim() + k]; }
    /// Throws ValidationError for undefined entries.
    Complex at(std::size_t j, std::size_t k) const;
};

Coherences extract_coherences(const ComplexMatrix& rho, const PureState& psi);
/// Joint A'⊗E (or C⊗E) state; E is traced out first.
Coherences extract_coherences(const DensityMatrix& joint, std::size_t env_dim, const PureState& psi);

/// Branch probabilities below this are kept but carry no state.
inline constexpr double kNegligibleProbability = 1e-14;

struct FirstStepBranch {
    BellIndex outcome;
    double probability = 0.0;
    std::optional<DensityMatrix> state_ce;  ///< normalized C⊗E state; empty if probability is negligible
    Resource resource = Resource::phi_plus;
    std::size_t d = 2;

    /// C state with the Ψ-resource σ_x frame undone, i.e. the state to compare with ψ.
    std::optional<DensityMatrix> logical_c() const;
};

struct ProtocolOutcome {
    BellIndex first;
    BellIndex second;
    double probability = 0.0;                 ///< joint probability of both outcomes
    std::optional<DensityMatrix> final_state; ///< A'
    std::optional<DensityMatrix> joint_ae;    ///< A'⊗E
    std::optional<Coherences> coherence;
};

std::vector<FirstStepBranch> run_first_step(const PureState& psi, const ConditionalEvolutions& w,
                                            const DensityMatrix& env, Resource resource = Resource::phi_plus);

std::vector<FirstStepBranch> run_first_step(const PureState& psi, const DephasingModel& model, double tau,
                                            const DensityMatrix& env, Resource resource = Resource::phi_plus);

/// All d² second-step outcomes of one first-step branch. Zero-probability input
/// branches yield outcomes with probability 0 and no state.
std::vector<ProtocolOutcome> run_second_step(const FirstStepBranch& branch, const ConditionalEvolutions& w2,
                                             const PureState& psi);

struct ProtocolResult {
    std::vector<FirstStepBranch> first_step;
    std::vector<double> f1;                ///< per first branch; NaN for negligible branches
    std::vector<ProtocolOutcome> outcomes; ///< ordered by (first, second), n-major within each
    std::optional<DensityMatrix> average_state;
    double f2 = 0.0;
    /// Largest |p - 1/d²| over first-step probabilities and second-step conditionals.
    double max_probability_deviation = 0.0;
    bool probabilities_uniform() const { return max_probability_deviation <= 1e-8; }
};

ProtocolResult run_protocol(const PureState& psi, const ConditionalEvolutions& w1, const ConditionalEvolutions& w2,
                            const DensityMatrix& env, Resource resource = Resource::phi_plus);

ProtocolResult run_protocol(const PureState& psi, const DephasingModel& model, double tau1, double tau2,
                            const DensityMatrix& env, Resource resource = Resource::phi_plus);

/// Φ/Ψ class of a qubit Bell label: 0 for Φ±, 1 for Ψ±.
inline std::size_t bell_class(const BellIndex& b) { return b.m; }

}  // namespace purtel
