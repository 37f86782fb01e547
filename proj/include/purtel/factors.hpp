// factors.hpp: decoherence factors as environment-only traces, fidelities,
// and the qudit purification pattern

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "purtel/env_models.hpp"
#include "purtel/linalg.hpp"

namespace purtel {

/// c^m_{jj'} = Tr[w†_{j'⊕m,j'⊕m} w_{j⊕m,j⊕m} R]: coherence (j, j') of C after step one, outcome class m.
Complex first_step_factor(const ConditionalEvolutions& w, const DensityMatrix& r, std::size_t m, std::size_t j,
                          std::size_t j_prime);

/// C^{mm'}_{jj'} = Tr[w_{j⊕M,j⊕M⊕m} w_{j⊕m,j⊕m} R w†_{j'⊕m,j'⊕m} w†_{j'⊕M,j'⊕M⊕m}]
/// with M = [d - (m ⊕ m')] mod d: coherence (j, j') of A' after both steps.
Complex second_step_factor(const ConditionalEvolutions& w, const DensityMatrix& r, std::size_t m,
                           std::size_t m_prime, std::size_t j, std::size_t j_prime);

/// Same with distinct step durations: w1 drives step one, w2 step two.
Complex second_step_factor(const ConditionalEvolutions& w1, const ConditionalEvolutions& w2, const DensityMatrix& r,
                           std::size_t m, std::size_t m_prime, std::size_t j, std::size_t j_prime);

/// Qubit factors. For the Φ+ resource the fields are, by (first, second) class:
/// c_phi (Φ,Φ), c_psi (Φ,Ψ), cp_phi (Ψ,Φ), cp_psi (Ψ,Ψ); c is the step-one coherence.
/// c_av is the plain average of the four; it reduces to (1 + c_phi + cp_phi + cp_psi)/4
/// when the diagonal evolutions commute.
struct FactorSet {
    Complex c{1.0, 0.0};
    Complex c_phi{1.0, 0.0};
    Complex c_psi{1.0, 0.0};
    Complex cp_phi{1.0, 0.0};
    Complex cp_psi{1.0, 0.0};
    Complex c_av{1.0, 0.0};
};

FactorSet qubit_factors(const ConditionalEvolutions& w, const DensityMatrix& r);

/// Factors for the Ψ+ resource (d = 2 only). Here the matched first class is Ψ, so
/// c_phi is (Ψ,Φ) and equals 1 when [w_01, w_10] = 0; c_psi is (Ψ,Ψ), cp_phi is (Φ,Φ),
/// cp_psi is (Φ,Ψ). c = Tr[w_10† w_01 R] is the step-one coherence after a Φ outcome.
FactorSet psi_resource_factors(const ConditionalEvolutions& w, const DensityMatrix& r);

/// 1 - 2|αβ|² (1 - Re c)
double fidelity_f1(double alpha_beta_sq, Complex c);

/// 1 - 2|αβ|² (1 - Re c_av)
double fidelity_f2(double alpha_beta_sq, const FactorSet& factors);

/// <ψ|ρ|ψ> for the dephased state ρ_jj' = ψ_j ψ*_j' C_jj' (C_jj = 1).
double fidelity_from_coherences(const PureState& psi, const ComplexMatrix& coherences);

// ------------------------------------------------------------ qudit pattern ---

enum class PurificationKind { full_restore, one_step, unprotected };

std::string_view to_string(PurificationKind kind);

struct PatternEntry {
    std::size_t m_prime = 0;
    std::size_t j = 0;
    std::size_t j_prime = 0;
    PurificationKind kind = PurificationKind::unprotected;
};

/// m = 0 coherence pairs j < j' for every m'. With M = (d - m') mod d, the pairs
/// {j, j⊕M} reduce to the one-step factor under commuting diagonal evolutions,
/// and are fully restored when 2M ≡ 0 (d even, m' = d/2). Every other pair is unprotected.
struct PurificationPattern {
    std::size_t d = 0;
    std::vector<PatternEntry> entries;

    std::size_t count(PurificationKind kind) const;
};

PurificationPattern classify_purification(std::size_t d);

/// Tr[w†_{j⊕2M,j⊕2M} w_jj R]: the value second_step_factor(m = 0, m', j, j⊕M) takes
/// when all w_jj commute.
Complex one_step_reduced_factor(const ConditionalEvolutions& w, const DensityMatrix& r, std::size_t j,
                                std::size_t big_m);

// ------------------------------------------------------------ time mismatch ---

struct MismatchReport {
    double delta_tau = 0.0;
    double factor_modulus_sq = 1.0;  ///< |Tr[w_11(Δτ) w_00(-Δτ) R]|²
    double predicted_modulus_sq = 1.0;  ///< 1 - Δτ² variance
    double variance = 0.0;  ///< Tr[R X²] - Tr[R X]², X = V_11 - V_00
};

/// Requires a d = 2 model whose evolutions at `tau` commute within 1e-10.
std::vector<MismatchReport> mismatch_scan(const DephasingModel& model, const DensityMatrix& r, double tau,
                                          const std::vector<double>& deltas);

/// Least-squares slope of log(y) against log(x), over points with x, y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace purtel
