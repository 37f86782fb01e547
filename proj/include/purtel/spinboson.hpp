// spinboson.hpp: continuum spin-boson decoherence factors for a two-qubit register
//
// Both register qubits couple to one thermal bosonic bath with spectral density
// J(ω) = ω (ω/Λ)^{s-1} e^{-ω/Λ}; the second qubit sees the field delayed by the
// time of flight t̄. Units: ħ = k_B = 1.

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "purtel/env_models.hpp"
#include "purtel/linalg.hpp"

namespace purtel {

struct SpinBosonParams {
    double s = 3.0;            ///< Ohmicity; s >= 1 is required
    double lambda = 1.0;       ///< cutoff Λ
    double temperature = 0.1;  ///< T, so β = 1/T
    double t_bar = 3.0;        ///< time of flight between the register qubits
    double omega_max = 50.0;   ///< upper quadrature limit in units of Λ
    std::size_t quad_points = 4000;  ///< total nodes; a multiple of 20

    double beta() const { return 1.0 / temperature; }
    void validate() const;
};

/// J(ω)
double spectral_density(double omega, const SpinBosonParams& p);

/// ln c(τ) = -2 ∫ J (1 - cos ωτ)/ω² (1 + cos ωt̄) coth(βω/2) dω
double ln_c(double tau, const SpinBosonParams& p);
/// ln C'(τ) = -4 ∫ J (1 - cos ωτ)/ω² coth(βω/2) dω; shared by both mismatched branches.
double ln_c_prime(double tau, const SpinBosonParams& p);
/// ln C_Φ = 4 ln c
double ln_c_phi(double tau, const SpinBosonParams& p);

/// Register level (ε_1, ε_2) of a conditional evolution, components in {-1/2, 0, 1/2}.
/// ε_i = ∓1/2 for qubit level 0/1; 0 removes the qubit's coupling, so (0, 0) is the identity.
struct EpsilonVector {
    double e1 = 0.0;
    double e2 = 0.0;

    static EpsilonVector level(std::size_t i, std::size_t j) { return {register_epsilon(i), register_epsilon(j)}; }
    static EpsilonVector identity() { return {}; }
    void validate() const;
};

/// log Tr[w_a† w_b† w_c w_d R] for one mode with the interaction-picture evolutions
/// w_ε = D(α λ_ε) e^{iξ|λ_ε|²} and a thermal R at inverse temperature beta.
Complex four_w_log_mode(const EpsilonVector& a, const EpsilonVector& b, const EpsilonVector& c,
                        const EpsilonVector& d, double tau, const BosonMode& mode, double beta);

/// Product over discrete modes.
Complex four_w_trace_modes(const EpsilonVector& a, const EpsilonVector& b, const EpsilonVector& c,
                           const EpsilonVector& d, double tau, const std::vector<BosonMode>& modes, double beta);

/// Continuum limit: Σ_k |g_k|² f(ω_k) → ∫ J(ω) f(ω) dω, with θ_2 - θ_1 = ω t̄.
Complex four_w_trace(const EpsilonVector& a, const EpsilonVector& b, const EpsilonVector& c, const EpsilonVector& d,
                     double tau, const SpinBosonParams& p);

/// ln c(τ) for discrete modes: -(1/2) Σ_k |α_k|² |g_1k + g_2k|² coth(βω_k/2).
double ln_c_modes(double tau, const std::vector<BosonMode>& modes, double beta);

/// The five factors assembled from four_w_trace.
struct ContinuumFactors {
    Complex c;
    Complex c_phi;
    Complex c_psi;
    Complex cp_phi;
    Complex cp_psi;
};

ContinuumFactors continuum_factors(double tau, const SpinBosonParams& p);

/// Operator strings (a, b, c, d) for each factor, so Tr[w_a† w_b† w_c w_d R] is the factor.
struct FourW {
    EpsilonVector a, b, c, d;
};
FourW four_w_c();
FourW four_w_c_phi();
FourW four_w_c_psi();
FourW four_w_cp_phi();
FourW four_w_cp_psi();

struct FidelityRow {
    double tau = 0.0;
    double f1 = 1.0;
    double f2 = 1.0;
    double f_cphi = 1.0;    ///< 1 - 2|αβ|²(1 - C_Φ)
    double f_cprime = 1.0;  ///< 1 - 2|αβ|²(1 - C')
    double f_const = 1.0;   ///< purified branch
};

/// F1 and the average F2 = (F_cphi + 2 F_cprime + F_const)/4 on a sorted non-negative grid.
std::vector<FidelityRow> fidelity_curves(const SpinBosonParams& p, double alpha_beta_sq,
                                         const std::vector<double>& tau_grid);

/// n evenly spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace purtel
