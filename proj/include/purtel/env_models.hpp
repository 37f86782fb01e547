// env_models.hpp: dephasing models, environment states and conditional evolutions

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "purtel/linalg.hpp"

namespace purtel {

/// Pure-dephasing coupling H = sum_ij |ij><ij| ⊗ V_ij for a pair of d-level systems.
class DephasingModel {
public:
    /// `v` is row-major: v[i * d + j] = V_ij, each e×e and Hermitian within 1e-10.
    DephasingModel(std::size_t d, std::size_t e, std::vector<ComplexMatrix> v);

    std::size_t d() const { return d_; }
    std::size_t e() const { return e_; }
    const ComplexMatrix& v(std::size_t i, std::size_t j) const { return v_[i * d_ + j]; }

private:
    std::size_t d_;
    std::size_t e_;
    std::vector<ComplexMatrix> v_;
};

/// The conditional environment unitaries w_ij(τ) = exp(-iτ V_ij).
class ConditionalEvolutions {
public:
    /// Takes precomputed unitaries (row-major, as for DephasingModel); validates unitarity within 1e-10.
    ConditionalEvolutions(std::size_t d, std::size_t e, double tau, std::vector<ComplexMatrix> w);

    std::size_t d() const { return d_; }
    std::size_t e() const { return e_; }
    double tau() const { return tau_; }
    const ComplexMatrix& w(std::size_t i, std::size_t j) const { return w_[i * d_ + j]; }

private:
    std::size_t d_;
    std::size_t e_;
    double tau_;
    std::vector<ComplexMatrix> w_;
};

ConditionalEvolutions conditional_evolutions(const DephasingModel& model, double tau);

/// d² independent Gaussian Hermitian observables.
DephasingModel random_model(std::size_t d, std::size_t e, std::uint64_t seed);

/// Every V_ij diagonal in one shared Haar-random basis, so all of them commute.
DephasingModel commuting_model(std::size_t d, std::size_t e, std::uint64_t seed);

/// Like random_model but with V_01 and V_10 sharing an eigenbasis, so [w_01, w_10] = 0
/// while the diagonal pair stays generic. Drives the Ψ-resource variant of the protocol.
DephasingModel swap_commuting_model(std::size_t e, std::uint64_t seed);

/// Gibbs state exp(-β h) / Z.
DensityMatrix thermal_state(const ComplexMatrix& h_env, double beta);

enum class EnvStateFamily { thermal, mixed, pure };

/// Environment initial states used in the property sweeps: thermal state of a
/// random Hamiltonian at β = 1, random full-rank mixed state, or random pure state.
DensityMatrix environment_state(EnvStateFamily family, std::size_t e, std::uint64_t seed);

struct CommutationDefect {
    double diagonal = 0.0;   ///< max over i<j of ‖[w_ii, w_jj]‖_max
    double swap_pair = 0.0;  ///< ‖[w_01, w_10]‖_max
};

CommutationDefect commutation_defect(const ConditionalEvolutions& w);

// ---------------------------------------------------------------- bosons ---

/// One bath mode. The couplings seen by the two register qubits are
/// g_m = g * exp(-i θ_m); only θ_2 - θ_1 = ω t̄ is physical.
struct BosonMode {
    double omega = 1.0;
    Complex g{0.0, 0.0};
    double theta1 = 0.0;
    double theta2 = 0.0;
};

struct BosonRegisterSpec {
    std::vector<BosonMode> modes;
    std::size_t n_max = 30;
    double beta = 1.0;
    std::size_t max_dim = 4096;

    /// Single mode with θ_1 = 0 and θ_2 = ω t̄.
    static BosonRegisterSpec single_mode(double omega, Complex g, double t_bar, std::size_t n_max, double beta);
    void validate() const;
    std::size_t fock_dim() const;
};

/// Qubit level i couples with ε_i = ∓1/2 for i = 0, 1.
inline constexpr double register_epsilon(std::size_t i) { return i == 0 ? -0.5 : 0.5; }

struct BosonRegister {
    DephasingModel model;  ///< V_ij = Σ_k (ε_i g_1k + ε_j g_2k) a_k† + h.c. + ω_k a_k† a_k
    ComplexMatrix h_env;   ///< Σ_k ω_k a_k† a_k
    DensityMatrix thermal; ///< exp(-β h_env) / Z
};

/// Truncated-Fock construction of the two-qubit register model.
BosonRegister boson_register_model(const BosonRegisterSpec& spec);

/// Interaction-picture conditional evolutions of the register model:
/// w_ij = Π_k D(α_k(τ) λ_ij,k) exp(i ξ_k(τ) |λ_ij,k|²) with λ_ij,k = ε_i g_1k + ε_j g_2k,
/// α(τ) = (1 - e^{iωτ}) / ω and ξ(τ) = (ωτ - sin ωτ) / ω². The displacement is the
/// exponential of the truncated generator.
ConditionalEvolutions boson_interaction_evolutions(const BosonRegisterSpec& spec, double tau);

/// Truncated annihilation operator on n_max + 1 Fock levels.
ComplexMatrix annihilation(std::size_t n_max);

}  // namespace purtel
