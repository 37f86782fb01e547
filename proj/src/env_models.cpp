#include "purtel/env_models.hpp"

#include <cmath>
#include <string>

#include "purtel/errors.hpp"
#include "purtel/rng.hpp"

namespace purtel {

namespace {

using Index = Eigen::Index;

constexpr double kUnitarityTol = 1e-10;

ComplexMatrix identity(std::size_t n) {
    return ComplexMatrix::Identity(static_cast<Index>(n), static_cast<Index>(n));
}

// Embeds a single-mode operator into the multi-mode Fock space at position `mode`.
ComplexMatrix embed_mode(const ComplexMatrix& op, std::size_t mode, std::size_t modes, std::size_t levels,
                         std::size_t max_entries) {
    ComplexMatrix out = mode == 0 ? op : identity(levels);
    for (std::size_t k = 1; k < modes; ++k)
        out = tensor_product(out, k == mode ? op : identity(levels), max_entries);
    return out;
}

Complex register_coupling(const BosonMode& mode, std::size_t i, std::size_t j) {
    const Complex g1 = mode.g * std::exp(Complex{0.0, -mode.theta1});
    const Complex g2 = mode.g * std::exp(Complex{0.0, -mode.theta2});
    return register_epsilon(i) * g1 + register_epsilon(j) * g2;
}

}  // namespace

DephasingModel::DephasingModel(std::size_t d, std::size_t e, std::vector<ComplexMatrix> v)
    : d_(d), e_(e), v_(std::move(v)) {
    if (d_ < 1 || e_ < 1) throw ShapeError("DephasingModel: dimensions must be positive");
    if (v_.size() != d_ * d_) throw ShapeError("DephasingModel: expected d*d observables");
    for (const auto& m : v_) {
        if (static_cast<std::size_t>(m.rows()) != e_ || static_cast<std::size_t>(m.cols()) != e_)
            throw ShapeError("DephasingModel: observable has wrong dimension");
        if (!m.allFinite()) throw ValidationError("DephasingModel: non-finite observable");
        if (!is_hermitian(m, 1e-10)) throw ValidationError("DephasingModel: observable is not Hermitian");
    }
}

ConditionalEvolutions::ConditionalEvolutions(std::size_t d, std::size_t e, double tau, std::vector<ComplexMatrix> w)
    : d_(d), e_(e), tau_(tau), w_(std::move(w)) {
    if (w_.size() != d_ * d_) throw ShapeError("ConditionalEvolutions: expected d*d unitaries");
    const ComplexMatrix id = identity(e_);
    for (const auto& u : w_) {
        if (static_cast<std::size_t>(u.rows()) != e_ || static_cast<std::size_t>(u.cols()) != e_)
            throw ShapeError("ConditionalEvolutions: unitary has wrong dimension");
        if (max_abs(u * u.adjoint() - id) > kUnitarityTol)
            throw ValidationError("ConditionalEvolutions: operator is not unitary");
    }
}

ConditionalEvolutions conditional_evolutions(const DephasingModel& model, double tau) {
    if (!std::isfinite(tau)) throw ValidationError("conditional_evolutions: tau must be finite");
    std::vector<ComplexMatrix> w;
    w.reserve(model.d() * model.d());
    for (std::size_t i = 0; i < model.d(); ++i)
        for (std::size_t j = 0; j < model.d(); ++j) w.push_back(hermitian_exp(model.v(i, j), tau));
    return ConditionalEvolutions(model.d(), model.e(), tau, std::move(w));
}

DephasingModel random_model(std::size_t d, std::size_t e, std::uint64_t seed) {
    if (d < 2 || e < 2) throw ValidationError("random_model: requires d >= 2 and e >= 2");
    Rng rng(seed);
    std::vector<ComplexMatrix> v;
    v.reserve(d * d);
    for (std::size_t k = 0; k < d * d; ++k) v.push_back(random_hermitian(e, rng));
    return DephasingModel(d, e, std::move(v));
}

DephasingModel commuting_model(std::size_t d, std::size_t e, std::uint64_t seed) {
    if (d < 2 || e < 1) throw ValidationError("commuting_model: requires d >= 2 and e >= 1");
    Rng rng(seed);
    const ComplexMatrix u = random_unitary(e, rng);
    std::vector<ComplexMatrix> v;
    v.reserve(d * d);
    for (std::size_t k = 0; k < d * d; ++k) {
        Eigen::VectorXd lam(static_cast<Index>(e));
        for (Index i = 0; i < lam.size(); ++i) lam(i) = rng.normal();
        v.push_back(hermitian_part(u * lam.cast<Complex>().asDiagonal() * u.adjoint()));
    }
    return DephasingModel(d, e, std::move(v));
}

DephasingModel swap_commuting_model(std::size_t e, std::uint64_t seed) {
    if (e < 2) throw ValidationError("swap_commuting_model: requires e >= 2");
    Rng rng(seed);
    const ComplexMatrix u = random_unitary(e, rng);
    auto shared_basis = [&] {
        Eigen::VectorXd lam(static_cast<Index>(e));
        for (Index i = 0; i < lam.size(); ++i) lam(i) = rng.normal();
        return hermitian_part(u * lam.cast<Complex>().asDiagonal() * u.adjoint());
    };
    std::vector<ComplexMatrix> v(4);
    v[0] = random_hermitian(e, rng);
    v[1] = shared_basis();
    v[2] = shared_basis();
    v[3] = random_hermitian(e, rng);
    return DephasingModel(2, e, std::move(v));
}

DensityMatrix thermal_state(const ComplexMatrix& h_env, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("thermal_state: beta must be positive");
    if (h_env.rows() == 0 || h_env.rows() != h_env.cols()) throw ShapeError("thermal_state: square matrix required");
    if (!is_hermitian(h_env, 1e-10)) throw ValidationError("thermal_state: Hamiltonian is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h_env));
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double ground = lam.minCoeff();
    Eigen::VectorXd pop = (-beta * (lam.array() - ground)).exp();
    pop /= pop.sum();
    const ComplexMatrix& u = es.eigenvectors();
    return DensityMatrix(hermitian_part(u * pop.cast<Complex>().asDiagonal() * u.adjoint()));
}

DensityMatrix environment_state(EnvStateFamily family, std::size_t e, std::uint64_t seed) {
    Rng rng(seed);
    switch (family) {
        case EnvStateFamily::thermal: return thermal_state(random_hermitian(e, rng), 1.0);
        case EnvStateFamily::mixed: return random_mixed_state(e, rng);
        case EnvStateFamily::pure: return DensityMatrix::from_pure(random_pure_state(e, rng));
    }
    throw ValidationError("environment_state: unknown family");
}

CommutationDefect commutation_defect(const ConditionalEvolutions& w) {
    CommutationDefect out;
    for (std::size_t i = 0; i < w.d(); ++i)
        for (std::size_t j = i + 1; j < w.d(); ++j)
            out.diagonal = std::max(out.diagonal, max_abs(commutator(w.w(i, i), w.w(j, j))));
    if (w.d() >= 2) out.swap_pair = max_abs(commutator(w.w(0, 1), w.w(1, 0)));
    return out;
}

// ---------------------------------------------------------------- bosons ---

BosonRegisterSpec BosonRegisterSpec::single_mode(double omega, Complex g, double t_bar, std::size_t n_max,
                                                 double beta) {
    BosonRegisterSpec spec;
    spec.modes.push_back(BosonMode{omega, g, 0.0, omega * t_bar});
    spec.n_max = n_max;
    spec.beta = beta;
    return spec;
}

void BosonRegisterSpec::validate() const {
    if (modes.empty()) throw ValidationError("BosonRegisterSpec: at least one mode required");
    if (n_max < 1) throw ValidationError("BosonRegisterSpec: n_max must be >= 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("BosonRegisterSpec: beta must be positive");
    for (const auto& m : modes)
        if (!(m.omega > 0.0) || !std::isfinite(m.omega))
            throw ValidationError("BosonRegisterSpec: mode frequency must be positive");
    double dim = 1.0;
    for (std::size_t k = 0; k < modes.size(); ++k) dim *= static_cast<double>(n_max + 1);
    if (dim > static_cast<double>(max_dim))
        throw SizingError("BosonRegisterSpec: Fock dimension " + std::to_string(dim) + " exceeds limit");
}

std::size_t BosonRegisterSpec::fock_dim() const {
    std::size_t dim = 1;
    for (std::size_t k = 0; k < modes.size(); ++k) dim *= n_max + 1;
    return dim;
}

ComplexMatrix annihilation(std::size_t n_max) {
    const auto n = static_cast<Index>(n_max + 1);
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

BosonRegister boson_register_model(const BosonRegisterSpec& spec) {
    spec.validate();
    const std::size_t levels = spec.n_max + 1;
    const std::size_t nmodes = spec.modes.size();
    const std::size_t dim = spec.fock_dim();
    const std::size_t max_entries = dim * dim;
    const ComplexMatrix a1 = annihilation(spec.n_max);

    std::vector<ComplexMatrix> a(nmodes);
    ComplexMatrix h_env = ComplexMatrix::Zero(static_cast<Index>(dim), static_cast<Index>(dim));
    for (std::size_t k = 0; k < nmodes; ++k) {
        a[k] = embed_mode(a1, k, nmodes, levels, max_entries);
        h_env += spec.modes[k].omega * a[k].adjoint() * a[k];
    }

    std::vector<ComplexMatrix> v;
    v.reserve(4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            ComplexMatrix vij = h_env;
            for (std::size_t k = 0; k < nmodes; ++k) {
                const Complex lam = register_coupling(spec.modes[k], i, j);
                vij += lam * a[k].adjoint() + std::conj(lam) * a[k];
            }
            v.push_back(hermitian_part(vij));
        }
    DensityMatrix thermal = thermal_state(h_env, spec.beta);
    return BosonRegister{DephasingModel(2, dim, std::move(v)), std::move(h_env), std::move(thermal)};
}

ConditionalEvolutions boson_interaction_evolutions(const BosonRegisterSpec& spec, double tau) {
    spec.validate();
    if (!std::isfinite(tau)) throw ValidationError("boson_interaction_evolutions: tau must be finite");
    const std::size_t nmodes = spec.modes.size();
    const std::size_t max_entries = spec.fock_dim() * spec.fock_dim();
    const ComplexMatrix a = annihilation(spec.n_max);

    std::vector<ComplexMatrix> w;
    w.reserve(4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            ComplexMatrix total;
            for (std::size_t k = 0; k < nmodes; ++k) {
                const BosonMode& mode = spec.modes[k];
                const double wt = mode.omega * tau;
                const Complex alpha = (1.0 - std::exp(Complex{0.0, wt})) / mode.omega;
                const double xi = (wt - std::sin(wt)) / (mode.omega * mode.omega);
                const Complex lam = register_coupling(mode, i, j);
                const Complex x = alpha * lam;
                // D(x) = exp(x a† - x* a) = exp(-i h) with h = i (x a† - x* a) Hermitian.
                const ComplexMatrix h = kI * (x * a.adjoint() - std::conj(x) * a);
                const ComplexMatrix op = hermitian_exp(h, 1.0) * std::exp(Complex{0.0, xi * std::norm(lam)});
                total = k == 0 ? op : tensor_product(total, op, max_entries);
            }
            w.push_back(std::move(total));
        }
    return ConditionalEvolutions(2, spec.fock_dim(), tau, std::move(w));
}

}  // namespace purtel
