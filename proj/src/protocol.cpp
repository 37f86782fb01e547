#include "purtel/protocol.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "purtel/errors.hpp"

namespace purtel {

namespace {

using Index = Eigen::Index;

void check_indices(std::size_t d, std::size_t n, std::size_t m, const char* who) {
    if (d < 2) throw ValidationError(std::string(who) + ": d must be >= 2");
    if (n >= d || m >= d) throw IndexError(std::string(who) + ": Bell index out of range");
}

Complex root_of_unity(std::size_t k, std::size_t d) {
    // Exact values on the quarter circle keep the qubit corrections exact Paulis.
    if ((4 * (k % d)) % d == 0) {
        static constexpr Complex quarter[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
        return quarter[4 * (k % d) / d];
    }
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k % d) / static_cast<double>(d);
    return {std::cos(angle), std::sin(angle)};
}

// U ρ U† for U = Σ_{ab} |ab><ab|_{ctrl} ⊗ w_ab on the environment, which is the
// last subsystem. ρ is viewed as a grid of e×e blocks.
ComplexMatrix apply_conditional(const ComplexMatrix& rho, const std::array<std::size_t, 4>& dims,
                                std::size_t ctrl_a, std::size_t ctrl_b, const ConditionalEvolutions& w) {
    const auto e = static_cast<Index>(dims[3]);
    const Index blocks = rho.rows() / e;
    std::array<std::size_t, 3> strides{dims[1] * dims[2], dims[2], 1};
    std::vector<const ComplexMatrix*> op(static_cast<std::size_t>(blocks));
    for (Index b = 0; b < blocks; ++b) {
        const auto idx = static_cast<std::size_t>(b);
        const std::size_t ia = (idx / strides[ctrl_a]) % dims[ctrl_a];
        const std::size_t ib = (idx / strides[ctrl_b]) % dims[ctrl_b];
        op[idx] = &w.w(ia, ib);
    }
    ComplexMatrix out(rho.rows(), rho.cols());
    for (Index r = 0; r < blocks; ++r)
        for (Index c = 0; c < blocks; ++c)
            out.block(r * e, c * e, e, e).noalias() =
                *op[static_cast<std::size_t>(r)] * rho.block(r * e, c * e, e, e) *
                op[static_cast<std::size_t>(c)]->adjoint();
    return out;
}

// <φ|_{s1 s2} ρ |φ>_{s1 s2}, leaving the other subsystems in order.
ComplexMatrix project_pair(const ComplexMatrix& rho, std::span<const std::size_t> dims, std::size_t s1,
                           std::size_t s2, const ComplexVector& phi) {
    const std::array<std::size_t, 2> pair{s1, s2};
    std::vector<std::size_t> rest;
    for (std::size_t s = 0; s < dims.size(); ++s)
        if (s != s1 && s != s2) rest.push_back(s);
    const auto pair_off = detail::subsystem_offsets(dims, pair);
    const auto rest_off = detail::subsystem_offsets(dims, rest);

    std::vector<std::pair<std::size_t, Complex>> support;
    for (std::size_t x = 0; x < pair_off.size(); ++x) {
        const Complex a = phi(static_cast<Index>(x));
        if (a != Complex{0.0, 0.0}) support.emplace_back(pair_off[x], a);
    }
    const auto n = static_cast<Index>(rest_off.size());
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c) {
            Complex acc{0.0, 0.0};
            for (const auto& [ox, ax] : support)
                for (const auto& [oy, ay] : support)
                    acc += std::conj(ax) * ay *
                           rho(static_cast<Index>(ox + rest_off[static_cast<std::size_t>(r)]),
                               static_cast<Index>(oy + rest_off[static_cast<std::size_t>(c)]));
            out(r, c) = acc;
        }
    return out;
}

ComplexMatrix on_first_factor(const ComplexMatrix& u, std::size_t env_dim) {
    return tensor_product(u, ComplexMatrix::Identity(static_cast<Index>(env_dim), static_cast<Index>(env_dim)));
}

std::size_t resource_shift(Resource r) { return r == Resource::psi ? 1 : 0; }

void check_evolutions(const PureState& psi, const ConditionalEvolutions& w, const DensityMatrix& env,
                      Resource resource) {
    if (psi.dim() != w.d()) throw ShapeError("protocol: state dimension does not match the model");
    if (env.dim() != w.e()) throw ShapeError("protocol: environment state dimension does not match the model");
    if (resource == Resource::psi && w.d() != 2) throw ValidationError("protocol: the Ψ resource is defined for d = 2 only");
}

}  // namespace

PureState bell_state(std::size_t d, std::size_t n, std::size_t m) {
    check_indices(d, n, m, "bell_state");
    ComplexVector v = ComplexVector::Zero(static_cast<Index>(d * d));
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t j = 0; j < d; ++j) v(static_cast<Index>(j * d + (j + m) % d)) = norm * root_of_unity(j * n, d);
    return PureState(std::move(v));
}

ComplexMatrix correction_unitary(std::size_t d, std::size_t n, std::size_t m) {
    check_indices(d, n, m, "correction_unitary");
    const auto k = static_cast<Index>(d);
    ComplexMatrix u = ComplexMatrix::Zero(k, k);
    for (std::size_t j = 0; j < d; ++j) u(static_cast<Index>(j), static_cast<Index>((j + m) % d)) = root_of_unity(j * n, d);
    return u;
}

std::pair<std::size_t, std::size_t> correction_indices(std::size_t d, std::size_t n, std::size_t m,
                                                       std::size_t n_prime, std::size_t m_prime) {
    check_indices(d, n, m, "correction_indices");
    check_indices(d, n_prime, m_prime, "correction_indices");
    return {(n_prime + d - n) % d, (d - (m + m_prime) % d) % d};
}

Complex Coherences::at(std::size_t j, std::size_t k) const {
    if (!is_defined(j, k)) throw ValidationError("coherence entry undefined: amplitude of the input state vanishes");
    return value(static_cast<Index>(j), static_cast<Index>(k));
}

Coherences extract_coherences(const ComplexMatrix& rho, const PureState& psi) {
    if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != psi.dim())
        throw ShapeError("extract_coherences: state and ψ dimensions differ");
    const std::size_t d = psi.dim();
    Coherences out{ComplexMatrix(static_cast<Index>(d), static_cast<Index>(d)), std::vector<bool>(d * d)};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
            const Complex denom = psi[j] * std::conj(psi[k]);
            const bool ok = std::abs(denom) >= 1e-8;
            out.defined[j * d + k] = ok;
            out.value(static_cast<Index>(j), static_cast<Index>(k)) =
                ok ? rho(static_cast<Index>(j), static_cast<Index>(k)) / denom : Complex{nan, nan};
        }
    return out;
}

Coherences extract_coherences(const DensityMatrix& joint, std::size_t env_dim, const PureState& psi) {
    const std::array<std::size_t, 2> dims{psi.dim(), env_dim};
    const std::array<std::size_t, 1> keep{0};
    return extract_coherences(partial_trace(joint.matrix(), dims, keep), psi);
}

std::optional<DensityMatrix> FirstStepBranch::logical_c() const {
    if (!state_ce) return std::nullopt;
    const std::size_t d = this->d;
    const std::size_t e = state_ce->dim() / d;
    const std::array<std::size_t, 2> dims{d, e};
    const std::array<std::size_t, 1> keep{0};
    ComplexMatrix c = partial_trace(state_ce->matrix(), dims, keep);
    const std::size_t shift = resource_shift(resource);
    if (shift != 0) {
        const ComplexMatrix u = correction_unitary(d, 0, shift);
        c = u * c * u.adjoint();
    }
    return DensityMatrix(hermitian_part(c));
}

std::vector<FirstStepBranch> run_first_step(const PureState& psi, const ConditionalEvolutions& w,
                                            const DensityMatrix& env, Resource resource) {
    check_evolutions(psi, w, env, resource);
    const std::size_t d = w.d();
    const std::size_t e = w.e();
    const std::array<std::size_t, 4> dims{d, d, d, e};
    const std::size_t total = d * d * d * e;
    if (total * total > kDefaultMaxEntries * 4) throw SizingError("run_first_step: joint state too large");

    const PureState resource_state = bell_state(d, 0, resource_shift(resource));
    ComplexMatrix rho = tensor_product(
        tensor_product(DensityMatrix::from_pure(psi).matrix(), DensityMatrix::from_pure(resource_state).matrix()),
        env.matrix(), total * total);
    rho = apply_conditional(rho, dims, 1, 2, w);

    std::vector<FirstStepBranch> out;
    out.reserve(d * d);
    for (std::size_t n = 0; n < d; ++n)
        for (std::size_t m = 0; m < d; ++m) {
            const PureState bell = bell_state(d, n, m);
            ComplexMatrix ce = project_pair(rho, dims, 0, 1, bell.amplitudes());
            const double p = ce.trace().real();
            FirstStepBranch branch{BellIndex{n, m}, std::max(p, 0.0), std::nullopt, resource, d};
            if (p >= kNegligibleProbability) {
                const ComplexMatrix u = on_first_factor(correction_unitary(d, n, m), e);
                ce = u * ce * u.adjoint() / p;
                branch.state_ce.emplace(hermitian_part(ce));
            }
            out.push_back(std::move(branch));
        }
    return out;
}

std::vector<FirstStepBranch> run_first_step(const PureState& psi, const DephasingModel& model, double tau,
                                            const DensityMatrix& env, Resource resource) {
    return run_first_step(psi, conditional_evolutions(model, tau), env, resource);
}

std::vector<ProtocolOutcome> run_second_step(const FirstStepBranch& branch, const ConditionalEvolutions& w2,
                                             const PureState& psi) {
    const std::size_t d = w2.d();
    const std::size_t e = w2.e();
    if (psi.dim() != d) throw ShapeError("run_second_step: state dimension does not match the model");
    if (branch.resource == Resource::psi && d != 2) throw ValidationError("run_second_step: Ψ resource needs d = 2");
    const std::size_t n = branch.outcome.n;
    const std::size_t m = branch.outcome.m;
    check_indices(d, n, m, "run_second_step");

    std::vector<ProtocolOutcome> out;
    out.reserve(d * d);
    if (!branch.state_ce) {
        for (std::size_t n2 = 0; n2 < d; ++n2)
            for (std::size_t m2 = 0; m2 < d; ++m2)
                out.push_back(ProtocolOutcome{branch.outcome, BellIndex{n2, m2}, 0.0, {}, {}, {}});
        return out;
    }
    if (branch.state_ce->dim() != d * e) throw ShapeError("run_second_step: branch state does not match the model");

    const std::array<std::size_t, 4> dims{d, d, d, e};
    const std::size_t total = d * d * d * e;
    ComplexMatrix rho = tensor_product(DensityMatrix::from_pure(bell_state(d, n, m)).matrix(),
                                       branch.state_ce->matrix(), total * total);
    rho = apply_conditional(rho, dims, 0, 1, w2);

    const std::size_t shift = resource_shift(branch.resource);
    for (std::size_t n2 = 0; n2 < d; ++n2)
        for (std::size_t m2 = 0; m2 < d; ++m2) {
            ProtocolOutcome outcome{branch.outcome, BellIndex{n2, m2}, 0.0, {}, {}, {}};
            ComplexMatrix ae = project_pair(rho, dims, 1, 2, bell_state(d, n2, m2).amplitudes());
            const double p = ae.trace().real();
            outcome.probability = branch.probability * std::max(p, 0.0);
            if (p >= kNegligibleProbability && outcome.probability >= kNegligibleProbability) {
                auto [big_n, big_m] = correction_indices(d, n, m, n2, m2);
                big_m = (big_m + shift) % d;
                const ComplexMatrix u = on_first_factor(correction_unitary(d, big_n, big_m), e);
                ae = hermitian_part(u * ae * u.adjoint() / p);
                DensityMatrix joint(ae);
                const std::array<std::size_t, 2> jd{d, e};
                const std::array<std::size_t, 1> keep{0};
                DensityMatrix reduced = partial_trace(joint, jd, keep);
                outcome.coherence = extract_coherences(reduced.matrix(), psi);
                outcome.final_state.emplace(std::move(reduced));
                outcome.joint_ae.emplace(std::move(joint));
            }
            out.push_back(std::move(outcome));
        }
    return out;
}

ProtocolResult run_protocol(const PureState& psi, const ConditionalEvolutions& w1, const ConditionalEvolutions& w2,
                            const DensityMatrix& env, Resource resource) {
    check_evolutions(psi, w1, env, resource);
    if (w2.d() != w1.d() || w2.e() != w1.e()) throw ShapeError("run_protocol: step evolutions differ in shape");
    const std::size_t d = w1.d();
    const double uniform = 1.0 / static_cast<double>(d * d);

    ProtocolResult result;
    result.first_step = run_first_step(psi, w1, env, resource);
    ComplexMatrix average = ComplexMatrix::Zero(static_cast<Index>(d), static_cast<Index>(d));
    double total_probability = 0.0;
    for (const auto& branch : result.first_step) {
        result.max_probability_deviation =
            std::max(result.max_probability_deviation, std::abs(branch.probability - uniform));
        const auto c = branch.logical_c();
        result.f1.push_back(c ? fidelity_pure(psi, *c) : std::numeric_limits<double>::quiet_NaN());

        auto outcomes = run_second_step(branch, w2, psi);
        for (auto& o : outcomes) {
            if (branch.probability >= kNegligibleProbability)
                result.max_probability_deviation =
                    std::max(result.max_probability_deviation, std::abs(o.probability / branch.probability - uniform));
            if (o.final_state) average += o.probability * o.final_state->matrix();
            total_probability += o.probability;
            result.outcomes.push_back(std::move(o));
        }
    }
    if (std::abs(total_probability - 1.0) > 1e-10)
        throw ValidationError("run_protocol: outcome probabilities sum to " + std::to_string(total_probability));
    result.average_state.emplace(hermitian_part(average / total_probability));
    result.f2 = fidelity_pure(psi, *result.average_state);
    return result;
}

ProtocolResult run_protocol(const PureState& psi, const DephasingModel& model, double tau1, double tau2,
                            const DensityMatrix& env, Resource resource) {
    return run_protocol(psi, conditional_evolutions(model, tau1), conditional_evolutions(model, tau2), env, resource);
}

}  // namespace purtel
