// Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Sub-checks that fail are named on the line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "purtel/env_models.hpp"
#include "purtel/factors.hpp"
#include "purtel/protocol.hpp"
#include "purtel/rng.hpp"
#include "purtel/spinboson.hpp"

using namespace purtel;

namespace {

constexpr EnvStateFamily kFamilies[] = {EnvStateFamily::thermal, EnvStateFamily::mixed, EnvStateFamily::pure};

// Largest |p - 1/d²| seen anywhere, per dimension; feeds criterion 9.
double g_prob_dev[5] = {0, 0, 0, 0, 0};
std::size_t g_prob_runs[5] = {0, 0, 0, 0, 0};

void record_probabilities(std::size_t d, const ProtocolResult& r) {
    g_prob_dev[d] = std::max(g_prob_dev[d], r.max_probability_deviation);
    ++g_prob_runs[d];
}

struct Outcome {
    std::vector<std::string> failed;
    std::string detail;

    void check(bool ok, const std::string& name) {
        if (!ok) failed.push_back(name);
    }
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

bool run_criterion(int id, const char* title, double time_limit, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out = body();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (time_limit > 0.0) out.check(secs < time_limit, "runtime " + fmt(secs) + " s >= " + fmt(time_limit) + " s");
    const bool pass = out.failed.empty();
    std::string failed;
    for (const auto& f : out.failed) failed += (failed.empty() ? "" : "; ") + f;
    std::printf("[%s] criterion %d: %s | %s | %.2f s%s%s\n", pass ? "PASS" : "FAIL", id, title, out.detail.c_str(), secs,
                pass ? "" : " | failed: ", failed.c_str());
    std::fflush(stdout);
    return pass;
}

Outcome purification_theorem() {
    Outcome out;
    double worst_fidelity = 0.0, worst_probability = 0.0;
    std::size_t runs = 0;
    const double taus[] = {0.3, 0.8, 1.5, 2.7, 5.0};
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        for (std::size_t e : {2u, 4u, 8u}) {
            const DephasingModel model = commuting_model(2, e, 1000 + seed * 10 + e);
            Rng rng(seed);
            const PureState psi = random_pure_state(2, rng);
            for (auto family : kFamilies) {
                const DensityMatrix env = environment_state(family, e, 2000 + seed * 10 + e);
                for (double tau : taus) {
                    const auto w = conditional_evolutions(model, tau);
                    const ProtocolResult r = run_protocol(psi, w, w, env);
                    record_probabilities(2, r);
                    double p = 0.0;
                    for (const auto& o : r.outcomes)
                        if (o.first.m == 0 && o.second.m == 1) {
                            worst_fidelity = std::max(worst_fidelity, 1.0 - fidelity_pure(psi, *o.final_state));
                            p += o.probability;
                        }
                    worst_probability = std::max(worst_probability, std::abs(p - 0.25));
                    ++runs;
                }
            }
        }
    out.check(worst_fidelity <= 1e-10, "fidelity");
    out.check(worst_probability <= 1e-10, "probability");
    out.detail = std::to_string(runs) + " runs, max 1-F " + fmt(worst_fidelity) + ", max |P-1/4| " + fmt(worst_probability);
    return out;
}

Outcome oracle_equivalence() {
    Outcome out;
    double factor_dev = 0.0, fidelity_dev = 0.0, nonzero_defect = INFINITY;
    for (std::size_t d : {2u, 3u, 4u}) {
        const std::size_t e = d == 2 ? 4 : 3;
        for (std::uint64_t i = 0; i < 50; ++i) {
            const std::uint64_t seed = 5000 + 100 * d + i;
            const DephasingModel model = random_model(d, e, seed);
            Rng rng(seed);
            const PureState psi = random_pure_state(d, rng);
            const DensityMatrix env = environment_state(kFamilies[i % 3], e, seed + 7);
            const double tau = 0.2 + 2.0 * rng.uniform();
            const auto w = conditional_evolutions(model, tau);
            nonzero_defect = std::min(nonzero_defect, commutation_defect(w).diagonal);
            const ProtocolResult r = run_protocol(psi, w, w, env);
            record_probabilities(d, r);

            for (std::size_t b = 0; b < r.first_step.size(); ++b) {
                const auto& branch = r.first_step[b];
                const Coherences co = extract_coherences(*branch.state_ce, e, psi);
                ComplexMatrix f = ComplexMatrix::Ones(d, d);
                for (std::size_t j = 0; j < d; ++j)
                    for (std::size_t k = 0; k < d; ++k) {
                        f(j, k) = first_step_factor(w, env, branch.outcome.m, j, k);
                        factor_dev = std::max(factor_dev, std::abs(co.at(j, k) - f(j, k)));
                    }
                const double predicted = d == 2 ? fidelity_f1(std::norm(psi[0]) * std::norm(psi[1]), f(0, 1))
                                                : fidelity_from_coherences(psi, f);
                fidelity_dev = std::max(fidelity_dev, std::abs(predicted - r.f1[b]));
            }
            double f2 = 0.0;
            for (const auto& o : r.outcomes) {
                ComplexMatrix f = ComplexMatrix::Ones(d, d);
                for (std::size_t j = 0; j < d; ++j)
                    for (std::size_t k = 0; k < d; ++k) {
                        f(j, k) = second_step_factor(w, env, o.first.m, o.second.m, j, k);
                        factor_dev = std::max(factor_dev, std::abs(o.coherence->at(j, k) - f(j, k)));
                    }
                f2 += o.probability * fidelity_from_coherences(psi, f);
            }
            fidelity_dev = std::max(fidelity_dev, std::abs(f2 - r.f2));
            if (d == 2) {
                const double ab2 = std::norm(psi[0]) * std::norm(psi[1]);
                fidelity_dev = std::max(fidelity_dev, std::abs(fidelity_f2(ab2, qubit_factors(w, env)) - r.f2));
            }
        }
    }
    out.check(factor_dev <= 1e-10, "factors");
    out.check(fidelity_dev <= 1e-10, "fidelities");
    out.check(nonzero_defect > 1e-6, "models not generic");
    out.detail = "150 models, max factor dev " + fmt(factor_dev) + ", max fidelity dev " + fmt(fidelity_dev) +
                 ", min commutator " + fmt(nonzero_defect);
    return out;
}

Outcome psi_resource_variant() {
    Outcome out;
    double worst = 0.0, best_other = INFINITY;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t e = 2 + seed % 3 * 2;
        const DephasingModel model = swap_commuting_model(e, 300 + seed);
        Rng rng(300 + seed);
        const PureState psi = random_pure_state(2, rng);
        const DensityMatrix env = environment_state(kFamilies[seed % 3], e, 400 + seed);
        const ProtocolResult r = run_protocol(psi, model, 1.1, 1.1, env, Resource::psi);
        record_probabilities(2, r);
        double p = 0.0;
        for (const auto& o : r.outcomes) {
            const double loss = 1.0 - fidelity_pure(psi, *o.final_state);
            if (o.first.m == 1 && o.second.m == 0) {
                worst = std::max(worst, loss);
                p += o.probability;
            } else {
                best_other = std::min(best_other, loss);
            }
        }
        out.check(std::abs(p - 0.25) <= 1e-10, "probability of purified class");
    }
    out.check(worst <= 1e-10, "fidelity on Ψ-then-Φ branches");
    out.detail = "purified class (Psi first, Phi second): max 1-F " + fmt(worst) + "; other classes min 1-F " +
                 fmt(best_other);
    return out;
}

Outcome qudit_pattern() {
    Outcome out;
    std::size_t reduced_pairs = 0, total_pairs = 0;
    double one_step_dev = 0.0, restore_dev = 0.0, min_unrestored = INFINITY, classify_dev = 0.0;
    bool classification_consistent = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed)
        for (std::size_t d : {3u, 4u}) {
            const DephasingModel model = commuting_model(d, 3, 700 + 10 * seed + d);
            Rng rng(700 + seed);
            const PureState psi = random_pure_state(d, rng);
            const DensityMatrix env = environment_state(kFamilies[seed % 3], 3, 800 + seed);
            const auto w = conditional_evolutions(model, 0.6 + 0.3 * static_cast<double>(seed));
            const ProtocolResult r = run_protocol(psi, w, w, env);
            record_probabilities(d, r);
            auto simulated = [&](std::size_t m, std::size_t mp, std::size_t j, std::size_t k) {
                for (const auto& o : r.outcomes)
                    if (o.first.n == 0 && o.second.n == 0 && o.first.m == m && o.second.m == mp)
                        return o.coherence->at(j, k);
                return Complex{NAN, NAN};
            };

            for (std::size_t mp = 0; mp < d; ++mp) {
                const std::size_t big_m = (d - mp) % d;
                for (std::size_t j = 0; j < d; ++j)
                    for (std::size_t k = j + 1; k < d; ++k) {
                        const Complex c = simulated(0, mp, j, k);
                        if (d == 3) {
                            ++total_pairs;
                            // The pair reduces if it is linked by the shift M; orient it as (i, i⊕M).
                            const bool forward = big_m != 0 && (j + big_m) % d == k;
                            const bool backward = big_m != 0 && (k + big_m) % d == j;
                            if (forward || backward) {
                                const Complex reduced = forward ? one_step_reduced_factor(w, env, j, big_m)
                                                                : std::conj(one_step_reduced_factor(w, env, k, big_m));
                                one_step_dev = std::max(one_step_dev, std::abs(c - reduced));
                                if (std::abs(c - reduced) <= 1e-10) ++reduced_pairs;
                            }
                        }
                        if (d == 4 && mp == 2 && k == j + 2) restore_dev = std::max(restore_dev, std::abs(c - 1.0));
                    }
            }
            for (std::size_t m = 1; m < d; ++m)
                for (std::size_t mp = 0; mp < d; ++mp)
                    for (std::size_t j = 0; j < d; ++j)
                        for (std::size_t k = 0; k < d; ++k)
                            if (j != k) min_unrestored = std::min(min_unrestored, std::abs(1.0 - simulated(m, mp, j, k)));

            // The classifier against the same simulation.
            for (const auto& e : classify_purification(d).entries) {
                const Complex c = simulated(0, e.m_prime, e.j, e.j_prime);
                const std::size_t big_m = (d - e.m_prime) % d;
                const bool forward = (e.j + big_m) % d == e.j_prime;
                const Complex reduced = forward ? one_step_reduced_factor(w, env, e.j, big_m)
                                                : std::conj(one_step_reduced_factor(w, env, e.j_prime, big_m));
                if (e.kind == PurificationKind::full_restore) classify_dev = std::max(classify_dev, std::abs(c - 1.0));
                if (e.kind == PurificationKind::one_step) classify_dev = std::max(classify_dev, std::abs(c - reduced));
                if (e.kind == PurificationKind::unprotected && std::abs(1.0 - c) <= 1e-3) classification_consistent = false;
            }
        }
    out.check(reduced_pairs == total_pairs,
              "d=3: " + std::to_string(reduced_pairs) + " of " + std::to_string(total_pairs) +
                  " (m', pair) coherences reduce; the m'=0 pairs (M=0) cannot");
    out.check(one_step_dev <= 1e-10, "one-step deviation");
    out.check(restore_dev <= 1e-10, "d=4 m'=2 restoration");
    out.check(min_unrestored > 1e-3, "m!=0 restoration");
    out.check(classify_dev <= 1e-10 && classification_consistent, "classifier vs simulation");
    out.detail = "d=3 reduced " + std::to_string(reduced_pairs) + "/" + std::to_string(total_pairs) +
                 " (max dev on linked pairs " + fmt(one_step_dev) + "), d=4 m'=2 max |1-C| " + fmt(restore_dev) +
                 ", m!=0 min |1-C| " + fmt(min_unrestored) + ", classifier dev " + fmt(classify_dev);
    return out;
}

Outcome spinboson_relations() {
    Outcome out;
    const SpinBosonParams p;
    double cphi_dev = 0.0, cprime_dev = 0.0, imag_max = 0.0, c_dev = 0.0, cp_dev = 0.0;
    for (double tau : linspace(0.0, 20.0, 200)) {
        const ContinuumFactors f = continuum_factors(tau, p);
        const double lc = ln_c(tau, p);
        cphi_dev = std::max(cphi_dev, std::abs(std::log(f.c_phi).real() - 4.0 * lc));
        cphi_dev = std::max(cphi_dev, std::abs(ln_c_phi(tau, p) - 4.0 * lc));
        cprime_dev = std::max(cprime_dev, std::abs(f.cp_phi - f.cp_psi));
        for (Complex c : {f.c, f.c_phi, f.c_psi, f.cp_phi, f.cp_psi}) imag_max = std::max(imag_max, std::abs(c.imag()));
        c_dev = std::max(c_dev, std::abs(std::log(f.c).real() - lc));
        cp_dev = std::max(cp_dev, std::abs(std::log(f.cp_phi).real() - ln_c_prime(tau, p)));
    }
    out.check(cphi_dev <= 1e-10, "ln C_Phi = 4 ln c");
    out.check(cprime_dev <= 1e-12, "C'_Phi = C'_Psi");
    out.check(imag_max <= 1e-10, "reality");
    out.check(c_dev <= 1e-10 && cp_dev <= 1e-10, "assembler vs integrals");
    out.detail = "200 points: |ln C_Phi - 4 ln c| " + fmt(cphi_dev) + ", |C'_Phi - C'_Psi| " + fmt(cprime_dev) +
                 ", max |Im| " + fmt(imag_max) + ", assembler dev " + fmt(std::max(c_dev, cp_dev));
    return out;
}

Outcome fig2_reproduction() {
    Outcome out;
    const SpinBosonParams p;
    const auto grid = linspace(0.0, 20.0, 400);
    const auto rows = fidelity_curves(p, 0.25, grid);
    const double step = grid[1] - grid[0];
    double peak = NAN;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i)
        if (std::abs(rows[i].tau - p.t_bar) <= step && rows[i].f1 > rows[i - 1].f1 && rows[i].f1 > rows[i + 1].f1)
            peak = rows[i].tau;
    out.check(!std::isnan(peak), "local maximum of F1 at t_bar");
    const FidelityRow last = fidelity_curves(p, 0.25, {20.0}).front();
    out.check(std::abs(last.f1 - 0.5) <= 0.01, "F1(20) = " + fmt(last.f1) + ", expected 0.5 +- 0.01");
    out.check(std::abs(last.f2 - 0.625) <= 0.01, "F2(20) = " + fmt(last.f2) + ", expected 0.625 +- 0.01");
    bool short_ok = true, long_ok = true;
    for (const auto& r : rows) {
        if (r.tau > 0.0 && r.tau <= 0.2) short_ok = short_ok && r.f2 < r.f1;
        if (r.tau >= 15.0) long_ok = long_ok && r.f2 > r.f1;
    }
    out.check(short_ok, "F2 < F1 for tau <= 0.2");
    out.check(long_ok, "F2 > F1 for tau >= 15");
    out.detail = "F1 peak at tau " + fmt(peak) + ", F1(20) " + fmt(last.f1) + ", F2(20) " + fmt(last.f2);
    return out;
}

Outcome fock_oracle() {
    Outcome out;
    auto deviation = [](std::size_t n_max) {
        const auto spec = BosonRegisterSpec::single_mode(1.0, {1.5, 0.0}, 0.0, n_max, 10.0);
        const BosonRegister reg = boson_register_model(spec);
        const auto w = conditional_evolutions(reg.model, std::numbers::pi);
        const Complex fock = first_step_factor(w, reg.thermal, 0, 0, 1);
        return std::abs(fock - std::exp(ln_c_modes(std::numbers::pi, spec.modes, spec.beta)));
    };
    const double d30 = deviation(30);
    const double d60 = deviation(60);
    out.check(d30 <= 1e-6, "n_max=30 deviation");
    out.check(d60 <= 0.5 * d30, "halving");
    out.detail = "deviation " + fmt(d30) + " at n_max=30, " + fmt(d60) + " at n_max=60";
    return out;
}

Outcome time_mismatch() {
    Outcome out;
    double worst_slope = 0.0, worst_coef = 0.0;
    std::vector<double> deltas;
    for (int i = 0; i < 10; ++i) deltas.push_back(1e-3 * std::pow(10.0, i / 9.0));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const DephasingModel model = commuting_model(2, 4, 900 + seed);
        const DensityMatrix env = environment_state(kFamilies[seed % 3], 4, 950 + seed);
        const double tau = 1.0;
        const auto w1 = conditional_evolutions(model, tau);
        std::vector<double> y;
        double num = 0.0, den = 0.0;
        for (double delta : deltas) {
            const Complex c = second_step_factor(w1, conditional_evolutions(model, tau + delta), env, 0, 1, 0, 1);
            const double v = 1.0 - std::norm(c);
            y.push_back(v);
            num += v * delta * delta;
            den += std::pow(delta, 4);
        }
        const double variance = mismatch_scan(model, env, tau, {0.0}).front().variance;
        const double slope = loglog_slope(deltas, y);
        worst_slope = std::max(worst_slope, std::abs(slope - 2.0));
        worst_coef = std::max(worst_coef, std::abs(num / den - variance) / variance);
    }
    out.check(worst_slope <= 0.05, "slope");
    out.check(worst_coef <= 0.05, "coefficient");
    out.detail = "5 models: max |slope-2| " + fmt(worst_slope) + ", max relative coefficient error " + fmt(worst_coef);
    return out;
}

Outcome probability_sanity() {
    Outcome out;
    for (std::size_t d : {2u, 3u, 4u}) {
        out.check(g_prob_runs[d] > 0, "no runs for d=" + std::to_string(d));
        out.check(g_prob_dev[d] <= 1e-8, "d=" + std::to_string(d));
        out.detail += (d == 2 ? "" : ", ") + std::string("d=") + std::to_string(d) + ": " +
                      std::to_string(g_prob_runs[d]) + " runs, max |p-1/d^2| " + fmt(g_prob_dev[d]);
    }
    return out;
}

}  // namespace

int main() {
    bool all = true;
    all &= run_criterion(1, "purification theorem", 5.0, purification_theorem);
    all &= run_criterion(2, "oracle equivalence", 60.0, oracle_equivalence);
    all &= run_criterion(3, "Psi-resource variant", 0.0, psi_resource_variant);
    all &= run_criterion(4, "qudit pattern", 30.0, qudit_pattern);
    all &= run_criterion(5, "spin-boson relations", 0.0, spinboson_relations);
    all &= run_criterion(6, "fidelity curves", 10.0, fig2_reproduction);
    all &= run_criterion(7, "Fock oracle", 0.0, fock_oracle);
    all &= run_criterion(8, "time mismatch", 0.0, time_mismatch);
    all &= run_criterion(9, "probability sanity", 0.0, probability_sanity);
    return all ? 0 : 1;
}
