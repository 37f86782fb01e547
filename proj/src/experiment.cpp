#include "purtel/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "purtel/errors.hpp"
#include "purtel/factors.hpp"
#include "purtel/rng.hpp"

namespace purtel {

namespace {

constexpr std::uint64_t kEnvSeedSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kPsiSeedSalt = 0xc2b2ae3d27d4eb4fULL;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"model", {"kind", "d", "e", "seed", "env", "omega", "g", "t_bar", "n_max", "beta", "frame"}},
        {"protocol", {"psi_re", "psi_im", "tau1", "tau2", "resource", "samples"}},
        {"spinboson", {"s", "lambda", "temperature", "t_bar", "omega_max", "quad_points", "alpha_beta_sq"}},
        {"grid", {"tau_min", "tau_max", "points"}},
        {"oracle", {"models", "tau"}},
        {"mismatch", {"tau", "delta_min", "delta_max", "points"}},
        {"atlas", {"d"}},
        {"output", {"path"}},
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw ValidationError("config: invalid value '" + value + "' for " + key);
}

double to_double(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) bad_value(key, raw);
    return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) bad_value(key, raw);
    return x;
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    if (trim(raw).empty()) return out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    return out;
}

ModelKind to_kind(const std::string& v) {
    if (v == "random") return ModelKind::random;
    if (v == "commuting") return ModelKind::commuting;
    if (v == "swap_commuting") return ModelKind::swap_commuting;
    if (v == "boson") return ModelKind::boson;
    if (v == "noiseless") return ModelKind::noiseless;
    bad_value("model.kind", v);
}

std::string kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::random: return "random";
        case ModelKind::commuting: return "commuting";
        case ModelKind::swap_commuting: return "swap_commuting";
        case ModelKind::boson: return "boson";
        case ModelKind::noiseless: return "noiseless";
    }
    return "random";
}

EnvStateFamily to_family(const std::string& v) {
    if (v == "thermal") return EnvStateFamily::thermal;
    if (v == "mixed") return EnvStateFamily::mixed;
    if (v == "pure") return EnvStateFamily::pure;
    bad_value("model.env", v);
}

std::string family_name(EnvStateFamily f) {
    switch (f) {
        case EnvStateFamily::thermal: return "thermal";
        case EnvStateFamily::mixed: return "mixed";
        case EnvStateFamily::pure: return "pure";
    }
    return "thermal";
}

// Shortest text that reads back to the same double.
std::string exact(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + exact(v[i]);
    return out;
}

BosonRegisterSpec boson_spec(const ModelConfig& m) {
    return BosonRegisterSpec::single_mode(m.omega, Complex{m.g, 0.0}, m.t_bar, m.n_max, m.beta);
}

DephasingModel make_model(const ModelConfig& m, std::uint64_t seed) {
    switch (m.kind) {
        case ModelKind::random: return random_model(m.d, m.e, seed);
        case ModelKind::commuting: return commuting_model(m.d, m.e, seed);
        case ModelKind::swap_commuting: return swap_commuting_model(m.e, seed);
        case ModelKind::noiseless:
            return DephasingModel(m.d, m.e,
                                  std::vector<ComplexMatrix>(m.d * m.d, ComplexMatrix::Zero(static_cast<Eigen::Index>(m.e),
                                                                                            static_cast<Eigen::Index>(m.e))));
        case ModelKind::boson: return boson_register_model(boson_spec(m)).model;
    }
    throw ValidationError("unknown model kind");
}

PureState make_psi(const ScenarioConfig& c, std::size_t d, std::uint64_t seed, bool random_if_unset) {
    const auto& p = c.protocol;
    if (p.psi_re.empty()) {
        if (random_if_unset) {
            Rng rng(seed ^ kPsiSeedSalt);
            return random_pure_state(d, rng);
        }
        return PureState::normalized(ComplexVector::Ones(static_cast<Eigen::Index>(d)));
    }
    ComplexVector v(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j)
        v(static_cast<Eigen::Index>(j)) = Complex{p.psi_re[j], p.psi_im.empty() ? 0.0 : p.psi_im[j]};
    if (v.norm() == 0.0) throw ValidationError("config: psi must be nonzero");
    return PureState::normalized(v);
}

struct Instance {
    ConditionalEvolutions w1;
    ConditionalEvolutions w2;
    DensityMatrix env;
};

Instance make_instance(const ModelConfig& m, std::uint64_t seed, double tau1, double tau2) {
    if (m.kind == ModelKind::boson) {
        const BosonRegisterSpec spec = boson_spec(m);
        BosonRegister reg = boson_register_model(spec);
        if (m.interaction_frame)
            return {boson_interaction_evolutions(spec, tau1), boson_interaction_evolutions(spec, tau2), reg.thermal};
        return {conditional_evolutions(reg.model, tau1), conditional_evolutions(reg.model, tau2), reg.thermal};
    }
    const DephasingModel model = make_model(m, seed);
    return {conditional_evolutions(model, tau1), conditional_evolutions(model, tau2),
            environment_state(m.env, m.e, seed ^ kEnvSeedSalt)};
}

std::string bell_name(std::size_t d, const BellIndex& b) {
    if (d == 2) {
        static const char* names[2][2] = {{"Phi+", "Psi+"}, {"Phi-", "Psi-"}};
        return names[b.n][b.m];
    }
    return "(" + std::to_string(b.n) + "," + std::to_string(b.m) + ")";
}

void add_line(OracleReport& r, const std::string& label, double dev) {
    for (auto& l : r.lines)
        if (l.label == label) {
            l.max_deviation = std::max(l.max_deviation, dev);
            return;
        }
    r.lines.push_back(OracleLine{label, dev});
}

}  // namespace

void ScenarioConfig::validate() const {
    const auto& m = model;
    if (m.d < 2 || m.d > 6) throw ValidationError("config: model.d must be in [2, 6]");
    if (m.e < 1 || m.e > 64) throw ValidationError("config: model.e must be in [1, 64]");
    if (m.kind == ModelKind::random && m.e < 2) throw ValidationError("config: random models need e >= 2");
    if ((m.kind == ModelKind::swap_commuting || m.kind == ModelKind::boson) && m.d != 2)
        throw ValidationError("config: this model kind needs d = 2");
    if (m.kind == ModelKind::boson) boson_spec(m).validate();
    if (!(m.beta > 0.0) || !std::isfinite(m.beta)) throw ValidationError("config: model.beta must be positive");
    const auto& p = protocol;
    if (!std::isfinite(p.tau1) || !std::isfinite(p.tau2)) throw ValidationError("config: tau1, tau2 must be finite");
    if (!p.psi_re.empty() && p.psi_re.size() != m.d) throw ValidationError("config: psi_re must have d entries");
    if (!p.psi_im.empty() && p.psi_im.size() != p.psi_re.size())
        throw ValidationError("config: psi_im must match psi_re in length");
    if (p.resource == Resource::psi && m.d != 2) throw ValidationError("config: resource psi needs d = 2");
    if (p.samples > 10'000'000) throw ValidationError("config: protocol.samples too large");
    spinboson.validate();
    if (!(alpha_beta_sq >= 0.0 && alpha_beta_sq <= 0.25))
        throw ValidationError("config: alpha_beta_sq must lie in [0, 0.25]");
    if (!(grid.tau_min >= 0.0) || !(grid.tau_max >= grid.tau_min) || !std::isfinite(grid.tau_max))
        throw ValidationError("config: grid needs 0 <= tau_min <= tau_max");
    if (grid.points < 1 || grid.points > 1'000'000) throw ValidationError("config: grid.points must be in [1, 1e6]");
    if (oracle.models < 1 || oracle.models > 10'000) throw ValidationError("config: oracle.models must be in [1, 1e4]");
    if (!std::isfinite(oracle.tau)) throw ValidationError("config: oracle.tau must be finite");
    if (!(mismatch.delta_min > 0.0) || !(mismatch.delta_max > mismatch.delta_min) || !std::isfinite(mismatch.delta_max))
        throw ValidationError("config: mismatch needs 0 < delta_min < delta_max");
    if (mismatch.points < 2 || mismatch.points > 100'000) throw ValidationError("config: mismatch.points must be >= 2");
    if (!std::isfinite(mismatch.tau)) throw ValidationError("config: mismatch.tau must be finite");
    if (atlas_d < 2 || atlas_d > 64) throw ValidationError("config: atlas.d must be in [2, 64]");
}

ScenarioConfig parse_config(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    ScenarioConfig c;
    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end() || body.empty()) throw ValidationError("config: unknown section '" + section + "'");
        for (const auto& [key, node] : body) {
            if (!it->second.count(key)) throw ValidationError("config: unknown key '" + section + "." + key + "'");
            const std::string v = trim(node.data());
            const std::string name = section + "." + key;
            if (section == "model") {
                if (key == "kind") c.model.kind = to_kind(v);
                else if (key == "d") c.model.d = to_uint(name, v);
                else if (key == "e") c.model.e = to_uint(name, v);
                else if (key == "seed") c.model.seed = to_uint(name, v);
                else if (key == "env") c.model.env = to_family(v);
                else if (key == "omega") c.model.omega = to_double(name, v);
                else if (key == "g") c.model.g = to_double(name, v);
                else if (key == "t_bar") c.model.t_bar = to_double(name, v);
                else if (key == "n_max") c.model.n_max = to_uint(name, v);
                else if (key == "beta") c.model.beta = to_double(name, v);
                else if (key == "frame") {
                    if (v != "interaction" && v != "schrodinger") bad_value(name, v);
                    c.model.interaction_frame = v == "interaction";
                }
            } else if (section == "protocol") {
                if (key == "psi_re") c.protocol.psi_re = to_list(name, v);
                else if (key == "psi_im") c.protocol.psi_im = to_list(name, v);
                else if (key == "tau1") c.protocol.tau1 = to_double(name, v);
                else if (key == "tau2") c.protocol.tau2 = to_double(name, v);
                else if (key == "samples") c.protocol.samples = to_uint(name, v);
                else if (key == "resource") {
                    if (v != "phi_plus" && v != "psi") bad_value(name, v);
                    c.protocol.resource = v == "psi" ? Resource::psi : Resource::phi_plus;
                }
            } else if (section == "spinboson") {
                if (key == "s") c.spinboson.s = to_double(name, v);
                else if (key == "lambda") c.spinboson.lambda = to_double(name, v);
                else if (key == "temperature") c.spinboson.temperature = to_double(name, v);
                else if (key == "t_bar") c.spinboson.t_bar = to_double(name, v);
                else if (key == "omega_max") c.spinboson.omega_max = to_double(name, v);
                else if (key == "quad_points") c.spinboson.quad_points = to_uint(name, v);
                else if (key == "alpha_beta_sq") c.alpha_beta_sq = to_double(name, v);
            } else if (section == "grid") {
                if (key == "tau_min") c.grid.tau_min = to_double(name, v);
                else if (key == "tau_max") c.grid.tau_max = to_double(name, v);
                else if (key == "points") c.grid.points = to_uint(name, v);
            } else if (section == "oracle") {
                if (key == "models") c.oracle.models = to_uint(name, v);
                else if (key == "tau") c.oracle.tau = to_double(name, v);
            } else if (section == "mismatch") {
                if (key == "tau") c.mismatch.tau = to_double(name, v);
                else if (key == "delta_min") c.mismatch.delta_min = to_double(name, v);
                else if (key == "delta_max") c.mismatch.delta_max = to_double(name, v);
                else if (key == "points") c.mismatch.points = to_uint(name, v);
            } else if (section == "atlas") {
                c.atlas_d = to_uint(name, v);
            } else if (section == "output") {
                c.out = v;
            }
        }
    }
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path);
    return parse_config(in);
}

void write_config(std::ostream& out, const ScenarioConfig& c) {
    const auto& m = c.model;
    out << "[model]\nkind = " << kind_name(m.kind) << "\nd = " << m.d << "\ne = " << m.e << "\nseed = " << m.seed
        << "\nenv = " << family_name(m.env) << "\nomega = " << exact(m.omega) << "\ng = " << exact(m.g)
        << "\nt_bar = " << exact(m.t_bar) << "\nn_max = " << m.n_max << "\nbeta = " << exact(m.beta)
        << "\nframe = " << (m.interaction_frame ? "interaction" : "schrodinger") << "\n\n";
    const auto& p = c.protocol;
    out << "[protocol]\npsi_re = " << join(p.psi_re) << "\npsi_im = " << join(p.psi_im) << "\ntau1 = " << exact(p.tau1)
        << "\ntau2 = " << exact(p.tau2) << "\nresource = " << (p.resource == Resource::psi ? "psi" : "phi_plus")
        << "\nsamples = " << p.samples << "\n\n";
    const auto& s = c.spinboson;
    out << "[spinboson]\ns = " << exact(s.s) << "\nlambda = " << exact(s.lambda) << "\ntemperature = "
        << exact(s.temperature) << "\nt_bar = " << exact(s.t_bar) << "\nomega_max = " << exact(s.omega_max)
        << "\nquad_points = " << s.quad_points << "\nalpha_beta_sq = " << exact(c.alpha_beta_sq) << "\n\n";
    out << "[grid]\ntau_min = " << exact(c.grid.tau_min) << "\ntau_max = " << exact(c.grid.tau_max)
        << "\npoints = " << c.grid.points << "\n\n";
    out << "[oracle]\nmodels = " << c.oracle.models << "\ntau = " << exact(c.oracle.tau) << "\n\n";
    out << "[mismatch]\ntau = " << exact(c.mismatch.tau) << "\ndelta_min = " << exact(c.mismatch.delta_min)
        << "\ndelta_max = " << exact(c.mismatch.delta_max) << "\npoints = " << c.mismatch.points << "\n\n";
    out << "[atlas]\nd = " << c.atlas_d << "\n";
    if (!c.out.empty()) out << "\n[output]\npath = " << c.out << "\n";
}

std::string format_number(double x) {
    if (x == 0.0) return "0";  // also folds -0
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

Scenario build_scenario(const ScenarioConfig& config) {
    config.validate();
    Instance inst = make_instance(config.model, config.model.seed, config.protocol.tau1, config.protocol.tau2);
    const std::size_t d = inst.w1.d();
    return Scenario{std::move(inst.w1), std::move(inst.w2), std::move(inst.env), make_psi(config, d, config.model.seed, false)};
}

std::string cmd_fig2(const ScenarioConfig& config) {
    config.validate();
    const auto grid = linspace(config.grid.tau_min, config.grid.tau_max, config.grid.points);
    const auto rows = fidelity_curves(config.spinboson, config.alpha_beta_sq, grid);
    std::string out = "tau,F1,F2,F_cphi,F_cprime,F_const\n";
    for (const auto& r : rows)
        out += format_number(r.tau) + "," + format_number(r.f1) + "," + format_number(r.f2) + "," +
               format_number(r.f_cphi) + "," + format_number(r.f_cprime) + "," + format_number(r.f_const) + "\n";
    return out;
}

std::string cmd_atlas(const ScenarioConfig& config) {
    config.validate();
    const std::size_t d = config.atlas_d;
    const PurificationPattern pattern = classify_purification(d);
    // Factor values on a seeded commuting instance of the configured size.
    const DephasingModel model = commuting_model(d, config.model.e, config.model.seed);
    const auto w = conditional_evolutions(model, config.protocol.tau1);
    const DensityMatrix env = environment_state(config.model.env, config.model.e, config.model.seed ^ kEnvSeedSalt);
    std::string out = "d,m,m_prime,j,j_prime,kind,re,im\n";
    for (const auto& e : pattern.entries) {
        const Complex f = second_step_factor(w, env, 0, e.m_prime, e.j, e.j_prime);
        out += std::to_string(d) + ",0," + std::to_string(e.m_prime) + "," + std::to_string(e.j) + "," +
               std::to_string(e.j_prime) + "," + std::string(to_string(e.kind)) + "," + format_number(f.real()) + "," +
               format_number(f.imag()) + "\n";
    }
    out += "# full_restore=" + std::to_string(pattern.count(PurificationKind::full_restore)) +
           " one_step=" + std::to_string(pattern.count(PurificationKind::one_step)) +
           " unprotected=" + std::to_string(pattern.count(PurificationKind::unprotected)) + "\n";
    return out;
}

double OracleReport::worst() const {
    double w = 0.0;
    for (const auto& l : lines) w = std::max(w, std::isnan(l.max_deviation) ? INFINITY : l.max_deviation);
    return w;
}

std::string OracleReport::text() const {
    std::string out;
    for (const auto& l : lines) out += l.label + " max_abs_deviation=" + format_number(l.max_deviation) + "\n";
    out += std::string(passed() ? "PASS" : "FAIL") + " threshold=" + format_number(threshold) + "\n";
    return out;
}

OracleReport cmd_oracle(const ScenarioConfig& config) {
    config.validate();
    const auto& m = config.model;
    OracleReport report;
    if (m.kind == ModelKind::boson) {
        report.threshold = 1e-6;
        const BosonRegisterSpec spec = boson_spec(m);
        const BosonRegister reg = boson_register_model(spec);
        const auto w = conditional_evolutions(reg.model, config.oracle.tau);
        const Complex fock = first_step_factor(w, reg.thermal, 0, 0, 1);
        const double analytic = std::exp(ln_c_modes(config.oracle.tau, spec.modes, m.beta));
        add_line(report, "c_fock_vs_analytic", std::abs(fock - analytic));
        return report;
    }
    const std::size_t d = m.d;
    for (std::size_t i = 0; i < config.oracle.models; ++i) {
        const std::uint64_t seed = m.seed + i;
        const Instance inst = make_instance(m, seed, config.oracle.tau, config.oracle.tau);
        const PureState psi = make_psi(config, d, seed, true);
        const Resource resource = config.protocol.resource;
        const ProtocolResult res = run_protocol(psi, inst.w1, inst.w2, inst.env, resource);
        add_line(report, "probability_vs_uniform", res.max_probability_deviation);

        for (const auto& b : res.first_step) {
            const auto c = b.logical_c();
            if (!c) continue;
            const Coherences co = extract_coherences(c->matrix(), psi);
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < d; ++k) {
                    if (!co.is_defined(j, k)) continue;
                    Complex f = first_step_factor(inst.w1, inst.env, b.outcome.m, j, k);
                    if (resource == Resource::psi && j != k) {
                        // Ψ-first branches carry the conjugate of the Φ-first coherence.
                        const Complex c01 = psi_resource_factors(inst.w1, inst.env).c;
                        f = b.outcome.m == 0 ? c01 : std::conj(c01);
                        if (j > k) f = std::conj(f);
                    }
                    add_line(report, "first_step", std::abs(co.at(j, k) - f));
                }
        }

        double f2_formula = 0.0;
        const FactorSet psi_set = resource == Resource::psi ? psi_resource_factors(inst.w1, inst.env) : FactorSet{};
        for (const auto& o : res.outcomes) {
            if (!o.coherence) continue;
            ComplexMatrix factors = ComplexMatrix::Ones(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < d; ++k) {
                    if (j == k) continue;
                    Complex f;
                    if (resource == Resource::psi) {
                        static constexpr Complex FactorSet::*by_class[2][2] = {{&FactorSet::cp_phi, &FactorSet::cp_psi},
                                                                               {&FactorSet::c_phi, &FactorSet::c_psi}};
                        f = psi_set.*by_class[o.first.m][o.second.m];
                        if (j > k) f = std::conj(f);
                    } else {
                        f = second_step_factor(inst.w1, inst.w2, inst.env, o.first.m, o.second.m, j, k);
                    }
                    factors(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = f;
                    if (o.coherence->is_defined(j, k))
                        add_line(report, "second_step m=" + std::to_string(o.first.m) + " m'=" + std::to_string(o.second.m),
                                 std::abs(o.coherence->at(j, k) - f));
                }
            f2_formula += o.probability * fidelity_from_coherences(psi, factors);
        }
        add_line(report, "F2_formula_vs_simulation", std::abs(f2_formula - res.f2));
        if (d == 2) {
            const double ab2 = std::norm(psi[0]) * std::norm(psi[1]);
            const FactorSet set = resource == Resource::psi ? psi_set : qubit_factors(inst.w1, inst.env);
            add_line(report, "F2_qubit_closed_form", std::abs(fidelity_f2(ab2, set) - res.f2));
            if (m.kind == ModelKind::commuting && resource == Resource::phi_plus)
                add_line(report, "C_Psi_minus_one", std::abs(set.c_psi - 1.0));
            if (m.kind == ModelKind::swap_commuting && resource == Resource::psi)
                add_line(report, "C_Phi_minus_one", std::abs(set.c_phi - 1.0));
        }
    }
    return report;
}

std::string cmd_mismatch(const ScenarioConfig& config) {
    config.validate();
    const auto& m = config.model;
    if (m.d != 2) throw ValidationError("mismatch: d must be 2");
    const DephasingModel model = make_model(m, m.seed);
    const DensityMatrix env = m.kind == ModelKind::boson ? boson_register_model(boson_spec(m)).thermal
                                                         : environment_state(m.env, m.e, m.seed ^ kEnvSeedSalt);
    std::vector<double> deltas{0.0};
    const double lo = std::log(config.mismatch.delta_min);
    const double hi = std::log(config.mismatch.delta_max);
    for (double x : linspace(lo, hi, config.mismatch.points)) deltas.push_back(std::exp(x));
    const auto reports = mismatch_scan(model, env, config.mismatch.tau, deltas);

    std::string out = "delta_tau,one_minus_mod2,predicted\n";
    std::vector<double> xs, ys;
    double num = 0.0, den = 0.0;
    for (const auto& r : reports) {
        const double y = 1.0 - r.factor_modulus_sq;
        out += format_number(r.delta_tau) + "," + format_number(y) + "," + format_number(1.0 - r.predicted_modulus_sq) + "\n";
        if (r.delta_tau > 0.0) {
            xs.push_back(r.delta_tau);
            ys.push_back(y);
            num += y * r.delta_tau * r.delta_tau;
            den += std::pow(r.delta_tau, 4);
        }
    }
    out += "# slope=" + format_number(loglog_slope(xs, ys)) + "\n";
    out += "# coefficient=" + format_number(num / den) + "\n";
    out += "# variance=" + format_number(reports.front().variance) + "\n";
    return out;
}

ProtocolReport cmd_protocol(const ScenarioConfig& config) {
    const Scenario sc = build_scenario(config);
    const std::size_t d = sc.w1.d();
    const ProtocolResult res = run_protocol(sc.psi, sc.w1, sc.w2, sc.env, config.protocol.resource);

    ProtocolReport report;
    report.csv = "first_n,first_m,second_n,second_m,probability,fidelity,min_coherence_modulus\n";
    std::ostringstream table;
    table << "first   second  probability     fidelity        |C|min\n";
    for (const auto& o : res.outcomes) {
        double fid = std::nan("");
        double cmin = std::nan("");
        if (o.final_state) {
            fid = fidelity_pure(sc.psi, *o.final_state);
            cmin = INFINITY;
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < d; ++k)
                    if (j != k && o.coherence->is_defined(j, k)) cmin = std::min(cmin, std::abs(o.coherence->at(j, k)));
            if (std::isinf(cmin)) cmin = std::nan("");
        }
        report.csv += std::to_string(o.first.n) + "," + std::to_string(o.first.m) + "," + std::to_string(o.second.n) + "," +
                      std::to_string(o.second.m) + "," + format_number(o.probability) + "," + format_number(fid) + "," +
                      format_number(cmin) + "\n";
        char line[160];
        std::snprintf(line, sizeof(line), "%-7s %-7s %-15s %-15s %s\n", bell_name(d, o.first).c_str(),
                      bell_name(d, o.second).c_str(), format_number(o.probability).c_str(), format_number(fid).c_str(),
                      format_number(cmin).c_str());
        table << line;
    }
    for (std::size_t i = 0; i < res.first_step.size(); ++i)
        table << "F1[" << bell_name(d, res.first_step[i].outcome) << "] = " << format_number(res.f1[i]) << "\n";
    table << "F2 = " << format_number(res.f2) << "\n";
    table << "max |p - 1/d^2| = " << format_number(res.max_probability_deviation)
          << (res.probabilities_uniform() ? "" : "  (NOT UNIFORM)") << "\n";
    report.csv += "# F2=" + format_number(res.f2) + "\n";

    if (config.protocol.samples > 0) {
        Rng rng(config.model.seed);
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
        for (std::size_t s = 0; s < config.protocol.samples; ++s) {
            double u = rng.uniform();
            std::size_t pick = res.outcomes.size() - 1;
            for (std::size_t i = 0; i < res.outcomes.size(); ++i) {
                u -= res.outcomes[i].probability;
                if (u < 0.0) {
                    pick = i;
                    break;
                }
            }
            ++counts[{res.outcomes[pick].first.m, res.outcomes[pick].second.m}];
        }
        table << "sampled " << config.protocol.samples << " runs, by (first m, second m):\n";
        for (const auto& [key, n] : counts)
            table << "  m=" << key.first << " m'=" << key.second << ": "
                  << format_number(static_cast<double>(n) / static_cast<double>(config.protocol.samples)) << "\n";
    }
    report.table = table.str();
    return report;
}

}  // namespace purtel
