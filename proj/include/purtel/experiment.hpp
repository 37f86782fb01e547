// experiment.hpp: scenario configuration and the command implementations behind the CLI

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "purtel/env_models.hpp"
#include "purtel/protocol.hpp"
#include "purtel/spinboson.hpp"

namespace purtel {

enum class ModelKind { random, commuting, swap_commuting, boson, noiseless };

struct ModelConfig {
    ModelKind kind = ModelKind::commuting;
    std::size_t d = 2;
    std::size_t e = 4;
    std::uint64_t seed = 42;
    EnvStateFamily env = EnvStateFamily::thermal;
    // boson register (single mode)
    double omega = 1.0;
    double g = 0.5;
    double t_bar = 0.0;
    std::size_t n_max = 30;
    double beta = 10.0;
    bool interaction_frame = true;
};

struct ProtocolConfig {
    std::vector<double> psi_re;  ///< empty means the uniform superposition
    std::vector<double> psi_im;
    double tau1 = 1.0;
    double tau2 = 1.0;
    Resource resource = Resource::phi_plus;
    std::size_t samples = 0;  ///< > 0 adds a seeded sampling demonstration
};

struct GridConfig {
    double tau_min = 0.0;
    double tau_max = 20.0;
    std::size_t points = 400;
};

struct OracleConfig {
    std::size_t models = 10;
    double tau = 0.8;
};

struct MismatchConfig {
    double tau = 1.0;
    double delta_min = 1e-3;
    double delta_max = 1e-2;
    std::size_t points = 10;
};

struct ScenarioConfig {
    ModelConfig model;
    ProtocolConfig protocol;
    SpinBosonParams spinboson;
    double alpha_beta_sq = 0.25;
    GridConfig grid;
    OracleConfig oracle;
    MismatchConfig mismatch;
    std::size_t atlas_d = 2;
    std::string out;

    /// Range checks on every field; throws ValidationError.
    void validate() const;
};

/// INI text with sections [model], [protocol], [spinboson], [grid], [oracle],
/// [mismatch], [atlas], [output]. Unknown sections or keys are rejected.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::string& path);
/// Every field, in a form parse_config reads back to the same values.
void write_config(std::ostream& out, const ScenarioConfig& config);

/// %.12g in the C locale.
std::string format_number(double x);

std::string cmd_fig2(const ScenarioConfig& config);
std::string cmd_atlas(const ScenarioConfig& config);

struct OracleLine {
    std::string label;
    double max_deviation = 0.0;
};

struct OracleReport {
    std::vector<OracleLine> lines;
    double threshold = 1e-9;

    double worst() const;
    bool passed() const { return worst() <= threshold; }
    std::string text() const;
};

OracleReport cmd_oracle(const ScenarioConfig& config);
std::string cmd_mismatch(const ScenarioConfig& config);

struct ProtocolReport {
    std::string table;   ///< human-readable summary
    std::string csv;     ///< one row per outcome pair
};

ProtocolReport cmd_protocol(const ScenarioConfig& config);

/// Builds the configured model, environment state and input state.
struct Scenario {
    ConditionalEvolutions w1;
    ConditionalEvolutions w2;
    DensityMatrix env;
    PureState psi;
};

Scenario build_scenario(const ScenarioConfig& config);

}  // namespace purtel
