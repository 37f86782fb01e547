// purtel: command-line front end for the purifying teleportation simulator

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "purtel/errors.hpp"
#include "purtel/experiment.hpp"

namespace {

struct Common {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    std::string dump_config;
};

std::string default_output(const std::string& command) {
    const char* dir = std::getenv("PURTEL_OUT_DIR");
    const std::filesystem::path base = dir && *dir ? std::filesystem::path(dir) : std::filesystem::path(".");
    return (base / (command + ".csv")).string();
}

void write_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw purtel::ValidationError("cannot write " + path);
    out << text;
    if (!out) throw purtel::ValidationError("failed writing " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact simulator for two-step purifying teleportation under pure dephasing"};
    app.require_subcommand(1);

    Common common;
    app.add_option("--config", common.config_path, "INI scenario file")->check(CLI::ExistingFile);
    app.add_option("--out", common.out, "output CSV path (default $PURTEL_OUT_DIR/<command>.csv)");
    app.add_option("--seed", common.seed, "model seed override");
    app.add_flag("--quiet", common.quiet, "suppress the summary on standard output");
    app.add_option("--dump-config", common.dump_config, "write the effective configuration to this path");

    auto* fig2 = app.add_subcommand("fig2", "fidelity curves of the spin-boson register");
    auto* atlas = app.add_subcommand("atlas", "qudit purification pattern with factor values");
    std::optional<std::size_t> atlas_d;
    atlas->add_option("-d,--dim", atlas_d, "qudit dimension");
    auto* oracle = app.add_subcommand("oracle", "simulation against closed-form factors");
    auto* mismatch = app.add_subcommand("mismatch", "decay of the purified factor under a step-time mismatch");
    auto* protocol = app.add_subcommand("protocol", "full branch table of one scenario");
    for (auto* sub : {fig2, atlas, oracle, mismatch, protocol}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        purtel::ScenarioConfig config = common.config_path.empty() ? purtel::ScenarioConfig{}
                                                                   : purtel::load_config(common.config_path);
        if (common.seed) config.model.seed = *common.seed;
        if (!common.out.empty()) config.out = common.out;
        if (atlas_d) config.atlas_d = *atlas_d;
        config.validate();
        if (!common.dump_config.empty()) {
            std::ofstream out(common.dump_config, std::ios::binary);
            purtel::write_config(out, config);
        }

        const std::string name = app.get_subcommands().front()->get_name();
        auto emit = [&](const std::string& csv) {
            const std::string path = config.out.empty() ? default_output(name) : config.out;
            write_file(path, csv);
            if (!common.quiet) std::cout << "wrote " << path << "\n";
        };

        if (name == "fig2") {
            emit(purtel::cmd_fig2(config));
        } else if (name == "atlas") {
            emit(purtel::cmd_atlas(config));
        } else if (name == "mismatch") {
            const std::string csv = purtel::cmd_mismatch(config);
            emit(csv);
            if (!common.quiet) std::cout << csv.substr(csv.find("# slope"));
        } else if (name == "oracle") {
            const purtel::OracleReport report = purtel::cmd_oracle(config);
            if (!common.quiet || !report.passed()) std::cout << report.text();
            return report.passed() ? 0 : 2;
        } else if (name == "protocol") {
            const purtel::ProtocolReport report = purtel::cmd_protocol(config);
            if (!common.quiet) std::cout << report.table;
            if (!config.out.empty()) emit(report.csv);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
