#include "sparre/cli_commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using sparre::cli::ExperimentConfig;

int main(int argc, char** argv) {
    CLI::App app{"sparre: persistence probabilities of integrated birth-death chains --\n"
                 "exact small-n enumeration oracles and reproducible Monte-Carlo scaling runs"};
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::string format;
    std::uint64_t seed = 0;
    int threads = -1;
    bool dump_config = false;
    bool have_seed = false;

    app.add_option("--config", config_path, "JSON config file (defaults apply per field)");
    app.add_option("--seed", seed, "master seed (overrides config)")
        ->each([&](const std::string&) { have_seed = true; });
    app.add_option("--threads", threads, "OpenMP thread cap (results do not depend on it)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "estimate row format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--dump-config", dump_config, "print the effective config as JSON and exit");

    auto* verify = app.add_subcommand("verify", "run every exact identity suite");
    auto* enumerate = app.add_subcommand("enumerate", "exact enumeration for one weight vector");
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo estimates at one horizon");
    auto* scaling = app.add_subcommand("scaling", "estimates over a horizon grid + envelopes + fits");
    auto* constants = app.add_subcommand("constants", "stable constants: closed form vs Monte Carlo");
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig cfg =
            config_path.empty() ? ExperimentConfig{} : ExperimentConfig::from_file(config_path);
        if (have_seed) cfg.seed = seed;
        if (threads >= 0) cfg.threads = threads;
        if (const char* env = std::getenv("SPARRE_OUT_DIR")) cfg.out_dir = env;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!format.empty()) cfg.format = format;

        if (dump_config) {
            std::cout << cfg.to_json_text();
            return 0;
        }
        if (verify->parsed()) return sparre::cli::cmd_verify(cfg, std::cout);
        if (enumerate->parsed()) return sparre::cli::cmd_enumerate(cfg, std::cout);
        if (simulate->parsed()) return sparre::cli::cmd_simulate(cfg, std::cout);
        if (scaling->parsed()) return sparre::cli::cmd_scaling(cfg, std::cout);
        if (constants->parsed()) return sparre::cli::cmd_constants(cfg, std::cout);
        std::cout << app.help();
        return 0;
    } catch (const sparre::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
