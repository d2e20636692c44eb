#pragma once

#include "sparre/chains.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparre::cli {

// Raised on malformed configs; the CLI maps it to exit code 2 and prints the
// offending location.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ChainConfig {
    std::string kind = "srw";  // srw | bessel | table
    double delta = 0.0;
    double laziness = 0.0;
    double eta = 0.05;
    long x_cap = 1 << 16;
    std::string epsilon_kind = "zero";  // zero | power_decay | log_decay | table
    double epsilon_c = 0.0;
    double epsilon_p = 1.0;
    std::vector<double> epsilon_values;
    double p0 = 0.5;                                  // table kind
    std::vector<chains::BirthDeathChain::Row> rows;   // table kind

    chains::BirthDeathChain build() const;
    std::string display_id() const;
};

struct FunctionalConfig {
    std::string kind = "identity";  // identity | sign | power
    double gamma = 1.0;

    chains::OddFunctional build() const;
};

struct VerifyConfig {
    unsigned enumeration_cap = 7;
    unsigned vectors_per_n = 50;
    unsigned w_law_n_max = 6;
    unsigned w_law_vectors_per_n = 10;
    unsigned convolution_n_max = 500;
    unsigned ladder_n_max = 500;
    unsigned g_cross_check_n_max = 2000;
    unsigned srw_dp_step_max = 2000;
};

struct EnumerateConfig {
    std::vector<std::string> magnitudes = {"2", "5"};
    std::string law = "independent_uniform";  // | constrained_signs | dependent_searched
    unsigned cap = 8;
};

struct SimulateConfig {
    ChainConfig chain;
    FunctionalConfig f;
    long horizon = 1024;
    std::uint64_t trials = 1'000'000;
    std::vector<std::string> targets = {"strict"};
    bool sandwich = false;
};

struct ScalingConfig {
    ChainConfig chain;
    FunctionalConfig f;
    std::vector<std::string> targets = {"strict"};
    std::vector<long> horizons = {256, 512, 1024, 2048, 4096, 8192, 16384, 32768};
    std::uint64_t trials = 1'000'000;
    long tail_n_max = 65536;
    bool assert_local_tail = false;
};

struct ConstantsConfig {
    std::vector<double> alphas = {0.2, 0.5, 0.8};
    std::uint64_t draws = 1'000'000;
};

struct ExperimentConfig {
    std::uint64_t seed = 20240601;
    int threads = 0;  // OpenMP cap only; results never depend on it
    std::uint64_t chunk_size = 16384;
    std::string out_dir = "out";
    std::string format = "csv";  // csv | json
    VerifyConfig verify;
    EnumerateConfig enumerate;
    SimulateConfig simulate;
    ScalingConfig scaling;
    ConstantsConfig constants;

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json_text() const;  // full dump, used by --dump-config
};

}  // namespace sparre::cli
