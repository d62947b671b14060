// Reproducible experiment orchestration: configuration, seeding, parallel
// chains, output artifacts.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "onspin/gibbs_dynamics.hpp"

namespace onspin::cli {

inline constexpr const char* kVersion = "onspin 0.1.0";

enum class Command { simulate, rate, stein_terms, oracle, verify_lemmas };
enum class OutputFormat { csv, json };

struct ExperimentConfig {
    Command command = Command::simulate;
    std::vector<int> N_values = {3};   // verify-lemmas may take several
    double beta = 5.0;
    std::vector<std::int64_t> n_values = {100};
    std::int64_t records = 20000;      // thinned records per n (simulate/stein/rate)
    std::int64_t burn_in = 200;
    std::int64_t thin = 5;
    int chains = 2;
    int threads = 2;
    std::uint64_t master_seed = 1;
    sim::InitKind init = sim::InitKind::ordered;
    std::string output_dir = "out";
    OutputFormat format = OutputFormat::csv;
    std::size_t grid_points = 100000;  // verify-lemmas grid size
    bool with_oracle = true;           // rate: include exact-oracle distances

    // Throws config_error with a precise message on the first violation.
    void validate() const;
};

// Executes the configured command, writing artifacts under output_dir.
// Every output embeds the config echo, derived constants, the RNG algorithm
// name, per-chain seed addresses, and an isolated timestamp comment line.
// Returns 0 on success; errors are reported by exception (config_error,
// numerical_error).
int run(const ExperimentConfig& config);

// Shared helpers (also used by tests).
std::string config_to_json(const ExperimentConfig& config);
std::string format_double(double v);

}  // namespace onspin::cli
