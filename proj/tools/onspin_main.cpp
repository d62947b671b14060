// Command-line front end: subcommands map onto the experiment runner.
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "onspin/errors.hpp"
#include "onspin/experiment.hpp"

namespace {

using onspin::cli::Command;
using onspin::cli::ExperimentConfig;
using onspin::cli::OutputFormat;

// "3" or "2..10" -> list of N values.
std::vector<int> parse_n_range(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos) return {std::stoi(text)};
    int lo = std::stoi(text.substr(0, dots));
    int hi = std::stoi(text.substr(dots + 2));
    std::vector<int> out;
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
}

std::vector<std::int64_t> parse_n_list(const std::string& text) {
    std::vector<std::int64_t> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        out.push_back(std::stoll(text.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

void load_config_file(const std::string& path, ExperimentConfig& config) {
    std::ifstream in(path);
    if (!in) throw onspin::config_error("cannot read config file " + path);
    nlohmann::json j;
    in >> j;
    if (j.contains("beta")) config.beta = j["beta"].get<double>();
    if (j.contains("N")) config.N_values = j["N"].get<std::vector<int>>();
    if (j.contains("n")) config.n_values = j["n"].get<std::vector<std::int64_t>>();
    if (j.contains("records")) config.records = j["records"].get<std::int64_t>();
    if (j.contains("burn_in")) config.burn_in = j["burn_in"].get<std::int64_t>();
    if (j.contains("thin")) config.thin = j["thin"].get<std::int64_t>();
    if (j.contains("chains")) config.chains = j["chains"].get<int>();
    if (j.contains("threads")) config.threads = j["threads"].get<int>();
    if (j.contains("master_seed")) config.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("init"))
        config.init = j["init"].get<std::string>() == "uniform" ? onspin::sim::InitKind::uniform
                                                                : onspin::sim::InitKind::ordered;
    if (j.contains("output_dir")) config.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("format"))
        config.format = j["format"].get<std::string>() == "json" ? OutputFormat::json
                                                                 : OutputFormat::csv;
    if (j.contains("grid_points")) config.grid_points = j["grid_points"].get<std::size_t>();
    if (j.contains("oracle")) config.with_oracle = j["oracle"].get<bool>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"onspin: mean-field O(N) spin model simulator and normal-approximation "
                 "diagnostics"};
    app.require_subcommand(1);

    ExperimentConfig config;
    if (const char* env = std::getenv("ONSPIN_OUTPUT_DIR")) config.output_dir = env;

    std::string config_file, n_spec, n_list, init_name = "ordered", format_name = "csv";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_file, "JSON config file (flags override it)");
        sub->add_option("--N", n_spec, "spin dimension (verify-lemmas accepts a range, e.g. 2..10)");
        sub->add_option("--beta", config.beta, "inverse temperature (must exceed N)");
        sub->add_option("--n", n_list, "comma-separated system sizes, e.g. 16,32,64");
        sub->add_option("--records", config.records, "thinned records per n");
        sub->add_option("--burn-in", config.burn_in, "burn-in sweeps");
        sub->add_option("--thin", config.thin, "sweeps between records");
        sub->add_option("--chains", config.chains, "parallel chains");
        sub->add_option("--threads", config.threads, "worker threads");
        sub->add_option("--seed", config.master_seed, "master seed");
        sub->add_option("--init", init_name, "initial configuration: ordered|uniform");
        sub->add_option("--out", config.output_dir, "output directory");
        sub->add_option("--format", format_name, "output format: csv|json");
        sub->add_option("--grid-points", config.grid_points, "verify-lemmas grid size");
    };

    auto* simulate = app.add_subcommand("simulate", "run chains, emit records and summary");
    auto* rate = app.add_subcommand("rate", "distances across n plus log-log rate fit");
    rate->add_flag("--oracle,!--no-oracle", config.with_oracle,
                   "include exact-oracle distances (default on)");
    auto* stein = app.add_subcommand("stein-terms", "exchangeable-pair bound terms per n");
    auto* oracle_cmd = app.add_subcommand("oracle", "exact radial laws and d_K per n");
    auto* verify = app.add_subcommand("verify-lemmas", "check the ratio inequalities on a grid");
    for (auto* sub : {simulate, rate, stein, oracle_cmd, verify}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_file.empty()) load_config_file(config_file, config);
        if (simulate->parsed()) config.command = Command::simulate;
        if (rate->parsed()) config.command = Command::rate;
        if (stein->parsed()) config.command = Command::stein_terms;
        if (oracle_cmd->parsed()) config.command = Command::oracle;
        if (verify->parsed()) config.command = Command::verify_lemmas;
        if (!n_spec.empty()) config.N_values = parse_n_range(n_spec);
        if (!n_list.empty()) config.n_values = parse_n_list(n_list);
        config.init = (init_name == "uniform") ? onspin::sim::InitKind::uniform
                                               : onspin::sim::InitKind::ordered;
        config.format = (format_name == "json") ? OutputFormat::json : OutputFormat::csv;

        return onspin::cli::run(config);
    } catch (const onspin::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const onspin::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
