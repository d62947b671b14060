#include "onspin/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "onspin/errors.hpp"
#include "onspin/exact_oracle.hpp"
#include "onspin/special_functions.hpp"
#include "onspin/stein_diagnostics.hpp"

namespace onspin::cli {

namespace {

using nlohmann::json;

std::string command_name(Command c) {
    switch (c) {
        case Command::simulate: return "simulate";
        case Command::rate: return "rate";
        case Command::stein_terms: return "stein-terms";
        case Command::oracle: return "oracle";
        case Command::verify_lemmas: return "verify-lemmas";
    }
    return "?";
}

std::string timestamp_line() {
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return std::string("# timestamp: ") + buf;
}

// A table with a comment header; rows are written with %.17g so reruns with
// the same seed are byte-identical.
class TableWriter {
  public:
    TableWriter(const ExperimentConfig& config, std::vector<std::string> columns)
        : config_(config), columns_(std::move(columns)) {}

    void set_constants(const std::string& constants) { constants_ = constants; }

    void add_row(const std::vector<double>& row) {
        if (row.size() != columns_.size())
            throw std::logic_error("TableWriter: column count mismatch");
        for (double v : row)
            if (!std::isfinite(v))
                throw numerical_error("output contains a non-finite cell");
        rows_.push_back(row);
    }

    void write(const std::filesystem::path& path) const {
        if (config_.format == OutputFormat::json)
            write_json(path);
        else
            write_csv(path);
    }

  private:
    void write_header(std::ofstream& out) const {
        out << "# " << kVersion << "\n";
        out << "# command: " << command_name(config_.command) << "\n";
        out << "# config: " << config_to_json(config_) << "\n";
        if (!constants_.empty()) out << "# constants: " << constants_ << "\n";
        out << "# rng: " << rng::kAlgorithmName << " master_seed=" << config_.master_seed
            << " chain streams (master_seed, chain_id) for chain_id in [0," << config_.chains
            << ")\n";
        out << timestamp_line() << "\n";
    }

    void write_csv(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw config_error("cannot write " + path.string());
        write_header(out);
        for (std::size_t i = 0; i < columns_.size(); ++i)
            out << columns_[i] << (i + 1 < columns_.size() ? "," : "\n");
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << format_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
        }
    }

    void write_json(const std::filesystem::path& path) const {
        json doc;
        doc["meta"]["version"] = kVersion;
        doc["meta"]["command"] = command_name(config_.command);
        doc["meta"]["config"] = json::parse(config_to_json(config_));
        doc["meta"]["constants"] = constants_;
        doc["meta"]["rng"] = rng::kAlgorithmName;
        doc["timestamp"] = timestamp_line().substr(13);
        doc["columns"] = columns_;
        auto& rows = doc["rows"] = json::array();
        for (const auto& row : rows_) {
            json r = json::array();
            for (double v : row) r.push_back(json::parse(format_double(v)));
            rows.push_back(r);
        }
        std::ofstream out(path);
        if (!out) throw config_error("cannot write " + path.string());
        out << doc.dump(1) << "\n";
    }

    const ExperimentConfig& config_;
    std::vector<std::string> columns_;
    std::string constants_;
    std::vector<std::vector<double>> rows_;
};

std::string extension(const ExperimentConfig& config) {
    return config.format == OutputFormat::json ? ".json" : ".csv";
}

std::string constants_string(const model::ModelParams& params,
                             const model::DerivedConstants& derived) {
    std::ostringstream os;
    os << "N=" << params.N << " beta=" << format_double(params.beta)
       << " b=" << format_double(derived.b) << " B2=" << format_double(derived.B2)
       << " lambda=" << format_double(derived.lambda)
       << " delta_cap=" << format_double(derived.delta_cap);
    if (derived.near_critical)
        os << " WARNING=near-critical-beta(rate-experiments-unreliable)";
    return os.str();
}

struct RunData {
    std::vector<sim::ChainRecord> records;
    model::ModelParams params;
    model::DerivedConstants derived;
};

RunData run_chains_for(const ExperimentConfig& config, std::int64_t n) {
    RunData data;
    data.params = {config.N_values.front(), config.beta, n};
    data.derived = model::DerivedConstants::solve(data.params);

    sim::ChainOptions options;
    std::int64_t per_chain = (config.records + config.chains - 1) / config.chains;
    options.sweeps = per_chain * config.thin;
    options.burn_in = config.burn_in;
    options.thin = config.thin;
    options.init = config.init;
    data.records = sim::run_chains(data.params, data.derived, options, config.master_seed,
                                   config.chains, config.threads);
    return data;
}

void cmd_verify_lemmas(const ExperimentConfig& config) {
    TableWriter table(config, {"N", "check", "min_slack", "argmin_x", "pass"});
    auto grid = sf::log_grid(1e-6, 200.0, config.grid_points);
    bool all_pass = true;
    for (int N : config.N_values) {
        auto report = sf::verify_lemma_bounds(N, grid);
        all_pass = all_pass && report.pass;
        for (std::size_t c = 0; c < report.checks.size(); ++c) {
            const auto& check = report.checks[c];
            table.add_row({double(N), double(c), check.min_slack, check.argmin_x,
                           check.pass ? 1.0 : 0.0});
            std::cout << "N=" << N << " " << check.name << ": min slack "
                      << format_double(check.min_slack) << " at x=" << format_double(check.argmin_x)
                      << (check.pass ? " PASS" : " FAIL") << "\n";
        }
    }
    table.write(std::filesystem::path(config.output_dir) / ("lemma_report" + extension(config)));
    if (!all_pass) throw numerical_error("verify-lemmas: at least one inequality failed");
}

void cmd_simulate(const ExperimentConfig& config) {
    TableWriter summary(config, {"n", "records", "mean_W", "var_W", "d_k_empirical",
                                 "d_w_empirical", "mean_scaled_abs_S", "n_var_scaled_abs_S", "b",
                                 "B2", "lambda", "seed"});
    for (std::int64_t n : config.n_values) {
        RunData data = run_chains_for(config, n);
        summary.set_constants(constants_string(data.params, data.derived));

        TableWriter records_table(config, {"chain_id", "sweep", "abs_S", "W", "W_prime", "delta",
                                           "cond_mean", "cond_second"});
        records_table.set_constants(constants_string(data.params, data.derived));
        std::vector<double> w_over_B;
        double mean_w = 0.0, mean_w2 = 0.0, mean_m = 0.0, mean_m2 = 0.0;
        for (const auto& r : data.records) {
            records_table.add_row({double(r.chain_id), double(r.sweep), r.abs_S, r.w,
                                   r.pair.w_prime, r.pair.delta, r.pair.cond_mean,
                                   r.pair.cond_second});
            w_over_B.push_back(r.w / std::sqrt(data.derived.B2));
            mean_w += r.w;
            mean_w2 += r.w * r.w;
            double scaled = config.beta * r.abs_S / double(n);
            mean_m += scaled;
            mean_m2 += (scaled - data.derived.b) * (scaled - data.derived.b);
        }
        double m = double(data.records.size());
        mean_w /= m;
        mean_w2 /= m;
        mean_m /= m;
        mean_m2 /= m;
        records_table.write(std::filesystem::path(config.output_dir) /
                            ("records_n" + std::to_string(n) + extension(config)));

        summary.add_row({double(n), m, mean_w, mean_w2 - mean_w * mean_w,
                         stein::empirical_kolmogorov(w_over_B),
                         stein::empirical_wasserstein(w_over_B), mean_m, double(n) * mean_m2,
                         data.derived.b, data.derived.B2, data.derived.lambda,
                         double(config.master_seed)});
    }
    summary.write(std::filesystem::path(config.output_dir) / ("summary" + extension(config)));
}

void cmd_stein_terms(const ExperimentConfig& config) {
    TableWriter table(config, {"n", "samples_used", "ratio_term", "third_moment_term",
                               "remainder_term", "wasserstein_bound", "kolmogorov_bound",
                               "ratio_term_w_binned", "b", "B2", "lambda", "seed"});
    for (std::int64_t n : config.n_values) {
        RunData data = run_chains_for(config, n);
        table.set_constants(constants_string(data.params, data.derived));
        auto terms = stein::stein_terms(data.records, data.params, data.derived);
        double binned = stein::ratio_term_w_binned(data.records, data.derived);
        table.add_row({double(n), double(terms.samples_used), terms.ratio_term,
                       terms.third_moment_term, terms.remainder_term, terms.wasserstein_bound,
                       terms.kolmogorov_bound, binned, data.derived.b, data.derived.B2,
                       data.derived.lambda, double(config.master_seed)});
        std::cout << "n=" << n << ": wasserstein_bound=" << format_double(terms.wasserstein_bound)
                  << " kolmogorov_bound=" << format_double(terms.kolmogorov_bound) << "\n";
    }
    table.write(std::filesystem::path(config.output_dir) / ("stein_terms" + extension(config)));
}

void cmd_oracle(const ExperimentConfig& config) {
    TableWriter summary(config, {"n", "d_k_oracle", "b", "B2", "lambda"});
    int N = config.N_values.front();
    for (std::int64_t n : config.n_values) {
        model::ModelParams params{N, config.beta, n};
        auto derived = model::DerivedConstants::solve(params);
        summary.set_constants(constants_string(params, derived));

        auto law = oracle::gibbs_radial_law(n, N, config.beta, derived);
        TableWriter law_table(config, {"r", "density", "cdf"});
        law_table.set_constants(constants_string(params, derived));
        for (std::size_t i = 0; i < law.grid.size(); ++i)
            law_table.add_row({law.grid[i], law.density[i], law.cdf[i]});
        law_table.write(std::filesystem::path(config.output_dir) /
                        ("radial_law_n" + std::to_string(n) + extension(config)));

        double dk = oracle::exact_kolmogorov_to_normal(n, N, config.beta, derived);
        summary.add_row({double(n), dk, derived.b, derived.B2, derived.lambda});
        std::cout << "n=" << n << ": d_K(oracle)=" << format_double(dk) << "\n";
    }
    summary.write(std::filesystem::path(config.output_dir) /
                  ("oracle_summary" + extension(config)));
}

void cmd_rate(const ExperimentConfig& config) {
    std::vector<std::string> columns = {"n", "d_k_empirical", "d_w_empirical"};
    if (config.with_oracle) columns.push_back("d_k_oracle");
    for (const char* c : {"ratio_term", "third_moment_term", "remainder_term",
                          "wasserstein_bound", "kolmogorov_bound", "b", "B2", "lambda", "seed"})
        columns.push_back(c);
    TableWriter table(config, columns);

    std::vector<stein::RatePoint> fit_points;
    for (std::int64_t n : config.n_values) {
        RunData data = run_chains_for(config, n);
        table.set_constants(constants_string(data.params, data.derived));
        std::vector<double> w_over_B;
        w_over_B.reserve(data.records.size());
        for (const auto& r : data.records) w_over_B.push_back(r.w / std::sqrt(data.derived.B2));
        double dk_emp = stein::empirical_kolmogorov(w_over_B);
        double dw_emp = stein::empirical_wasserstein(w_over_B);
        auto terms = stein::stein_terms(data.records, data.params, data.derived);

        std::vector<double> row = {double(n), dk_emp, dw_emp};
        if (config.with_oracle) {
            double dk_oracle = oracle::exact_kolmogorov_to_normal(n, data.params.N, config.beta,
                                                                  data.derived);
            row.push_back(dk_oracle);
            fit_points.push_back({n, dk_oracle});
        } else {
            fit_points.push_back({n, dk_emp});
        }
        for (double v : {terms.ratio_term, terms.third_moment_term, terms.remainder_term,
                         terms.wasserstein_bound, terms.kolmogorov_bound, data.derived.b,
                         data.derived.B2, data.derived.lambda, double(config.master_seed)})
            row.push_back(v);
        table.add_row(row);
    }
    table.write(std::filesystem::path(config.output_dir) / ("rate" + extension(config)));

    auto fit = stein::rate_fit(fit_points);
    TableWriter fit_table(config, {"slope", "intercept", "max_residual", "points_used",
                                   "points_dropped"});
    fit_table.add_row({fit.slope, fit.intercept, fit.max_residual, double(fit.points_used),
                       double(fit.points_dropped)});
    fit_table.write(std::filesystem::path(config.output_dir) / ("rate_fit" + extension(config)));
    std::cout << "rate fit (" << (config.with_oracle ? "oracle" : "empirical")
              << " d_K): slope=" << format_double(fit.slope)
              << " intercept=" << format_double(fit.intercept) << "\n";
}

}  // namespace

void ExperimentConfig::validate() const {
    if (N_values.empty()) throw config_error("config: need at least one N");
    for (int N : N_values)
        if (N < 2) throw config_error("config: N must be >= 2");
    if (command != Command::verify_lemmas) {
        if (N_values.size() != 1)
            throw config_error("config: exactly one N for this command");
        if (!(beta > N_values.front()))
            throw config_error("config: beta must exceed N (supercritical), got beta=" +
                               std::to_string(beta));
        if (n_values.empty()) throw config_error("config: need at least one n");
        std::vector<std::int64_t> sorted = n_values;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw config_error("config: n values must be distinct");
        for (auto n : n_values)
            if (n < 2) throw config_error("config: n must be >= 2");
    }
    if (records < 1) throw config_error("config: records must be >= 1");
    if (burn_in < 0) throw config_error("config: burn_in must be >= 0");
    if (thin < 1) throw config_error("config: thin must be >= 1");
    if (chains < 1) throw config_error("config: chains must be >= 1");
    if (threads < 1) throw config_error("config: threads must be >= 1");
    if (grid_points < 2) throw config_error("config: grid_points must be >= 2");
}

std::string config_to_json(const ExperimentConfig& config) {
    json j;
    j["command"] = command_name(config.command);
    j["N"] = config.N_values;
    j["beta"] = config.beta;
    j["n"] = config.n_values;
    j["records"] = config.records;
    j["burn_in"] = config.burn_in;
    j["thin"] = config.thin;
    j["chains"] = config.chains;
    j["threads"] = config.threads;
    j["master_seed"] = config.master_seed;
    j["init"] = config.init == sim::InitKind::ordered ? "ordered" : "uniform";
    j["output_dir"] = config.output_dir;
    j["format"] = config.format == OutputFormat::json ? "json" : "csv";
    j["grid_points"] = config.grid_points;
    j["oracle"] = config.with_oracle;
    return j.dump();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int run(const ExperimentConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);
    switch (config.command) {
        case Command::verify_lemmas: cmd_verify_lemmas(config); break;
        case Command::simulate: cmd_simulate(config); break;
        case Command::stein_terms: cmd_stein_terms(config); break;
        case Command::oracle: cmd_oracle(config); break;
        case Command::rate: cmd_rate(config); break;
    }
    return 0;
}

}  // namespace onspin::cli
