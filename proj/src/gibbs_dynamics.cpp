#include "onspin/gibbs_dynamics.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "onspin/errors.hpp"
#include "onspin/sphere_sampling.hpp"
#include "onspin/stein_diagnostics.hpp"

namespace onspin::sim {

SpinConfiguration make_configuration(const model::ModelParams& params, InitKind init,
                                     rng::RngStream& stream) {
    SpinConfiguration config(params.N, params.n);
    if (init == InitKind::ordered) {
        for (std::int64_t i = 0; i < params.n; ++i) config.spin(i)[0] = 1.0;
    } else {
        for (std::int64_t i = 0; i < params.n; ++i)
            sphere::sample_uniform_sphere(params.N, stream, config.spin(i));
    }
    config.refresh_cache();
    return config;
}

namespace {

// sigma^{(i)} = S - sigma_i written into `rest`; returns |sigma^{(i)}|.
double leave_one_out(const SpinConfiguration& config, std::int64_t i, std::vector<double>& rest) {
    auto row = config.spin(i);
    double norm2 = 0.0;
    for (int d = 0; d < config.N; ++d) {
        rest[d] = config.total_spin[d] - row[d];
        norm2 += rest[d] * rest[d];
    }
    return std::sqrt(norm2);
}

void draw_conditional(const model::ModelParams& params, std::vector<double>& rest, double s,
                      rng::RngStream& stream, std::span<double> out) {
    if (s < 1e-14) {
        sphere::sample_uniform_sphere(params.N, stream, out);
        return;
    }
    double kappa = params.beta * s / double(params.n);
    for (int d = 0; d < params.N; ++d) rest[d] /= s;
    sphere::VmfLaw law(rest, kappa, params.N);
    sphere::sample_vmf(law, stream, out);
    for (int d = 0; d < params.N; ++d) rest[d] *= s;  // restore
}

}  // namespace

void heat_bath_step(SpinConfiguration& config, std::int64_t i, const model::ModelParams& params,
                    rng::RngStream& stream) {
    thread_local std::vector<double> rest, fresh;
    rest.assign(config.N, 0.0);
    fresh.assign(config.N, 0.0);
    double s = leave_one_out(config, i, rest);
    draw_conditional(params, rest, s, stream, fresh);
    config.set_spin(i, fresh);
}

PairSample exchangeable_pair_step(const SpinConfiguration& config,
                                  const model::ModelParams& params,
                                  const model::DerivedConstants& derived,
                                  rng::RngStream& stream, bool with_cond_moments) {
    thread_local std::vector<double> rest, fresh;
    rest.assign(config.N, 0.0);
    fresh.assign(config.N, 0.0);

    PairSample sample;
    sample.index = std::int64_t(stream.uniform_below(std::uint64_t(config.n)));
    double s = leave_one_out(config, sample.index, rest);
    draw_conditional(params, rest, s, stream, fresh);

    // |S'|^2 = |S|^2 + 2 <sigma' - sigma_I, sigma^{(I)}> for unit spins
    auto old_row = config.spin(sample.index);
    double shift = 0.0;
    for (int d = 0; d < config.N; ++d) shift += (fresh[d] - old_row[d]) * rest[d];
    double norm2_prime = config.total_norm2 + 2.0 * shift;

    sample.w = model::w_statistic(config, params, derived);
    sample.w_prime = model::w_statistic_from_norm2(norm2_prime, params, derived);
    sample.delta = sample.w - sample.w_prime;
    if (std::fabs(sample.delta) > derived.delta_cap * (1.0 + 1e-12))
        throw numerical_error("exchangeable_pair_step: |Delta| exceeded 4 beta^2/(b^2 sqrt(n))");

    if (with_cond_moments) {
        auto moments = stein::conditional_moments(config, params, derived);
        sample.cond_mean = moments.mean;
        sample.cond_second = moments.second;
    }
    return sample;
}

void run_chain(const model::ModelParams& params, const model::DerivedConstants& derived,
               const ChainOptions& options, std::int64_t chain_id, rng::RngStream& stream,
               const std::function<void(const ChainRecord&)>& sink) {
    if (options.burn_in < 0) throw config_error("run_chain: burn_in must be >= 0");
    if (options.thin < 1) throw config_error("run_chain: thin must be >= 1");

    SpinConfiguration config = make_configuration(params, options.init, stream);
    std::int64_t total = options.burn_in + options.sweeps;
    for (std::int64_t sweep = 1; sweep <= total; ++sweep) {
        for (std::int64_t i = 0; i < params.n; ++i) heat_bath_step(config, i, params, stream);
        if (sweep <= options.burn_in) continue;
        std::int64_t since = sweep - options.burn_in;
        if (since % options.thin != 0) continue;

        ChainRecord record;
        record.chain_id = chain_id;
        record.sweep = sweep;
        record.abs_S = std::sqrt(config.total_norm2);
        record.w = model::w_statistic(config, params, derived);
        record.pair =
            exchangeable_pair_step(config, params, derived, stream, options.with_cond_moments);
        sink(record);
    }
}

std::vector<ChainRecord> run_chains(const model::ModelParams& params,
                                    const model::DerivedConstants& derived,
                                    const ChainOptions& options, std::uint64_t master_seed,
                                    int chains, int max_threads) {
    std::vector<std::vector<ChainRecord>> per_chain(chains);
    std::int64_t expected = options.sweeps / options.thin;
    for (auto& v : per_chain) v.reserve(std::size_t(std::max<std::int64_t>(expected, 0)));

    int workers = std::max(1, std::min(chains, max_threads));
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto work = [&]() {
        while (true) {
            int id = next.fetch_add(1);
            if (id >= chains) return;
            rng::RngStream stream = rng::seed_stream(master_seed, std::uint64_t(id));
            run_chain(params, derived, options, id, stream,
                      [&per_chain, id](const ChainRecord& r) { per_chain[id].push_back(r); });
        }
    };
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    std::vector<ChainRecord> merged;
    merged.reserve(std::size_t(chains) * std::size_t(std::max<std::int64_t>(expected, 0)));
    for (auto& v : per_chain)
        merged.insert(merged.end(), v.begin(), v.end());
    return merged;
}

}  // namespace onspin::sim
