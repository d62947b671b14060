// Heat-bath (Glauber) chain targeting the Gibbs measure, and the
// exchangeable-pair step producing (W, W').
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "onspin/model_constants.hpp"
#include "onspin/rng.hpp"
#include "onspin/spin_configuration.hpp"

namespace onspin::sim {

// One exchangeable-pair draw. w_prime is computed from S' = S - sigma_I +
// sigma_I' on a scratch copy; the chain configuration is never mutated.
struct PairSample {
    double w = 0.0;
    double w_prime = 0.0;
    double delta = 0.0;  // w - w_prime, always within derived.delta_cap
    std::int64_t index = 0;
    double cond_mean = 0.0;    // E(Delta | sigma), closed form
    double cond_second = 0.0;  // E(Delta^2 | sigma), closed form
};

enum class InitKind { ordered, uniform };

struct ChainOptions {
    std::int64_t sweeps = 1000;   // recorded sweeps after burn-in
    std::int64_t burn_in = 200;
    std::int64_t thin = 5;        // record every `thin` sweeps
    InitKind init = InitKind::ordered;
    bool with_cond_moments = true;  // fill PairSample closed forms per record
};

struct ChainRecord {
    std::int64_t chain_id = 0;
    std::int64_t sweep = 0;
    double abs_S = 0.0;
    double w = 0.0;
    PairSample pair;
};

// Ordered start: all spins e_1. Uniform start: iid uniform spins.
SpinConfiguration make_configuration(const model::ModelParams& params, InitKind init,
                                     rng::RngStream& stream);

// Replaces sigma_i by a draw from its exact conditional given the rest:
// vMF with direction sigma^{(i)}/|sigma^{(i)}| and concentration
// beta |sigma^{(i)}|/n, where sigma^{(i)} = S - sigma_i. |sigma^{(i)}| = 0
// falls back to the uniform law. O(N) per call.
void heat_bath_step(SpinConfiguration& config, std::int64_t i, const model::ModelParams& params,
                    rng::RngStream& stream);

// Uniform random index I, resample sigma_I from its conditional, form W'
// without touching the chain state. Enforces |Delta| <= delta_cap.
PairSample exchangeable_pair_step(const SpinConfiguration& config,
                                  const model::ModelParams& params,
                                  const model::DerivedConstants& derived,
                                  rng::RngStream& stream, bool with_cond_moments = true);

// Systematic-scan sweeps (one heat-bath update per site per sweep). After
// burn_in sweeps, emits one record every `thin` sweeps; each record carries
// one exchangeable-pair draw. Exactly floor(sweeps / thin) records.
void run_chain(const model::ModelParams& params, const model::DerivedConstants& derived,
               const ChainOptions& options, std::int64_t chain_id, rng::RngStream& stream,
               const std::function<void(const ChainRecord&)>& sink);

// Runs `chains` independent chains (streams seeded (master_seed, chain_id))
// on up to `max_threads` threads and returns records ordered by
// (chain_id, sweep). Output is independent of the thread schedule.
std::vector<ChainRecord> run_chains(const model::ModelParams& params,
                                    const model::DerivedConstants& derived,
                                    const ChainOptions& options, std::uint64_t master_seed,
                                    int chains, int max_threads);

}  // namespace onspin::sim
