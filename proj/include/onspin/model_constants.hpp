// Model parameters, the fixed point b of x = beta f(x), the limiting
// variance B^2, the pair contraction rate lambda, and basic functionals.
#pragma once

#include <cstdint>

#include "onspin/spin_configuration.hpp"

namespace onspin::model {

struct ModelParams {
    int N = 3;            // spin dimension, >= 2
    double beta = 5.0;    // inverse temperature, > N (supercritical)
    std::int64_t n = 100; // number of sites

    // Throws config_error when the supercritical condition fails.
    void validate() const;
};

// Everything solved once per (N, beta, n). Immutable after construction.
struct DerivedConstants {
    double b = 0.0;          // unique positive root of x - beta f(x)
    double f_b = 0.0;        // f(b) = b/beta
    double f_prime_b = 0.0;  // f'(b)
    double B2 = 0.0;         // limiting variance of W_n
    double lambda = 0.0;     // (1 - beta f'(b)) / n, in (0,1)
    double delta_cap = 0.0;  // 4 beta^2 / (b^2 sqrt(n)), hard bound on |W - W'|
    bool near_critical = false;  // beta within 0.1 of N; constants blow up there

    static DerivedConstants solve(const ModelParams& params);
};

// Root of x - beta f(x) = 0 for beta > N. Bracket by doubling/halving from
// x = 1, then bisection with Newton steps. Residual |b - beta f(b)| is at
// most 1e-12 max(1, b). Throws config_error for beta <= N, numerical_error
// after 200 iterations without convergence.
double solve_b(int N, double beta);

// B^2 = 4 beta^2 [1 - (N-1) f(b)/b - f(b)^2] / ((1 - beta f'(b)) b^2).
// Cross-checks the bracket against the fixed-point substitution
// 1 - (N-1)/beta - b^2/beta^2 to 1e-10 relative; throws on mismatch or a
// non-positive result.
double variance_B2(int N, double beta, double b);

// (1 - beta f'(b)) / n, asserted to lie in (0, 1).
double pair_lambda(const ModelParams& params, const DerivedConstants& derived);

// Energy -|S_n|^2 / (2n), from the cached total spin.
double hamiltonian(const sim::SpinConfiguration& config);

// W_n = sqrt(n) (beta^2 |S_n|^2 / (n^2 b^2) - 1).
double w_statistic(const sim::SpinConfiguration& config, const ModelParams& params,
                   const DerivedConstants& derived);

// Same statistic from a raw |S|^2 value (used for the non-mutating pair step).
double w_statistic_from_norm2(double total_norm2, const ModelParams& params,
                              const DerivedConstants& derived);

}  // namespace onspin::model
