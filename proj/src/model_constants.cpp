#include "onspin/model_constants.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "onspin/errors.hpp"
#include "onspin/special_functions.hpp"

namespace onspin::model {

void ModelParams::validate() const {
    if (N < 2) throw config_error("ModelParams: N must be >= 2");
    if (n < 1) throw config_error("ModelParams: n must be >= 1");
    if (!(beta > N))
        throw config_error("ModelParams: beta must exceed N (supercritical phase); got beta=" +
                           std::to_string(beta) + ", N=" + std::to_string(N));
}

double solve_b(int N, double beta) {
    if (!(beta > N))
        throw config_error("solve_b: no positive fixed point for beta <= N");

    auto phi = [&](double x) { return x - beta * sf::bessel_ratio(x, N); };

    // phi < 0 near zero (slope 1 - beta/N < 0), phi > 0 for x >= beta.
    double lo = 1.0, hi = 1.0;
    double phi1 = phi(1.0);
    if (phi1 < 0.0) {
        while (phi(hi) < 0.0) {
            hi *= 2.0;
            if (hi > 1e18) throw numerical_error("solve_b: bracketing failed");
        }
        lo = hi / 2.0;
    } else {
        while (phi(lo) > 0.0) {
            lo *= 0.5;
            if (lo < 1e-300) throw numerical_error("solve_b: bracketing failed");
        }
        hi = lo * 2.0;
    }

    // converge well past the documented 1e-12 residual so that identities
    // evaluated at b (the B^2 bracket forms) agree to 1e-10 relative even
    // where the bracket itself is small
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        double fx = phi(x);
        if (std::fabs(fx) <= 1.0e-14 * std::fmax(1.0, x)) return x;
        if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() * std::fmax(1.0, x))
            return x;  // bracket exhausted at evaluation noise
        if (fx > 0.0)
            hi = x;
        else
            lo = x;
        double slope = 1.0 - beta * sf::bessel_ratio_deriv(x, N);
        double next = (slope != 0.0) ? x - fx / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    throw numerical_error("solve_b: no convergence after 200 iterations");
}

double variance_B2(int N, double beta, double b) {
    double f_b = sf::bessel_ratio(b, N);
    double bracket = 1.0 - (N - 1) * f_b / b - f_b * f_b;
    // same bracket with f(b) replaced by the fixed-point value b/beta
    double bracket_fp = 1.0 - (N - 1) / beta - b * b / (beta * beta);
    if (std::fabs(bracket - bracket_fp) > 1.0e-10 * std::fmax(std::fabs(bracket), 1e-30))
        throw numerical_error("variance_B2: bracket vs fixed-point identity mismatch (bad b?)");
    double f_prime_b = sf::bessel_ratio_deriv(b, N);
    double denom = (1.0 - beta * f_prime_b) * b * b;
    double B2 = 4.0 * beta * beta * bracket / denom;
    if (!(B2 > 0.0) || !std::isfinite(B2))
        throw numerical_error("variance_B2: non-positive or non-finite result");
    return B2;
}

double pair_lambda(const ModelParams& params, const DerivedConstants& derived) {
    double lambda = (1.0 - params.beta * derived.f_prime_b) / double(params.n);
    if (!(lambda > 0.0 && lambda < 1.0))
        throw numerical_error("pair_lambda: value outside (0,1)");
    return lambda;
}

DerivedConstants DerivedConstants::solve(const ModelParams& params) {
    params.validate();
    DerivedConstants d;
    d.b = solve_b(params.N, params.beta);
    d.f_b = sf::bessel_ratio(d.b, params.N);
    d.f_prime_b = sf::bessel_ratio_deriv(d.b, params.N);
    if (!(1.0 - params.beta * d.f_prime_b > 0.0))
        throw numerical_error("DerivedConstants: 1 - beta f'(b) not positive");
    d.B2 = variance_B2(params.N, params.beta, d.b);
    d.lambda = (1.0 - params.beta * d.f_prime_b) / double(params.n);
    if (!(d.lambda > 0.0 && d.lambda < 1.0))
        throw numerical_error("DerivedConstants: lambda outside (0,1)");
    d.delta_cap = 4.0 * params.beta * params.beta / (d.b * d.b * std::sqrt(double(params.n)));
    d.near_critical = params.beta <= params.N + 0.1;
    return d;
}

double hamiltonian(const sim::SpinConfiguration& config) {
    return -config.total_norm2 / (2.0 * double(config.n));
}

double w_statistic_from_norm2(double total_norm2, const ModelParams& params,
                              const DerivedConstants& derived) {
    double n = double(params.n);
    double scaled = params.beta * params.beta * total_norm2 / (n * n * derived.b * derived.b);
    return std::sqrt(n) * (scaled - 1.0);
}

double w_statistic(const sim::SpinConfiguration& config, const ModelParams& params,
                   const DerivedConstants& derived) {
    return w_statistic_from_norm2(config.total_norm2, params, derived);
}

}  // namespace onspin::model
