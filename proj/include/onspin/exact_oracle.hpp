// Exact (quadrature-based) law of |S_n| for the product and Gibbs measures,
// giving Monte-Carlo-free Kolmogorov distances and an independent check of
// the simulation stack.
#pragma once

#include <cstdint>
#include <vector>

#include "onspin/model_constants.hpp"
#include "onspin/rng.hpp"

namespace onspin::oracle {

// Radial law of |S_n| on a grid: density (normalized by its own trapezoid
// mass) and cdf. beta = 0 is the product measure; raw_mass records the
// trapezoid mass of the raw inversion before renormalization.
struct RadialLaw {
    std::int64_t n = 0;
    int N = 0;
    double beta = 0.0;
    std::vector<double> grid;
    std::vector<double> density;
    std::vector<double> cdf;
    double raw_mass = 1.0;
};

// Radial characteristic function of the uniform law on S^{N-1}:
//   psi_N(t) = Gamma(N/2) (2/t)^{N/2-1} J_{N/2-1}(t),  psi_N(0) = 1.
// Series for small and moderate t, stable trig/Bessel forms beyond.
double uniform_char_fn(double t, int N);

// Raw Hankel-type inversion of psi_N^n at a single radius:
//   p_n(r) = 2^{2-N}/Gamma(N/2)^2 r^{N-1} int_0^inf t^{N-1} psi_N(rt) psi_N(t)^n dt.
// The oscillatory integral is summed over uniform blocks whose length is
// chosen from the integrand's frequency lattice, then extrapolated with a
// guarded Wynn epsilon scheme. Also exposed for validation tests.
double product_density_at(double r, std::int64_t n, int N);

// Default grid for the product law on [0, r_max] (r_max covers the mass of
// |S_n| with a wide margin; full [0, n] when cover_full_range).
std::vector<double> product_grid(std::int64_t n, int N, std::size_t points,
                                 bool cover_full_range = false);

// Product-measure radial law (beta = 0) over the supplied grid. Grid points
// are evaluated independently (parallelized). Throws numerical_error when
// the raw mass is too far from 1 (inversion not trusted).
RadialLaw radial_density_product(std::int64_t n, int N, const std::vector<double>& grid,
                                 int max_threads = 2);

// Reweights a beta = 0 law by exp(beta r^2 / (2n)) with log-domain scaling,
// renormalized on the same grid.
RadialLaw tilt_gibbs(const RadialLaw& law, double beta, std::int64_t n);

// Gibbs-law log-density of |S_n| at radius r via a saddle-shifted inversion:
// the contour is moved to the exponential tilt solving n f(theta) = r, so the
// remaining integral is central and carries no exponential cancellation.
// Returns -inf where the tilted mass is negligible (r near 0 or n).
double gibbs_log_radial_density(double r, std::int64_t n, int N, double beta);

// Gibbs-measure radial law of |S_n| on a grid covering the tilted mass:
// product+tilt for n <= 12, saddle-shifted log densities beyond.
RadialLaw gibbs_radial_law(std::int64_t n, int N, double beta,
                           const model::DerivedConstants& derived, std::size_t points = 1501);

// sup_z |P(W_n/B <= z) - Phi(z)| computed from the exact law, refining the
// evaluation grid until the sup moves by less than 1e-6. Uses the product+tilt
// path for n <= 12 and the saddle-shifted path beyond.
double exact_kolmogorov_to_normal(std::int64_t n, int N, double beta,
                                  const model::DerivedConstants& derived);

// Self-normalized importance sampling under the product measure with weights
// exp(beta |S|^2 / (2n)), compared against the exact tilted law. Valid for
// small n only (weights degenerate beyond n ~ 24).
struct IsCheckResult {
    double mean_is = 0.0;      // IS estimate of E[W/B]
    double mean_se = 0.0;
    double p0_is = 0.0;        // IS estimate of P(W/B <= 0)
    double p0_se = 0.0;
    double ess = 0.0;          // effective sample size
    double mean_oracle = 0.0;
    double p0_oracle = 0.0;
};

IsCheckResult is_cross_check(std::int64_t n, int N, double beta,
                             const model::DerivedConstants& derived, std::int64_t draws,
                             rng::RngStream& stream);

}  // namespace onspin::oracle
