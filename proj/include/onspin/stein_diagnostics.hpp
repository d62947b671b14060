// Closed-form conditional moments of Delta, the exchangeable-pair bound
// terms, empirical distances to the standard normal, and the rate fit.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "onspin/model_constants.hpp"
#include "onspin/spin_configuration.hpp"

namespace onspin::sim {
struct ChainRecord;  // gibbs_dynamics.hpp
}

namespace onspin::stein {

// --- normal distribution helpers ------------------------------------------

// Phi(z) through the complementary error function; Phi(0) = 0.5 exactly,
// relative error a few ulp.
double normal_cdf(double z);
double normal_pdf(double z);

// Inverse of normal_cdf on (0, 1): rational initial guess plus one Halley
// refinement, accurate to ~1e-15 in the central range.
double normal_quantile(double p);

// --- conditional moments ----------------------------------------------------

struct ConditionalMoments {
    double mean = 0.0;    // E(Delta | sigma)
    double second = 0.0;  // E(Delta^2 | sigma)
};

// Exact expectation over the random index I and the conditional resample:
//   E(Delta|sigma)   = (2 beta^2/(b^2 n^{3/2})) (1/n) sum_i [<s_i, s^{(i)}> - f(b_i)|s^{(i)}|]
//   E(Delta^2|sigma) = (4 beta^4/(b^4 n^3)) (1/n) sum_i [<s_i,s^{(i)}>^2
//                        - 2 f(b_i)|s^{(i)}|<s_i,s^{(i)}> + |s^{(i)}|^2 (1 - (N-1) f(b_i)/b_i)]
// with b_i = beta |s^{(i)}|/n. Zero-length s^{(i)} terms vanish. One ratio
// evaluation per site serves both moments.
ConditionalMoments conditional_moments(const sim::SpinConfiguration& config,
                                       const model::ModelParams& params,
                                       const model::DerivedConstants& derived);

double cond_mean_delta(const sim::SpinConfiguration& config, const model::ModelParams& params,
                       const model::DerivedConstants& derived);
double cond_second_moment_delta(const sim::SpinConfiguration& config,
                                const model::ModelParams& params,
                                const model::DerivedConstants& derived);

// --- bound terms -------------------------------------------------------------

struct SteinTerms {
    double ratio_term = 0.0;         // E|1 - E(Delta^2|sigma)/(2 lambda B^2)|
    double third_moment_term = 0.0;  // (1/2lambda) E|Delta/B|^3 from realized draws
    double remainder_term = 0.0;     // E|cond_mean/(lambda B) - W/B|
    double mean_abs_w = 0.0;         // E|W/B|
    double wasserstein_bound = 0.0;
    double kolmogorov_bound = 0.0;
    std::int64_t n = 0;
    std::int64_t samples_used = 0;
};

constexpr std::int64_t kMinSteinSamples = 1000;

// Assembles the exchangeable-pair bounds for the normalized variable W/B:
//   wasserstein = sqrt(2/pi) ratio + third_moment + 2 remainder
//   kolmogorov  = ratio + (E|W/B| + 1)(delta_cap/B) + remainder
// Throws when fewer than kMinSteinSamples records are supplied.
SteinTerms stein_terms(const std::vector<sim::ChainRecord>& records,
                       const model::ModelParams& params, const model::DerivedConstants& derived);

// W-binned variant of the ratio term: records are sorted by W and split into
// equal-count bins; the bin mean of cond_second estimates E(Delta^2 | W).
// By conditional Jensen it cannot exceed the sigma-conditioned term (up to
// binning and Monte Carlo noise).
double ratio_term_w_binned(const std::vector<sim::ChainRecord>& records,
                           const model::DerivedConstants& derived, int bins = 100);

// --- empirical distances ------------------------------------------------------

// sup_i max(i/m - Phi(x_(i)), Phi(x_(i)) - (i-1)/m) over the sorted sample.
double empirical_kolmogorov(std::vector<double> sample);

// Integral |F_m - Phi| computed piecewise exactly between order statistics,
// with closed-form Gaussian tails outside the sample range (the L1/CDF form
// of the 1-D Wasserstein distance to N(0,1)).
double empirical_wasserstein(std::vector<double> sample);

// --- two-sample KS test --------------------------------------------------------

struct KsTestResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

// Two-sided two-sample Kolmogorov-Smirnov with the asymptotic null law.
KsTestResult two_sample_ks(std::vector<double> a, std::vector<double> b);

// --- rate fit --------------------------------------------------------------------

struct RatePoint {
    std::int64_t n = 0;
    double distance = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
    int points_used = 0;
    int points_dropped = 0;  // non-positive distances excluded
};

// Least-squares fit of log(distance) against log(n). Requires at least four
// usable points; non-positive distances are dropped with a count.
RateFit rate_fit(const std::vector<RatePoint>& table);

}  // namespace onspin::stein
