#include "onspin/stein_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "onspin/errors.hpp"
#include "onspin/gibbs_dynamics.hpp"
#include "onspin/special_functions.hpp"

namespace onspin::stein {

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

namespace {

// Acklam's rational approximation to the normal quantile (~1e-9), used as
// the seed for one Halley step.
double quantile_seed(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
    double z = quantile_seed(p);
    for (int i = 0; i < 2; ++i) {
        double err = normal_cdf(z) - p;
        double pdf = normal_pdf(z);
        if (pdf <= 0.0) break;
        double u = err / pdf;
        z -= u / (1.0 + 0.5 * z * u);  // Halley
    }
    return z;
}

ConditionalMoments conditional_moments(const sim::SpinConfiguration& config,
                                       const model::ModelParams& params,
                                       const model::DerivedConstants& derived) {
    const int N = config.N;
    const double n = double(config.n);
    const double beta = params.beta;

    double sum_mean = 0.0, sum_second = 0.0;
    std::vector<double> rest(N);
    for (std::int64_t i = 0; i < config.n; ++i) {
        auto row = config.spin(i);
        double rest_norm2 = 0.0, dot = 0.0;
        for (int d = 0; d < N; ++d) {
            rest[d] = config.total_spin[d] - row[d];
            rest_norm2 += rest[d] * rest[d];
            dot += row[d] * rest[d];
        }
        double s = std::sqrt(rest_norm2);
        if (s < 1e-14) continue;  // uniform conditional: both contributions vanish
        double b_i = beta * s / n;
        double f_i = sf::bessel_ratio(b_i, N);
        double f_over_b_i = (b_i < 1e-4) ? sf::bessel_ratio_over_x(b_i, N) : f_i / b_i;
        sum_mean += dot - f_i * s;
        sum_second += dot * dot - 2.0 * f_i * s * dot +
                      rest_norm2 * (1.0 - (N - 1) * f_over_b_i);
    }

    const double b2 = derived.b * derived.b;
    ConditionalMoments m;
    m.mean = 2.0 * beta * beta / (b2 * std::pow(n, 1.5)) * (sum_mean / n);
    m.second = 4.0 * std::pow(beta, 4) / (b2 * b2 * n * n * n) * (sum_second / n);
    return m;
}

double cond_mean_delta(const sim::SpinConfiguration& config, const model::ModelParams& params,
                       const model::DerivedConstants& derived) {
    return conditional_moments(config, params, derived).mean;
}

double cond_second_moment_delta(const sim::SpinConfiguration& config,
                                const model::ModelParams& params,
                                const model::DerivedConstants& derived) {
    return conditional_moments(config, params, derived).second;
}

SteinTerms stein_terms(const std::vector<sim::ChainRecord>& records,
                       const model::ModelParams& params, const model::DerivedConstants& derived) {
    if (std::int64_t(records.size()) < kMinSteinSamples)
        throw std::invalid_argument("stein_terms: need at least 1000 samples, got " +
                                    std::to_string(records.size()));
    const double B = std::sqrt(derived.B2);
    const double lambda = derived.lambda;
    const double two_lambda_B2 = 2.0 * lambda * derived.B2;

    double ratio = 0.0, third = 0.0, remainder = 0.0, abs_w = 0.0;
    for (const auto& r : records) {
        ratio += std::fabs(1.0 - r.pair.cond_second / two_lambda_B2);
        double dn = std::fabs(r.pair.delta) / B;
        third += dn * dn * dn;
        remainder += std::fabs(r.pair.cond_mean / (lambda * B) - r.w / B);
        abs_w += std::fabs(r.w) / B;
    }
    const double m = double(records.size());
    SteinTerms t;
    t.ratio_term = ratio / m;
    t.third_moment_term = third / m / (2.0 * lambda);
    t.remainder_term = remainder / m;
    t.mean_abs_w = abs_w / m;
    t.wasserstein_bound = std::sqrt(2.0 / std::numbers::pi) * t.ratio_term +
                          t.third_moment_term + 2.0 * t.remainder_term;
    t.kolmogorov_bound =
        t.ratio_term + (t.mean_abs_w + 1.0) * (derived.delta_cap / B) + t.remainder_term;
    t.n = params.n;
    t.samples_used = std::int64_t(records.size());
    return t;
}

double ratio_term_w_binned(const std::vector<sim::ChainRecord>& records,
                           const model::DerivedConstants& derived, int bins) {
    if (records.empty()) throw std::invalid_argument("ratio_term_w_binned: empty input");
    bins = std::max(1, std::min<int>(bins, int(records.size())));
    std::vector<std::pair<double, double>> by_w;  // (w, cond_second)
    by_w.reserve(records.size());
    for (const auto& r : records) by_w.emplace_back(r.w, r.pair.cond_second);
    std::sort(by_w.begin(), by_w.end());

    const double two_lambda_B2 = 2.0 * derived.lambda * derived.B2;
    const std::size_t m = by_w.size();
    double acc = 0.0;
    for (int bin = 0; bin < bins; ++bin) {
        std::size_t lo = m * std::size_t(bin) / bins;
        std::size_t hi = m * std::size_t(bin + 1) / bins;
        if (hi == lo) continue;
        double mean = 0.0;
        for (std::size_t i = lo; i < hi; ++i) mean += by_w[i].second;
        mean /= double(hi - lo);
        acc += std::fabs(1.0 - mean / two_lambda_B2) * double(hi - lo);
    }
    return acc / double(m);
}

double empirical_kolmogorov(std::vector<double> sample) {
    if (sample.empty()) throw std::invalid_argument("empirical_kolmogorov: empty sample");
    std::sort(sample.begin(), sample.end());
    const double m = double(sample.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double phi = normal_cdf(sample[i]);
        worst = std::fmax(worst, double(i + 1) / m - phi);
        worst = std::fmax(worst, phi - double(i) / m);
    }
    return worst;
}

namespace {

// Antiderivative of Phi: int Phi = z Phi(z) + phi(z), vanishing at -infinity.
double cdf_antiderivative(double z) {
    return z * normal_cdf(z) + normal_pdf(z);
}

}  // namespace

double empirical_wasserstein(std::vector<double> sample) {
    if (sample.empty()) throw std::invalid_argument("empirical_wasserstein: empty sample");
    std::sort(sample.begin(), sample.end());
    const std::size_t m = sample.size();

    // left tail: F_m = 0, integral of Phi up to x_(1)
    double total = cdf_antiderivative(sample.front());
    // right tail: F_m = 1, integral of 1 - Phi beyond x_(m)
    double xm = sample.back();
    total += normal_pdf(xm) - xm * (1.0 - normal_cdf(xm));

    for (std::size_t i = 0; i + 1 < m; ++i) {
        double a = sample[i], b = sample[i + 1];
        if (a == b) continue;
        double level = double(i + 1) / double(m);
        double phi_a = normal_cdf(a), phi_b = normal_cdf(b);
        if (phi_b <= level) {
            total += level * (b - a) - (cdf_antiderivative(b) - cdf_antiderivative(a));
        } else if (phi_a >= level) {
            total += (cdf_antiderivative(b) - cdf_antiderivative(a)) - level * (b - a);
        } else {
            double cross = normal_quantile(level);
            cross = std::clamp(cross, a, b);
            total += level * (cross - a) - (cdf_antiderivative(cross) - cdf_antiderivative(a));
            total += (cdf_antiderivative(b) - cdf_antiderivative(cross)) - level * (b - cross);
        }
    }
    return total;
}

namespace {

// Asymptotic Kolmogorov tail: P(sqrt(m) D > lambda) = 2 sum (-1)^{k-1} e^{-2k^2 lambda^2}.
double kolmogorov_tail(double lambda) {
    if (lambda < 1e-6) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * std::exp(-2.0 * double(k) * double(k) * lambda * lambda);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

}  // namespace

KsTestResult two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("two_sample_ks: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::fmax(d, std::fabs(double(i) / a.size() - double(j) / b.size()));
    }
    double na = double(a.size()), nb = double(b.size());
    double effective = std::sqrt(na * nb / (na + nb));
    KsTestResult result;
    result.statistic = d;
    result.p_value = kolmogorov_tail(effective * d);
    return result;
}

RateFit rate_fit(const std::vector<RatePoint>& table) {
    std::vector<std::pair<double, double>> pts;
    int dropped = 0;
    for (const auto& row : table) {
        if (row.distance > 0.0 && row.n > 0)
            pts.emplace_back(std::log(double(row.n)), std::log(row.distance));
        else
            ++dropped;
    }
    if (pts.size() < 4)
        throw std::invalid_argument("rate_fit: need at least 4 usable points, got " +
                                    std::to_string(pts.size()));

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double m = double(pts.size());
    double denom = m * sxx - sx * sx;
    if (denom == 0.0) throw numerical_error("rate_fit: degenerate abscissae");

    RateFit fit;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    for (auto& [x, y] : pts)
        fit.max_residual = std::fmax(fit.max_residual, std::fabs(y - fit.slope * x - fit.intercept));
    fit.points_used = int(pts.size());
    fit.points_dropped = dropped;
    return fit;
}

}  // namespace onspin::stein
