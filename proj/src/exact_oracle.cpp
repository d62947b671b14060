#include "onspin/exact_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <thread>

#include "onspin/errors.hpp"
#include "onspin/special_functions.hpp"
#include "onspin/sphere_sampling.hpp"
#include "onspin/stein_diagnostics.hpp"

namespace onspin::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// psi_N and its entire (I-Bessel) counterpart
// ---------------------------------------------------------------------------

// Ascending series of psi in u = -t^2/4 (or +w^2/4 for the I-form); entire,
// usable for |t| up to ~6 before alternation costs digits.
template <typename T>
T psi_series_arg(T quarter_sq, int N) {
    T term = T(1), sum = T(1);
    for (int k = 1; k <= 500; ++k) {
        term *= quarter_sq / T(double(k) * (0.5 * N - 1.0 + k));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Spherical Bessel j_m(t) by upward recurrence; stable for m << t.
double spherical_j(int m, double t) {
    double j0 = std::sin(t) / t;
    if (m == 0) return j0;
    double j1 = j0 / t - std::cos(t) / t;
    for (int k = 1; k < m; ++k) {
        double jn = (2.0 * k + 1.0) / t * j1 - j0;
        j0 = j1;
        j1 = jn;
    }
    return j1;
}

}  // namespace

double uniform_char_fn(double t, int N) {
    if (t < 0.0) throw std::domain_error("uniform_char_fn: t must be >= 0");
    if (N < 2) throw std::domain_error("uniform_char_fn: N must be >= 2");
    if (t < 1e-4)
        return 1.0 - t * t / (2.0 * N) + std::pow(t, 4) / (8.0 * N * (N + 2));
    if (t <= 6.0) return psi_series_arg(-0.25 * t * t, N);
    if (N % 2 == 1) {
        int m = (N - 3) / 2;
        return std::tgamma(0.5 * N) * std::pow(2.0, m + 1) / std::sqrt(kPi) *
               spherical_j(m, t) / std::pow(t, m);
    }
    int m = N / 2 - 1;
    double jm = (m == 0) ? j0(t) : (m == 1 ? j1(t) : jn(m, t));
    return std::tgamma(0.5 * N) * std::pow(2.0 / t, m) * jm;
}

namespace {

// ---------------------------------------------------------------------------
// oscillatory block summation with Wynn extrapolation
// ---------------------------------------------------------------------------

struct WynnResult {
    double value = 0.0;
    double error = 0.0;
};

// Guarded Wynn epsilon on partial sums: walks the even columns and keeps the
// entry with the smallest neighbor spread. Long double keeps headroom for
// the division cascade.
WynnResult wynn_epsilon(const std::vector<long double>& partial) {
    std::vector<long double> prev(partial.size() + 1, 0.0L), cur(partial);
    WynnResult best;
    best.value = double(partial.back());
    best.error = partial.size() > 1
                     ? std::fabs(double(partial.back() - partial[partial.size() - 2]))
                     : std::fabs(best.value);
    int col = 0;
    while (cur.size() >= 3 && col < 60) {
        std::vector<long double> next(cur.size() - 1);
        for (std::size_t m = 0; m + 1 < cur.size(); ++m) {
            long double d = cur[m + 1] - cur[m];
            next[m] = (std::fabs((double)d) < 1e-305) ? prev[m + 1] : prev[m + 1] + 1.0L / d;
        }
        ++col;
        if (col % 2 == 0 && next.size() >= 2) {
            double cand = double(next.back());
            double err = std::fabs(double(next.back() - next[next.size() - 2])) +
                         1e-17 * std::fabs(cand);
            if (err < best.error) {
                best.value = cand;
                best.error = err;
            }
        }
        prev.swap(cur);
        cur.swap(next);
    }
    return best;
}

// 12-point Gauss-Legendre panel.
constexpr double kGl12X[12] = {
    -0.981560634246719251, -0.904117256370474857, -0.769902674194304687,
    -0.587317954286617447, -0.367831498998180194, -0.125233408511468916,
    0.125233408511468916,  0.367831498998180194,  0.587317954286617447,
    0.769902674194304687,  0.904117256370474857,  0.981560634246719251};
constexpr double kGl12W[12] = {
    0.047175336386511827, 0.106939325995318431, 0.160078328543346226,
    0.203167426723065922, 0.233492536538354809, 0.249147045813402785,
    0.249147045813402785, 0.233492536538354809, 0.203167426723065922,
    0.160078328543346226, 0.106939325995318431, 0.047175336386511827};

double powi(double base, std::int64_t e) {
    double acc = 1.0, b = base;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

// The tail frequencies of t^{N-1} psi(rt) psi(t)^n: |r - k| and r + k for
// k in {n, n-2, ...}. The block length is chosen so that no mode aliases
// onto the unit point of the Wynn transform.
double pick_block_length(double r, std::int64_t n) {
    std::vector<double> freqs;
    for (std::int64_t k = n; k >= 0; k -= 2) {
        if (k == 0)
            freqs.push_back(r);
        else {
            freqs.push_back(std::fabs(r - double(k)));
            freqs.push_back(r + double(k));
        }
    }
    std::erase_if(freqs, [](double f) { return f <= 1e-12; });
    double slow = *std::min_element(freqs.begin(), freqs.end());

    std::vector<double> candidates;
    if (slow < 0.4)
        for (int j = 0; j <= 60; ++j) candidates.push_back(kPi * (0.55 + 0.9 * j / 60.0) / slow);
    double base = kPi / (r + double(n) + 1.0);
    for (int j = 0; j <= 60; ++j) candidates.push_back(base * (1.0 + 1.2 * j / 60.0));

    double best_h = candidates.front(), best_score = -1.0;
    for (double h : candidates) {
        double worst = 2.0;
        for (double f : freqs) {
            double c = std::fabs(std::polar(1.0, f * h) - std::complex<double>(1.0, 0.0));
            worst = std::min(worst, c);
        }
        double score = std::min(worst, 0.6) - (slow < 0.4 ? 1e-4 * (h * slow / kPi) : 0.0);
        if (score > best_score) {
            best_score = score;
            best_h = h;
        }
    }
    return best_h;
}

// Asymptotic amplitude bound of |psi_N|: min(1, a_N t^{-(N-1)/2}).
double psi_envelope_coeff(int N) {
    return std::tgamma(0.5 * N) * std::pow(2.0, 0.5 * N - 1.0) * std::sqrt(2.0 / kPi);
}

}  // namespace

double product_density_at(double r, std::int64_t n, int N) {
    if (r <= 0.0) return 0.0;
    const double h = pick_block_length(r, n);
    const int sub = std::max(1, int(std::ceil(h * (r + double(n) + 1.0) / (kPi / 2.0))));
    const int max_blocks = 90;
    const double envelope_a = psi_envelope_coeff(N);
    const double tail_exponent = 0.5 * double(n) * (N - 1) - (N - 1);  // decay of t^{N-1} env^n

    auto integrand = [&](double t) {
        if (t == 0.0) return 0.0;
        return std::pow(t, N - 1) * uniform_char_fn(r * t, N) * powi(uniform_char_fn(t, N), n);
    };

    std::vector<long double> partial;
    partial.reserve(max_blocks);
    long double acc = 0.0L;
    for (int block = 0; block < max_blocks; ++block) {
        double a = block * h, b = (block + 1) * h;
        double s = 0.0;
        for (int j = 0; j < sub; ++j) {
            double pa = a + (b - a) * j / sub, pb = a + (b - a) * (j + 1) / sub;
            double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
            double panel = 0.0;
            for (int g = 0; g < 12; ++g) panel += kGl12W[g] * integrand(mid + half * kGl12X[g]);
            s += panel * half;
        }
        acc += (long double)s;
        partial.push_back(acc);

        // absolute-convergence exit once the enveloped tail is negligible
        double t_end = b;
        if (t_end > std::max(2.0, double(N)) && tail_exponent > 1.0) {
            double amp = powi(envelope_a / std::pow(t_end, 0.5 * (N - 1)), n);
            double tail = amp * std::pow(t_end, N - 1) * t_end / (tail_exponent - 1.0);
            if (tail < 1e-15 * std::max(std::fabs(double(acc)), 1e-3)) break;
        }
    }

    WynnResult w = wynn_epsilon(partial);
    double pref = std::pow(2.0, 2 - N) / std::pow(std::tgamma(0.5 * N), 2) * std::pow(r, N - 1);
    return pref * w.value;
}

std::vector<double> product_grid(std::int64_t n, [[maybe_unused]] int N, std::size_t points,
                                 bool cover_full_range) {
    double r_max = cover_full_range
                       ? double(n)
                       : std::min(double(n), std::sqrt(double(n)) * 4.0 + 8.0);
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = r_max * double(i) / double(points - 1);
    return grid;
}

RadialLaw radial_density_product(std::int64_t n, int N, const std::vector<double>& grid,
                                 int max_threads) {
    if (n < 2) throw std::invalid_argument("radial_density_product: n must be >= 2");
    if (grid.size() < 8) throw std::invalid_argument("radial_density_product: grid too small");

    RadialLaw law;
    law.n = n;
    law.N = N;
    law.beta = 0.0;
    law.grid = grid;
    law.density.assign(grid.size(), 0.0);

    std::atomic<std::size_t> cursor{0};
    auto work = [&]() {
        while (true) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= grid.size()) return;
            law.density[i] = product_density_at(grid[i], n, N);
        }
    };
    int workers = std::max(1, max_threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    double undershoot = 0.0;
    for (double& d : law.density) {
        undershoot = std::min(undershoot, d);
        if (d < 0.0) d = 0.0;
    }
    if (undershoot < -1e-6)
        throw numerical_error("radial_density_product: negative density beyond tolerance");

    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        mass += 0.5 * (law.density[i] + law.density[i + 1]) * (grid[i + 1] - grid[i]);
    law.raw_mass = mass;
    // n = 2 keeps a jump at the support edge; the trapezoid mass there is
    // grid-limited, so the gate is wider.
    double gate = (n == 2) ? 2e-2 : 1e-4;
    if (std::fabs(mass - 1.0) > gate)
        throw numerical_error("radial_density_product: raw mass " + std::to_string(mass) +
                              " too far from 1");

    for (double& d : law.density) d /= mass;
    law.cdf.assign(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        law.cdf[i] = law.cdf[i - 1] +
                     0.5 * (law.density[i] + law.density[i - 1]) * (grid[i] - grid[i - 1]);
    for (double& c : law.cdf) c = std::clamp(c / law.cdf.back(), 0.0, 1.0);
    return law;
}

RadialLaw tilt_gibbs(const RadialLaw& law, double beta, std::int64_t n) {
    if (law.beta != 0.0) throw std::invalid_argument("tilt_gibbs: input must be a beta=0 law");
    RadialLaw tilted = law;
    tilted.beta = beta;

    // Inversion noise in the far tail of the product law would be amplified
    // exponentially by the tilt; anything below the relative floor is treated
    // as exact zero. This keeps the tilt trustworthy for n <= 12, where the
    // true density stays far above the floor across the tilted window.
    double max_density = *std::max_element(law.density.begin(), law.density.end());
    double floor = (beta == 0.0) ? 0.0 : 1e-11 * max_density;

    std::vector<double> log_density(law.grid.size(), kNegInf);
    double peak = kNegInf;
    for (std::size_t i = 0; i < law.grid.size(); ++i) {
        if (law.density[i] <= floor) continue;
        double r = law.grid[i];
        log_density[i] = std::log(law.density[i]) + beta * r * r / (2.0 * double(n));
        peak = std::max(peak, log_density[i]);
    }
    if (peak == kNegInf) throw numerical_error("tilt_gibbs: degenerate law");

    for (std::size_t i = 0; i < law.grid.size(); ++i)
        tilted.density[i] = (log_density[i] == kNegInf) ? 0.0 : std::exp(log_density[i] - peak);

    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < law.grid.size(); ++i)
        mass += 0.5 * (tilted.density[i] + tilted.density[i + 1]) *
                (law.grid[i + 1] - law.grid[i]);
    for (double& d : tilted.density) d /= mass;
    tilted.raw_mass = 1.0;

    for (std::size_t i = 1; i < law.grid.size(); ++i)
        tilted.cdf[i] = tilted.cdf[i - 1] + 0.5 * (tilted.density[i] + tilted.density[i - 1]) *
                                                (law.grid[i] - law.grid[i - 1]);
    tilted.cdf[0] = 0.0;
    for (double& c : tilted.cdf) c = std::clamp(c / tilted.cdf.back(), 0.0, 1.0);
    return tilted;
}

// ---------------------------------------------------------------------------
// saddle-shifted inversion for the Gibbs law at larger n
// ---------------------------------------------------------------------------

namespace {

constexpr double kThetaCap = 200.0;

// Solves n f(theta) = r; the tilt that centers the inversion at radius r.
double solve_tilt(double r, std::int64_t n, int N) {
    double target = r / double(n);
    double lo = 1e-10, hi = 1.0;
    while (sf::bessel_ratio(hi, N) < target) {
        hi *= 2.0;
        if (hi > kThetaCap) return -1.0;  // beyond supported tilt
    }
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (sf::bessel_ratio(mid, N) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

std::complex<double> powi_complex(std::complex<double> base, std::int64_t e) {
    std::complex<double> acc(1.0, 0.0);
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration, cached by order.
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
    x.assign(m, 0.0);
    w.assign(m, 0.0);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < m; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = m * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

}  // namespace

double gibbs_log_radial_density(double r, std::int64_t n, int N, double beta) {
    if (r <= 0.0 || r >= double(n)) return kNegInf;
    double theta = solve_tilt(r, n, N);
    if (theta <= 0.0) return kNegInf;

    double psi_theta = psi_series_arg(0.25 * theta * theta, N);
    double log_psi_theta = std::log(psi_theta);
    double f_theta = r / double(n);
    double fp_theta = sf::bessel_ratio_deriv(theta, N);

    double L1 = 12.0 / std::sqrt(double(n) * fp_theta);
    double Lq = 12.0 * std::sqrt(theta / (double(n) * f_theta));

    // The series for psi on the shifted contour loses ~(|w| - theta) digits
    // of e-precision to cancellation, so the box is capped at |w| = theta + 22
    // (the true integrand is below e^{-18} there). If the cap squeezes the box
    // under six Gaussian widths the point carries negligible tilted mass.
    double budget = (theta + 22.0) * (theta + 22.0) - theta * theta;
    double need = L1 * L1 + Lq * Lq;
    if (need > budget) {
        double scale = std::sqrt(budget / need);
        if (scale < 0.5) return kNegInf;
        L1 *= scale;
        Lq *= scale;
    }

    static thread_local std::vector<double> gx, gw;
    const int m_nodes = 64;
    if (int(gx.size()) != m_nodes) gauss_legendre(m_nodes, gx, gw);

    std::complex<double> acc(0.0, 0.0);
    for (int iq = 0; iq < m_nodes; ++iq) {
        double q = 0.5 * Lq * (gx[iq] + 1.0);
        double wq = 0.5 * Lq * gw[iq];
        std::complex<double> inner(0.0, 0.0);
        for (int ix = 0; ix < m_nodes; ++ix) {
            double xi = 0.5 * L1 * (gx[ix] + 1.0);
            double wx = 0.5 * L1 * gw[ix];
            std::complex<double> t(theta, xi);
            std::complex<double> z = t * t - q * q;  // w^2 on the shifted contour
            std::complex<double> ratio = psi_series_arg(0.25 * z, N) / psi_theta;
            inner += wx * powi_complex(ratio, n) * std::polar(1.0, -r * xi);
        }
        // xi-integral over the full line is twice the real part of [0, L1]
        acc += wq * std::pow(q, N - 2) * 2.0 * inner.real();
    }

    double sphere_nm2 = 2.0 * std::pow(kPi, 0.5 * (N - 1)) / std::tgamma(0.5 * (N - 1));
    double core = acc.real() * sphere_nm2 / std::pow(2.0 * kPi, N);
    if (!(core > 0.0)) return kNegInf;

    double log_area = std::log(2.0) + 0.5 * N * std::log(kPi) - std::lgamma(0.5 * N);
    return log_area + (N - 1) * std::log(r) - theta * r + double(n) * log_psi_theta +
           std::log(core) + beta * r * r / (2.0 * double(n));
}

namespace {

// d_K via the product + tilt path (small n): map the tilted radial cdf
// through the monotone W/B transform and sup against Phi on a refining grid.
double dk_small_n(std::int64_t n, int N, double beta, const model::DerivedConstants& derived) {
    auto grid = product_grid(n, N, 4001, /*cover_full_range=*/true);
    RadialLaw tilted = tilt_gibbs(radial_density_product(n, N, grid), beta, n);

    const double B = std::sqrt(derived.B2);
    const double r_star = double(n) * derived.b / beta;
    auto cdf_at = [&](double r) {
        if (r <= tilted.grid.front()) return 0.0;
        if (r >= tilted.grid.back()) return 1.0;
        auto it = std::upper_bound(tilted.grid.begin(), tilted.grid.end(), r);
        std::size_t i = std::size_t(it - tilted.grid.begin());
        double t = (r - tilted.grid[i - 1]) / (tilted.grid[i] - tilted.grid[i - 1]);
        return tilted.cdf[i - 1] + t * (tilted.cdf[i] - tilted.cdf[i - 1]);
    };

    double prev = -1.0, dk = 0.0;
    for (std::size_t points = 2001; points <= 64001; points = points * 2 - 1) {
        dk = 0.0;
        for (std::size_t j = 0; j < points; ++j) {
            double z = -12.0 + 24.0 * double(j) / double(points - 1);
            double shifted = 1.0 + z * B / std::sqrt(double(n));
            double F = (shifted <= 0.0) ? 0.0 : cdf_at(r_star * std::sqrt(shifted));
            dk = std::max(dk, std::fabs(F - stein::normal_cdf(z)));
        }
        if (prev >= 0.0 && std::fabs(dk - prev) < 1e-6) break;
        prev = dk;
    }
    return dk;
}

// d_K via the saddle-shifted path: the z-grid maps to radii, densities come
// from gibbs_log_radial_density, and the cdf is a trapezoid in r.
double dk_saddle(std::int64_t n, int N, double beta, const model::DerivedConstants& derived) {
    const double B = std::sqrt(derived.B2);
    const double r_star = double(n) * derived.b / beta;

    double prev = -1.0, dk = 0.0;
    for (int points = 1601; points <= 6401; points = points * 2 - 1) {
        std::vector<double> z(points), r(points), log_density(points, kNegInf);
        for (int j = 0; j < points; ++j) {
            z[j] = -12.0 + 24.0 * double(j) / double(points - 1);
            double shifted = 1.0 + z[j] * B / std::sqrt(double(n));
            r[j] = (shifted <= 0.0) ? 0.0 : r_star * std::sqrt(shifted);
        }

        std::atomic<int> cursor{0};
        auto work = [&]() {
            while (true) {
                int j = cursor.fetch_add(1);
                if (j >= points) return;
                if (r[j] > 0.0) log_density[j] = gibbs_log_radial_density(r[j], n, N, beta);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < 2; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();

        double peak = *std::max_element(log_density.begin(), log_density.end());
        std::vector<double> density(points, 0.0);
        for (int j = 0; j < points; ++j)
            if (log_density[j] != kNegInf) density[j] = std::exp(log_density[j] - peak);

        std::vector<double> cdf(points, 0.0);
        for (int j = 1; j < points; ++j)
            cdf[j] = cdf[j - 1] + 0.5 * (density[j] + density[j - 1]) * (r[j] - r[j - 1]);
        double mass = cdf.back();

        dk = 0.0;
        for (int j = 0; j < points; ++j)
            dk = std::max(dk, std::fabs(cdf[j] / mass - stein::normal_cdf(z[j])));
        if (prev >= 0.0 && std::fabs(dk - prev) < 1e-6) break;
        prev = dk;
    }
    return dk;
}

}  // namespace

RadialLaw gibbs_radial_law(std::int64_t n, int N, double beta,
                           const model::DerivedConstants& derived, std::size_t points) {
    if (n <= 12) {
        auto grid = product_grid(n, N, 4001, /*cover_full_range=*/true);
        return tilt_gibbs(radial_density_product(n, N, grid), beta, n);
    }
    RadialLaw law;
    law.n = n;
    law.N = N;
    law.beta = beta;
    double r_star = double(n) * derived.b / beta;
    double half_width = 14.0 * std::sqrt(derived.B2) / std::sqrt(double(n));
    double lo = r_star * std::sqrt(std::fmax(1.0 - half_width, 1e-8));
    double hi = std::min(double(n) * (1.0 - 1e-9), r_star * std::sqrt(1.0 + half_width));
    law.grid.resize(points);
    law.density.assign(points, 0.0);
    std::vector<double> log_density(points, kNegInf);
    for (std::size_t i = 0; i < points; ++i)
        law.grid[i] = lo + (hi - lo) * double(i) / double(points - 1);

    std::atomic<std::size_t> cursor{0};
    auto work = [&]() {
        while (true) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= points) return;
            log_density[i] = gibbs_log_radial_density(law.grid[i], n, N, beta);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < 2; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    double peak = *std::max_element(log_density.begin(), log_density.end());
    if (peak == kNegInf) throw numerical_error("gibbs_radial_law: empty law");
    for (std::size_t i = 0; i < points; ++i)
        if (log_density[i] != kNegInf) law.density[i] = std::exp(log_density[i] - peak);

    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < points; ++i)
        mass += 0.5 * (law.density[i] + law.density[i + 1]) * (law.grid[i + 1] - law.grid[i]);
    for (double& d : law.density) d /= mass;
    law.raw_mass = 1.0;
    law.cdf.assign(points, 0.0);
    for (std::size_t i = 1; i < points; ++i)
        law.cdf[i] = law.cdf[i - 1] +
                     0.5 * (law.density[i] + law.density[i - 1]) * (law.grid[i] - law.grid[i - 1]);
    for (double& c : law.cdf) c = std::clamp(c / law.cdf.back(), 0.0, 1.0);
    return law;
}

double exact_kolmogorov_to_normal(std::int64_t n, int N, double beta,
                                  const model::DerivedConstants& derived) {
    if (!(beta > N)) throw config_error("exact_kolmogorov_to_normal: requires beta > N");
    if (n > 512)
        throw config_error("exact_kolmogorov_to_normal: n capped at 512 (oscillation cost)");
    // tilting the real-axis inversion amplifies its noise floor by
    // exp(beta r^2/(2n)); past n = 12 that reaches the density scale, so the
    // saddle-shifted inversion takes over
    return (n <= 12) ? dk_small_n(n, N, beta, derived) : dk_saddle(n, N, beta, derived);
}

IsCheckResult is_cross_check(std::int64_t n, int N, double beta,
                             const model::DerivedConstants& derived, std::int64_t draws,
                             rng::RngStream& stream) {
    if (n > 24)
        throw config_error("is_cross_check: n capped at 24 (weight degeneracy)");

    const double B = std::sqrt(derived.B2);
    std::vector<double> z_values(draws), exponents(draws);
    std::vector<double> spin(N), total(N);
    for (std::int64_t d = 0; d < draws; ++d) {
        std::fill(total.begin(), total.end(), 0.0);
        for (std::int64_t i = 0; i < n; ++i) {
            sphere::sample_uniform_sphere(N, stream, spin);
            for (int c = 0; c < N; ++c) total[c] += spin[c];
        }
        double norm2 = 0.0;
        for (int c = 0; c < N; ++c) norm2 += total[c] * total[c];
        double w = std::sqrt(double(n)) *
                   (beta * beta * norm2 / (double(n) * double(n) * derived.b * derived.b) - 1.0);
        z_values[d] = w / B;
        exponents[d] = beta * norm2 / (2.0 * double(n));
    }

    double peak = *std::max_element(exponents.begin(), exponents.end());
    double sw = 0.0, sw2 = 0.0, swz = 0.0, swp = 0.0;
    for (std::int64_t d = 0; d < draws; ++d) {
        double w = std::exp(exponents[d] - peak);
        sw += w;
        sw2 += w * w;
        swz += w * z_values[d];
        swp += w * (z_values[d] <= 0.0 ? 1.0 : 0.0);
    }

    IsCheckResult result;
    result.mean_is = swz / sw;
    result.p0_is = swp / sw;
    result.ess = sw * sw / sw2;

    // Standard errors by leave-one-batch-out jackknife. The self-normalized
    // estimator is driven by a handful of large weights here, which a
    // delta-method SE badly understates; the jackknife sees them.
    const int batches = 200;
    std::vector<double> bw(batches, 0.0), bwz(batches, 0.0), bwp(batches, 0.0);
    for (std::int64_t d = 0; d < draws; ++d) {
        int k = int(d % batches);
        double w = std::exp(exponents[d] - peak);
        bw[k] += w;
        bwz[k] += w * z_values[d];
        bwp[k] += w * (z_values[d] <= 0.0 ? 1.0 : 0.0);
    }
    double mean_acc = 0.0, p0_acc = 0.0;
    std::vector<double> jack_mean(batches), jack_p0(batches);
    for (int k = 0; k < batches; ++k) {
        jack_mean[k] = (swz - bwz[k]) / (sw - bw[k]);
        jack_p0[k] = (swp - bwp[k]) / (sw - bw[k]);
        mean_acc += jack_mean[k];
        p0_acc += jack_p0[k];
    }
    mean_acc /= batches;
    p0_acc /= batches;
    double var_mean = 0.0, var_p0 = 0.0;
    for (int k = 0; k < batches; ++k) {
        var_mean += (jack_mean[k] - mean_acc) * (jack_mean[k] - mean_acc);
        var_p0 += (jack_p0[k] - p0_acc) * (jack_p0[k] - p0_acc);
    }
    double jack_factor = double(batches - 1) / double(batches);
    result.mean_se = std::sqrt(jack_factor * var_mean);
    result.p0_se = std::sqrt(jack_factor * var_p0);

    // oracle side from the exact tilted law
    auto grid = product_grid(n, N, 4001, /*cover_full_range=*/true);
    RadialLaw tilted = tilt_gibbs(radial_density_product(n, N, grid), beta, n);
    double mean = 0.0;
    for (std::size_t i = 0; i + 1 < tilted.grid.size(); ++i) {
        double r0 = tilted.grid[i], r1 = tilted.grid[i + 1];
        auto z_of = [&](double r) {
            return std::sqrt(double(n)) *
                   (beta * beta * r * r / (double(n) * double(n) * derived.b * derived.b) - 1.0) /
                   B;
        };
        mean += 0.5 * (tilted.density[i] * z_of(r0) + tilted.density[i + 1] * z_of(r1)) * (r1 - r0);
    }
    result.mean_oracle = mean;

    double r0 = double(n) * derived.b / beta;  // z = 0 radius
    auto it = std::upper_bound(tilted.grid.begin(), tilted.grid.end(), r0);
    std::size_t i = std::clamp<std::size_t>(std::size_t(it - tilted.grid.begin()), 1,
                                            tilted.grid.size() - 1);
    double t = (r0 - tilted.grid[i - 1]) / (tilted.grid[i] - tilted.grid[i - 1]);
    result.p0_oracle = tilted.cdf[i - 1] + t * (tilted.cdf[i] - tilted.cdf[i - 1]);
    return result;
}

}  // namespace onspin::oracle
