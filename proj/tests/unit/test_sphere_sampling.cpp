#include <doctest.h>

#include <cmath>
#include <numbers>

#include "onspin/quadrature.hpp"
#include "onspin/special_functions.hpp"
#include "onspin/sphere_sampling.hpp"
#include "oracles.hpp"

using namespace onspin;

TEST_CASE("uniform sphere: mean zero, coordinate second moment 1/N") {
    for (int N : {2, 3, 5}) {
        rng::RngStream s = rng::seed_stream(101, N);
        const int m = 100000;
        std::vector<double> mean(N, 0.0);
        double coord2 = 0.0;
        for (int i = 0; i < m; ++i) {
            auto u = sphere::sample_uniform_sphere(N, s);
            CHECK(std::fabs(sphere::norm(u) - 1.0) <= 1e-12);
            for (int d = 0; d < N; ++d) mean[d] += u[d];
            coord2 += u[0] * u[0];
        }
        double se_coord = std::sqrt(1.0 / double(N) / double(m));  // upper bound on sd/sqrt(m)
        for (int d = 0; d < N; ++d) CHECK(std::fabs(mean[d] / m) < 4.0 * se_coord);
        double var2 = 2.0 * (N - 1) / (double(N) * N * (N + 2));  // var of u1^2
        CHECK(std::fabs(coord2 / m - 1.0 / N) < 4.0 * std::sqrt(var2 / m));
    }
}

TEST_CASE("uniform sphere: N=2 angle is uniform (chi-square at 1%)") {
    rng::RngStream s = rng::seed_stream(55, 0);
    const int m = 100000, bins = 20;
    std::vector<int> counts(bins, 0);
    for (int i = 0; i < m; ++i) {
        auto u = sphere::sample_uniform_sphere(2, s);
        double angle = std::atan2(u[1], u[0]) + std::numbers::pi;
        int bin = std::min(bins - 1, int(angle / (2.0 * std::numbers::pi) * bins));
        ++counts[bin];
    }
    double chi2 = 0.0, expected = double(m) / bins;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 36.19);  // chi-square(19) quantile at 0.99
}

TEST_CASE("vmf_moments: trace one, closed-form components") {
    sphere::VmfLaw law({0.0, 0.0, 1.0}, 2.0, 3);
    auto m = sphere::vmf_moments(law);
    double f2 = test_oracle::coth_ratio(2.0);
    CHECK(m.mean[2] == doctest::Approx(f2).epsilon(1e-12));
    CHECK(m.radial_second == doctest::Approx(1.0 - 2.0 * f2 / 2.0).epsilon(1e-12));
    CHECK(m.tangential_second == doctest::Approx(f2 / 2.0).epsilon(1e-12));
    double trace = 0.0;
    for (int i = 0; i < 3; ++i) trace += m.second_moment[i * 3 + i];
    CHECK(trace == doctest::Approx(1.0).epsilon(1e-12));

    // trace stays 1 across kappa and N
    for (int N : {2, 4, 7}) {
        std::vector<double> dir(N, 0.0);
        dir[0] = 1.0;
        for (double kappa : {0.0, 0.3, 5.0, 40.0}) {
            auto mm = sphere::vmf_moments({dir, kappa, N});
            double tr = 0.0;
            for (int i = 0; i < N; ++i) tr += mm.second_moment[i * N + i];
            CHECK(tr == doctest::Approx(1.0).epsilon(1e-11));
        }
    }
}

TEST_CASE("vmf_moments at kappa=0 is the uniform law") {
    auto m = sphere::vmf_moments({{1.0, 0.0, 0.0, 0.0}, 0.0, 4});
    for (double v : m.mean) CHECK(v == 0.0);
    CHECK(m.radial_second == doctest::Approx(0.25));
    CHECK(m.tangential_second == doctest::Approx(0.25));
}

TEST_CASE("sample_vmf: empirical moments match vmf_moments (4 SE)") {
    for (int N : {2, 3, 4}) {
        for (double kappa : {0.5, 2.0, 10.0}) {
            std::vector<double> dir(N, 0.0);
            dir[N - 1] = 1.0;
            sphere::VmfLaw law(dir, kappa, N);
            auto moments = sphere::vmf_moments(law);

            rng::RngStream s = rng::seed_stream(77, uint64_t(N * 100 + int(kappa * 10)));
            const int m = 100000;
            std::vector<double> radial(m), radial2(m), tang(m);
            std::vector<double> x(N);
            for (int i = 0; i < m; ++i) {
                sphere::sample_vmf(law, s, x);
                double t = x[N - 1];
                radial[i] = t;
                radial2[i] = t * t;
                tang[i] = x[0];  // perpendicular coordinate
            }
            double f = sf::bessel_ratio(kappa, N);
            CHECK(std::fabs(test_oracle::mean(radial) - f) <
                  4.0 * test_oracle::standard_error(radial));
            CHECK(std::fabs(test_oracle::mean(radial2) - moments.radial_second) <
                  4.0 * test_oracle::standard_error(radial2));
            CHECK(std::fabs(test_oracle::mean(tang)) < 4.0 * test_oracle::standard_error(tang));
        }
    }
}

TEST_CASE("sample_vmf: kappa=0 delegates to uniform") {
    sphere::VmfLaw law({1.0, 0.0}, 0.0, 2);
    rng::RngStream s = rng::seed_stream(3, 3);
    const int m = 50000;
    double mean_x = 0.0;
    for (int i = 0; i < m; ++i) mean_x += sphere::sample_vmf(law, s)[0];
    CHECK(std::fabs(mean_x / m) < 4.0 * std::sqrt(0.5 / m));
}

TEST_CASE("sample_vmf: rotation equivariance via moments") {
    // sampling along e1 vs along a rotated direction gives the same radial law
    const int N = 3, m = 80000;
    sphere::VmfLaw law_e1({1.0, 0.0, 0.0}, 3.0, N);
    double inv = 1.0 / std::sqrt(3.0);
    sphere::VmfLaw law_rot({inv, inv, inv}, 3.0, N);
    rng::RngStream s1 = rng::seed_stream(8, 1), s2 = rng::seed_stream(8, 2);
    std::vector<double> r1(m), r2(m);
    for (int i = 0; i < m; ++i) {
        auto a = sphere::sample_vmf(law_e1, s1);
        auto b = sphere::sample_vmf(law_rot, s2);
        r1[i] = a[0];
        r2[i] = sphere::dot(b, law_rot.direction);
    }
    double gap = std::fabs(test_oracle::mean(r1) - test_oracle::mean(r2));
    double se = std::hypot(test_oracle::standard_error(r1), test_oracle::standard_error(r2));
    CHECK(gap < 4.0 * se);
}

TEST_CASE("radial second moment equals the surface-measure quadrature (1e-8)") {
    // (A_{N-1}/A_N) int cos^2 sin^{N-2} e^{k cos} dphi over the same without
    // cos^2 equals 1 - (N-1) f(k)/k; A_N = 2 pi^{N/2} / Gamma(N/2).
    for (int N : {2, 3, 4, 6}) {
        for (double kappa : {0.5, 2.0, 10.0}) {
            // scaled by e^{-kappa} so the tolerance is meaningful at kappa=10;
            // the ratio is unchanged
            auto weight = [&](double phi) {
                return std::pow(std::sin(phi), N - 2) * std::exp(kappa * (std::cos(phi) - 1.0));
            };
            double denom = quad::adaptive_gauss_kronrod(weight, 0.0, std::numbers::pi, 1e-12);
            double numer = quad::adaptive_gauss_kronrod(
                [&](double phi) { return std::cos(phi) * std::cos(phi) * weight(phi); }, 0.0,
                std::numbers::pi, 1e-12);
            double closed = 1.0 - (N - 1) * sf::bessel_ratio_over_x(kappa, N);
            CHECK(std::fabs(numer / denom - closed) <= 1e-8);
        }
    }
}

TEST_CASE("surface measure constant A_N") {
    // A_3 = 4 pi, A_2 = 2 pi
    auto area = [](int N) {
        return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
    };
    CHECK(area(3) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-14));
    CHECK(area(2) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-14));
}
