#include <doctest.h>

#include <cmath>

#include "onspin/errors.hpp"
#include "onspin/model_constants.hpp"
#include "onspin/special_functions.hpp"
#include "oracles.hpp"

using namespace onspin;

TEST_CASE("solve_b matches the closed-form bisection oracle (N=3, beta=5)") {
    double b = model::solve_b(3, 5.0);
    CHECK(b == doctest::Approx(test_oracle::solve_b_closed_form(5.0)).epsilon(1e-10));
    CHECK(b == doctest::Approx(3.62940993595600).epsilon(1e-6));
    CHECK(std::fabs(b - 5.0 * sf::bessel_ratio(b, 3)) <= 1e-12 * std::fmax(1.0, b));
}

TEST_CASE("solve_b residual criterion holds across a parameter grid") {
    for (int N : {2, 3, 4, 6, 10}) {
        for (double mult : {1.02, 1.3, 2.0, 4.0}) {
            double beta = N * mult;
            double b = model::solve_b(N, beta);
            CHECK(std::fabs(b - beta * sf::bessel_ratio(b, N)) <= 1e-12 * std::fmax(1.0, b));
        }
    }
}

TEST_CASE("solve_b rejects the subcritical phase") {
    CHECK_THROWS_AS(model::solve_b(2, 1.5), config_error);
    CHECK_THROWS_AS(model::solve_b(3, 3.0), config_error);
}

TEST_CASE("solve_b root vanishes as beta drops to N and grows with beta") {
    // root -> 0 as beta -> N+
    CHECK(model::solve_b(3, 3.0001) < 0.05);
    double prev = 0.0;
    for (double beta : {3.1, 3.5, 4.0, 5.0, 7.0, 12.0}) {
        double b = model::solve_b(3, beta);
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("variance_B2 at the reference point") {
    double b = model::solve_b(3, 5.0);
    double B2 = model::variance_B2(3, 5.0, b);
    CHECK(B2 == doctest::Approx(0.874520662178670).epsilon(1e-6));
    // bracket form vs f'(b) form
    double fp = sf::bessel_ratio_deriv(b, 3);
    double alt = 4.0 * 25.0 * fp / ((1.0 - 5.0 * fp) * b * b);
    CHECK(std::fabs(B2 - alt) <= 1e-10 * B2);
}

TEST_CASE("variance_B2 two routes agree over a (N, beta) grid") {
    for (int N : {2, 3, 4, 7, 10}) {
        for (double mult : {1.05, 1.5, 2.5, 4.0}) {
            double beta = N * mult;
            double b = model::solve_b(N, beta);
            double B2 = model::variance_B2(N, beta, b);
            double fp = sf::bessel_ratio_deriv(b, N);
            double alt = 4.0 * beta * beta * fp / ((1.0 - beta * fp) * b * b);
            CHECK(B2 > 0.0);
            CHECK(std::fabs(B2 - alt) <= 1e-10 * B2);
        }
    }
}

TEST_CASE("variance_B2 near-critical stays finite") {
    double b = model::solve_b(3, 3.05);
    double B2 = model::variance_B2(3, 3.05, b);
    CHECK(B2 > 0.0);
    CHECK(std::isfinite(B2));
}

TEST_CASE("variance_B2 detects an inconsistent fixed point") {
    CHECK_THROWS_AS(model::variance_B2(3, 5.0, 2.0), numerical_error);
}

TEST_CASE("pair lambda value and range") {
    model::ModelParams params{3, 5.0, 100};
    auto derived = model::DerivedConstants::solve(params);
    CHECK(derived.lambda == doctest::Approx(0.0063451).epsilon(0).scale(1).epsilon(2e-5 / 0.0063));
    CHECK(model::pair_lambda(params, derived) == derived.lambda);

    model::ModelParams one{3, 5.0, 1};
    auto d1 = model::DerivedConstants::solve(one);
    CHECK(d1.lambda == doctest::Approx(0.634523296643).epsilon(1e-9));
    CHECK(d1.lambda > 0.0);
    CHECK(d1.lambda < 1.0);

    // lambda monotone in 1/n
    double prev = 1.0;
    for (std::int64_t n : {2, 8, 64, 1024}) {
        auto d = model::DerivedConstants::solve({3, 5.0, n});
        CHECK(d.lambda < prev);
        prev = d.lambda;
    }
}

TEST_CASE("delta_cap scales exactly like n^{-1/2}") {
    auto d1 = model::DerivedConstants::solve({3, 5.0, 100});
    auto d4 = model::DerivedConstants::solve({3, 5.0, 400});
    CHECK(d1.delta_cap == doctest::Approx(0.759150622258).epsilon(1e-9));
    CHECK(d1.delta_cap / d4.delta_cap == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("hamiltonian on hand-built configurations") {
    model::ModelParams params{3, 5.0, 3};

    sim::SpinConfiguration all_equal(3, 3);
    for (int i = 0; i < 3; ++i) all_equal.spin(i)[0] = 1.0;
    all_equal.refresh_cache();
    CHECK(model::hamiltonian(all_equal) == doctest::Approx(-1.5).epsilon(1e-14));

    sim::SpinConfiguration antipodal(3, 2);
    antipodal.spin(0)[0] = 1.0;
    antipodal.spin(1)[0] = -1.0;
    antipodal.refresh_cache();
    CHECK(model::hamiltonian(antipodal) == doctest::Approx(0.0).scale(1).epsilon(1e-14));

    sim::SpinConfiguration orthogonal(3, 3);
    orthogonal.spin(0)[0] = 1.0;
    orthogonal.spin(1)[1] = 1.0;
    orthogonal.spin(2)[2] = 1.0;
    orthogonal.refresh_cache();
    CHECK(model::hamiltonian(orthogonal) == doctest::Approx(-0.5).epsilon(1e-14));

    // equals the double sum
    double double_sum = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            auto si = orthogonal.spin(i), sj = orthogonal.spin(j);
            for (int d = 0; d < 3; ++d) double_sum += si[d] * sj[d];
        }
    CHECK(std::fabs(model::hamiltonian(orthogonal) - (-double_sum / 6.0)) <= 1e-10);
}

TEST_CASE("w_statistic special values") {
    model::ModelParams params{3, 5.0, 100};
    auto derived = model::DerivedConstants::solve(params);

    sim::SpinConfiguration aligned(3, 100);
    for (int i = 0; i < 100; ++i) aligned.spin(i)[0] = 1.0;
    aligned.refresh_cache();
    CHECK(model::w_statistic(aligned, params, derived) ==
          doctest::Approx(8.97876555645).epsilon(1e-3 / 9.0));

    // |S| = n b / beta gives exactly 0
    double target = 100.0 * derived.b / 5.0;
    CHECK(model::w_statistic_from_norm2(target * target, params, derived) ==
          doctest::Approx(0.0).scale(1).epsilon(1e-12));

    // S = 0 gives -sqrt(n)
    CHECK(model::w_statistic_from_norm2(0.0, params, derived) == doctest::Approx(-10.0));
}

TEST_CASE("near-critical flag") {
    CHECK(model::DerivedConstants::solve({3, 3.05, 10}).near_critical);
    CHECK_FALSE(model::DerivedConstants::solve({3, 5.0, 10}).near_critical);
}
