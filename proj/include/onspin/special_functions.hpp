// Modified Bessel ratio f(x) = I_{N/2}(x) / I_{N/2-1}(x), its derivatives,
// and machine verification of the inequalities the model analysis relies on.
#pragma once

#include <string>
#include <vector>

namespace onspin::sf {

// Largest supported argument for bessel_ratio. The continued fraction needs
// O(x) terms, so very large x is rejected instead of silently stalling.
constexpr double kMaxRatioArgument = 1.0e4;

// f(x) = I_{N/2}(x) / I_{N/2-1}(x), evaluated by a Gauss-type continued
// fraction (modified Lentz) with a series branch below x = 1e-4. Never forms
// the two Bessel values separately, so there is no overflow at large x.
// Throws std::domain_error for x <= 0, std::overflow_error for x > 1e4.
double bessel_ratio(double x, int N);

// f(x)/x, stable near x = 0 (limit 1/N).
double bessel_ratio_over_x(double x, int N);

// f'(x) = 1 - (N-1) f(x)/x - f(x)^2. Lies in (0, 1/(N-1)).
double bessel_ratio_deriv(double x, int N);

// (x f(x))'' = 2 f'(x) + x f''(x), in the cancellation-free form
// 2f' + (N-1)(f/x - f') - 2 x f f'. Bounded by 6 in absolute value.
double g_second_deriv(double x, int N);

// (f(x)/x)' = (f'(x) - f(x)/x) / x.  Strictly negative, > -5/(N-1).
double ratio_over_x_deriv(double x, int N);

// All ratio-related values at one argument (single continued-fraction call).
struct RatioEval {
    double x = 0.0;
    int N = 0;
    double f = 0.0;                  // f(x)
    double f_over_x = 0.0;           // f(x)/x
    double f_prime = 0.0;            // f'(x)
    double g_second = 0.0;           // (x f)''
    double ratio_over_x_prime = 0.0; // (f/x)'
};

RatioEval evaluate_ratio(double x, int N);

// One inequality checked over a grid: its minimum slack and where it occurs.
struct BoundCheck {
    std::string name;
    double min_slack = 0.0;
    double argmin_x = 0.0;
    bool pass = false;
};

struct BoundReport {
    int N = 0;
    std::vector<BoundCheck> checks;
    bool pass = false;
};

// Slack below which an inequality is considered violated. Absorbs rounding
// at bound-attaining limits (x -> 0, x -> infinity).
constexpr double kBoundSlackTolerance = 1.0e-12;

// Evaluates five inequalities at every grid point:
//   0 < f'(x) < 1/(N-1)              (derivative window)
//   |(x f(x))''| < 6                 (second-derivative bound)
//   -5/(N-1) < (f(x)/x)' < 0         (ratio-over-x window)
//   0 < f'(x) < f(x)/x               (Amos)
//   (1/x)(1 - N f(x)/x) > -4/(N-1)   (Nasell)
// Grid must be nonempty with all entries > 0.
BoundReport verify_lemma_bounds(int N, const std::vector<double>& grid);

// Log-spaced grid helper (inclusive endpoints), used by the bound checker.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

}  // namespace onspin::sf
