// Adaptive Gauss-Kronrod (7/15) quadrature for smooth 1-D integrands.
#pragma once

#include <functional>

namespace onspin::quad {

// Integrates f over [a, b] to the given absolute tolerance by recursive
// bisection on the Kronrod error estimate. Throws numerical_error when the
// recursion depth limit is hit before the tolerance is met.
double adaptive_gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, int max_depth = 30);

// Fixed-order Gauss-Legendre panel (16 nodes) over [a, b].
double gauss16(const std::function<double(double)>& f, double a, double b);

}  // namespace onspin::quad
