#include "onspin/quadrature.hpp"

#include <cmath>
#include <functional>

#include "onspin/errors.hpp"

namespace onspin::quad {

namespace {

// 15-point Kronrod nodes/weights on [-1, 1] plus the embedded 7-point Gauss rule.
constexpr double kKronrodX[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr double kKronrodW[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kGaussW[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870};

constexpr double kGauss16X[16] = {
    -0.989400934991649932596, -0.944575023073232576078, -0.865631202387831743880,
    -0.755404408355003033895, -0.617876244402643748447, -0.458016777657227386342,
    -0.281603550779258913230, -0.095012509837637440185, 0.095012509837637440185,
    0.281603550779258913230,  0.458016777657227386342,  0.617876244402643748447,
    0.755404408355003033895,  0.865631202387831743880,  0.944575023073232576078,
    0.989400934991649932596};
constexpr double kGauss16W[16] = {
    0.027152459411754094852, 0.062253523938647892863, 0.095158511682492784810,
    0.124628971255533872052, 0.149595988816576732081, 0.169156519395002538189,
    0.182603415044923588867, 0.189450610455068496285, 0.189450610455068496285,
    0.182603415044923588867, 0.169156519395002538189, 0.149595988816576732081,
    0.124628971255533872052, 0.095158511682492784810, 0.062253523938647892863,
    0.027152459411754094852};

struct PanelResult {
    double value;
    double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 15; ++i) {
        double v = f(mid + half * kKronrodX[i]);
        kron += kKronrodW[i] * v;
        if (i % 2 == 1) gauss += kGaussW[i / 2] * v;
    }
    kron *= half;
    gauss *= half;
    return {kron, std::fabs(kron - gauss)};
}

double integrate_recursive(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, int depth) {
    PanelResult r = gk15(f, a, b);
    if (r.error <= abs_tol || b - a < 1e-14 * std::fmax(1.0, std::fabs(a))) return r.value;
    if (depth <= 0)
        throw onspin::numerical_error("adaptive_gauss_kronrod: depth limit reached");
    double mid = 0.5 * (a + b);
    return integrate_recursive(f, a, mid, 0.5 * abs_tol, depth - 1) +
           integrate_recursive(f, mid, b, 0.5 * abs_tol, depth - 1);
}

}  // namespace

double adaptive_gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    return integrate_recursive(f, a, b, abs_tol, max_depth);
}

double gauss16(const std::function<double(double)>& f, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 16; ++i) s += kGauss16W[i] * f(mid + half * kGauss16X[i]);
    return s * half;
}

}  // namespace onspin::quad
