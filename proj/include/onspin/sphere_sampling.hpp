// Uniform and von Mises-Fisher sampling on S^{N-1}, plus exact vMF moments.
#pragma once

#include <span>
#include <vector>

#include "onspin/rng.hpp"

namespace onspin::sphere {

using Vec = std::vector<double>;

// Concentrations below this are sampled as uniform; the difference is far
// below statistical resolution.
constexpr double kUniformKappaCutoff = 1.0e-8;

struct VmfLaw {
    Vec direction;   // unit vector, length N
    double kappa = 0.0;  // >= 0; zero means the uniform law
    int N = 0;

    VmfLaw(Vec dir, double kappa_, int N_) : direction(std::move(dir)), kappa(kappa_), N(N_) {}
};

// Normalizes an N-vector of independent standard Gaussians (rotation invariant).
void sample_uniform_sphere(int N, rng::RngStream& stream, std::span<double> out);
Vec sample_uniform_sphere(int N, rng::RngStream& stream);

// Draw from density proportional to exp(kappa <x, direction>) on S^{N-1}.
// Radial component by the Ulrich-Wood rejection scheme, tangent direction
// uniform on the orthogonal sphere. Exact (no chain error), O(1) expected
// rejections uniformly in kappa.
void sample_vmf(const VmfLaw& law, rng::RngStream& stream, std::span<double> out);
Vec sample_vmf(const VmfLaw& law, rng::RngStream& stream);

// First and second moments of the vMF law:
//   mean            = f(kappa) r
//   second moment   = (f/kappa)(Id - r r^T) + (1 - (N-1) f/kappa) r r^T
// with trace exactly 1. kappa = 0 gives mean 0 and Id/N.
struct VmfMoments {
    Vec mean;                  // length N
    double radial_second = 0.0;     // E <x, r>^2
    double tangential_second = 0.0; // E <x, u>^2 for unit u perpendicular to r
    std::vector<double> second_moment;  // N x N row-major
};

VmfMoments vmf_moments(const VmfLaw& law);

// Small helpers shared with the dynamics code.
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

}  // namespace onspin::sphere
