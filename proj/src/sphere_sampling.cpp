#include "onspin/sphere_sampling.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "onspin/errors.hpp"
#include "onspin/special_functions.hpp"

namespace onspin::sphere {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) {
    return std::sqrt(dot(a, a));
}

void sample_uniform_sphere(int N, rng::RngStream& stream, std::span<double> out) {
    while (true) {
        double norm2 = 0.0;
        for (int d = 0; d < N; ++d) {
            out[d] = stream.normal();
            norm2 += out[d] * out[d];
        }
        if (norm2 > 1e-24) {
            double inv = 1.0 / std::sqrt(norm2);
            for (int d = 0; d < N; ++d) out[d] *= inv;
            return;
        }
    }
}

Vec sample_uniform_sphere(int N, rng::RngStream& stream) {
    Vec out(N);
    sample_uniform_sphere(N, stream, out);
    return out;
}

namespace {

// Beta((N-1)/2, (N-1)/2) via the first coordinate of a uniform point on
// S^{N-1}: (1 + u_1)/2 has exactly that law.
double sample_symmetric_beta(int N, rng::RngStream& stream, std::span<double> scratch) {
    sample_uniform_sphere(N, stream, scratch);
    return 0.5 * (1.0 + scratch[0]);
}

}  // namespace

void sample_vmf(const VmfLaw& law, rng::RngStream& stream, std::span<double> out) {
    const int N = law.N;
    if (law.kappa < 0.0) throw std::domain_error("sample_vmf: kappa must be >= 0");
    if (law.kappa < kUniformKappaCutoff) {
        sample_uniform_sphere(N, stream, out);
        return;
    }

    const double kappa = law.kappa;
    const double d = double(N - 1);
    const double b = d / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + d * d));
    const double x0 = (1.0 - b) / (1.0 + b);
    const double c = kappa * x0 + d * std::log(1.0 - x0 * x0);

    std::vector<double> scratch(N);
    double t;
    while (true) {
        double z = sample_symmetric_beta(N, stream, scratch);
        double u = stream.uniform();
        t = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        if (kappa * t + d * std::log(1.0 - x0 * t) - c >= std::log(u)) break;
    }

    // tangent direction: Gaussian vector projected off the mean direction
    std::span<const double> mu(law.direction);
    double tang2;
    do {
        for (int i = 0; i < N; ++i) scratch[i] = stream.normal();
        double along = dot(scratch, mu);
        for (int i = 0; i < N; ++i) scratch[i] -= along * mu[i];
        tang2 = dot(scratch, scratch);
    } while (tang2 < 1e-24);

    double tang_scale = std::sqrt(std::fmax(0.0, 1.0 - t * t) / tang2);
    for (int i = 0; i < N; ++i) out[i] = t * mu[i] + tang_scale * scratch[i];

    // remove accumulated rounding from the unit-norm invariant
    double inv = 1.0 / norm(std::span<const double>(out.data(), out.size()));
    for (int i = 0; i < N; ++i) out[i] *= inv;
}

Vec sample_vmf(const VmfLaw& law, rng::RngStream& stream) {
    Vec out(law.N);
    sample_vmf(law, stream, out);
    return out;
}

VmfMoments vmf_moments(const VmfLaw& law) {
    const int N = law.N;
    VmfMoments m;
    m.mean.assign(N, 0.0);
    m.second_moment.assign(std::size_t(N) * N, 0.0);
    if (law.kappa < kUniformKappaCutoff) {
        m.radial_second = 1.0 / N;
        m.tangential_second = 1.0 / N;
        for (int i = 0; i < N; ++i) m.second_moment[std::size_t(i) * N + i] = 1.0 / N;
        return m;
    }
    double f = sf::bessel_ratio(law.kappa, N);
    double f_over_k = sf::bessel_ratio_over_x(law.kappa, N);
    m.tangential_second = f_over_k;
    m.radial_second = 1.0 - (N - 1) * f_over_k;
    for (int i = 0; i < N; ++i) {
        m.mean[i] = f * law.direction[i];
        for (int j = 0; j < N; ++j) {
            double rr = law.direction[i] * law.direction[j];
            m.second_moment[std::size_t(i) * N + j] =
                (i == j ? f_over_k : 0.0) + (m.radial_second - m.tangential_second) * rr;
        }
    }
    return m;
}

}  // namespace onspin::sphere
