// Spin configuration with incrementally maintained total spin.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace onspin::sim {

// n unit vectors in R^N stored row-major, with the total spin S = sum sigma_j
// and |S|^2 cached. The cache is rebuilt from scratch every 10^4 single-spin
// updates to stop floating-point drift.
struct SpinConfiguration {
    int N = 0;
    std::int64_t n = 0;
    std::vector<double> spins;       // n * N
    std::vector<double> total_spin;  // N
    double total_norm2 = 0.0;
    std::int64_t updates_since_refresh = 0;

    static constexpr std::int64_t kRefreshInterval = 10000;

    SpinConfiguration(int N_, std::int64_t n_)
        : N(N_), n(n_), spins(std::size_t(n_) * N_, 0.0), total_spin(N_, 0.0) {}

    std::span<double> spin(std::int64_t i) {
        return {spins.data() + std::size_t(i) * N, std::size_t(N)};
    }
    std::span<const double> spin(std::int64_t i) const {
        return {spins.data() + std::size_t(i) * N, std::size_t(N)};
    }

    // Replace spin i, updating S and |S|^2 in O(N).
    void set_spin(std::int64_t i, std::span<const double> value) {
        auto row = spin(i);
        for (int d = 0; d < N; ++d) {
            total_spin[d] += value[d] - row[d];
            row[d] = value[d];
        }
        double norm2 = 0.0;
        for (int d = 0; d < N; ++d) norm2 += total_spin[d] * total_spin[d];
        total_norm2 = norm2;
        if (++updates_since_refresh >= kRefreshInterval) refresh_cache();
    }

    void refresh_cache() {
        for (int d = 0; d < N; ++d) total_spin[d] = 0.0;
        for (std::int64_t i = 0; i < n; ++i) {
            auto row = spin(i);
            for (int d = 0; d < N; ++d) total_spin[d] += row[d];
        }
        double norm2 = 0.0;
        for (int d = 0; d < N; ++d) norm2 += total_spin[d] * total_spin[d];
        total_norm2 = norm2;
        updates_since_refresh = 0;
    }

    // Max absolute per-coordinate difference between the cache and a fresh sum.
    double cache_residual() const {
        std::vector<double> fresh(N, 0.0);
        for (std::int64_t i = 0; i < n; ++i) {
            auto row = spin(i);
            for (int d = 0; d < N; ++d) fresh[d] += row[d];
        }
        double worst = 0.0;
        for (int d = 0; d < N; ++d) {
            double diff = fresh[d] - total_spin[d];
            if (diff < 0) diff = -diff;
            if (diff > worst) worst = diff;
        }
        return worst;
    }
};

}  // namespace onspin::sim
