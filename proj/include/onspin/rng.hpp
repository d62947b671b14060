// Counter-based random streams (Philox 4x32-10) for reproducible parallel runs.
//
// A stream is addressed by (master_seed, stream_id). Streams with the same
// master seed but different ids are statistically independent, and a stream's
// output depends only on its address and draw index, never on thread timing.
#pragma once

#include <array>
#include <cstdint>

namespace onspin::rng {

// One Philox 4x32-10 block: 4 output words from a 128-bit counter + 64-bit key.
std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& counter,
                                   const std::array<uint32_t, 2>& key);

class RngStream {
  public:
    RngStream(uint64_t master_seed, uint64_t stream_id);

    uint32_t next_u32();
    uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double uniform();

    // Uniform on {0, ..., bound-1}; bound > 0. Unbiased via rejection.
    uint64_t uniform_below(uint64_t bound);

    // Standard normal via Marsaglia polar (pair cached).
    double normal();

    uint64_t master_seed() const { return master_seed_; }
    uint64_t stream_id() const { return stream_id_; }

  private:
    void refill();

    uint64_t master_seed_;
    uint64_t stream_id_;
    uint64_t block_;
    std::array<uint32_t, 4> buffer_{};
    int buffer_pos_;
    double cached_normal_;
    bool has_cached_normal_;
};

// Stream factory used by the experiment runner: one stream per chain.
RngStream seed_stream(uint64_t master_seed, uint64_t chain_id);

// Algorithm identification placed in output headers.
constexpr const char* kAlgorithmName = "philox4x32-10";

}  // namespace onspin::rng
