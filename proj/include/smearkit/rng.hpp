// Counter-based random streams (Philox4x32-10, Salmon et al. 2011).
// Every (seed, stream) pair is an independent, reproducible sequence that
// can be created on any thread without shared state, which is what makes
// simulation output independent of the thread count.
#pragma once

#include <array>
#include <cstdint>

namespace smearkit {

// One 128-bit Philox block: 10 rounds over the counter with the key bumped
// between rounds.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// A single stream of draws. The key is the seed; the counter encodes
// (stream id, block index), so streams never overlap and a stream can be
// re-created mid-ensemble at zero cost.
class PathStream {
  public:
    PathStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform on (0, 1]: 53-bit mantissa, never returns 0, so logarithms of
    // the result are always finite.
    double next_uniform();

    // Standard normal via Box-Muller; pairs are generated together and the
    // second draw is cached.
    double next_normal();

    // Gamma(shape, 1) via Marsaglia-Tsang squeeze; shapes below one use the
    // Gamma(shape + 1) boost with a fixed draw order. shape must be > 0.
    double next_gamma(double shape);

  private:
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> block_{};
    int block_pos_ = 4;  // empty
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace smearkit
