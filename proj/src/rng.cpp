#include "smearkit/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace smearkit {

namespace {

constexpr std::uint32_t kW32A = 0x9E3779B9u;
constexpr std::uint32_t kW32B = 0xBB67AE85u;
constexpr std::uint32_t kM4x32A = 0xD2511F53u;
constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                      std::uint32_t& hi) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(product);
    hi = static_cast<std::uint32_t>(product >> 32);
}

inline void one_round(std::array<std::uint32_t, 4>& ctr,
                      const std::array<std::uint32_t, 2>& key) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mul_hi_lo(kM4x32A, ctr[0], lo0, hi0);
    mul_hi_lo(kM4x32B, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        one_round(counter, key);
        if (round < 9) {
            key[0] += kW32A;
            key[1] += kW32B;
        }
    }
    return counter;
}

PathStream::PathStream(std::uint64_t seed, std::uint64_t stream_id)
    : counter_{static_cast<std::uint32_t>(stream_id),
               static_cast<std::uint32_t>(stream_id >> 32), 0u, 0u},
      key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)} {}

std::uint32_t PathStream::next_u32() {
    if (block_pos_ == 4) {
        block_ = philox4x32(counter_, key_);
        block_pos_ = 0;
        if (++counter_[2] == 0) ++counter_[3];
    }
    return block_[block_pos_++];
}

std::uint64_t PathStream::next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
}

double PathStream::next_uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double PathStream::next_normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

double PathStream::next_gamma(double shape) {
    if (!(shape > 0.0))
        throw std::invalid_argument("gamma shape must be positive");
    if (shape < 1.0) {
        // Boost relation: Gamma(a) == Gamma(a + 1) * U^(1/a). The gamma draw
        // happens first; callers relying on reproducibility get a fixed
        // consumption order.
        const double g = next_gamma(shape + 1.0);
        const double u = next_uniform();
        return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, scale;
        do {
            z = next_normal();
            scale = 1.0 + c * z;
        } while (scale <= 0.0);
        const double cube = scale * scale * scale;
        const double u = next_uniform();
        const double z2 = z * z;
        if (u < 1.0 - 0.0331 * z2 * z2) return d * cube;
        if (std::log(u) < 0.5 * z2 + d * (1.0 - cube + std::log(cube)))
            return d * cube;
    }
}

}  // namespace smearkit
