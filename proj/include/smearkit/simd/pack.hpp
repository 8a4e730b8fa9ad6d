// Fixed-width value packs the kernel templates are instantiated over.
// pack<1> wraps a plain double and defines the reference semantics; the
// AVX2 pack mirrors it operation for operation. Both use round-to-nearest
// IEEE doubles with no fused multiply-add, so a kernel instantiated with
// either type produces the same bit pattern for the same inputs.
#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>

#ifdef __AVX2__
#include <immintrin.h>
#endif

namespace smearkit::simd {

// 1.5 * 2^52: adding it to an integral double in [-2^51, 2^51] places that
// integer in the low mantissa bits, so a bit-level subtract recovers it
// without a float-to-int conversion instruction.
inline constexpr double kShifterC = 6755399441055744.0;

template <std::size_t W>
struct pack;

template <>
struct pack<1> {
    static constexpr std::size_t width = 1;
    double v;

    static pack set1(double s) { return {s}; }
    static pack load(const double* p) { return {*p}; }
    static void store(double* p, pack a) { *p = a.v; }

    friend pack operator+(pack a, pack b) { return {a.v + b.v}; }
    friend pack operator-(pack a, pack b) { return {a.v - b.v}; }
    friend pack operator*(pack a, pack b) { return {a.v * b.v}; }

    static pack max(pack a, pack b) { return {a.v > b.v ? a.v : b.v}; }
    static pack min(pack a, pack b) { return {a.v < b.v ? a.v : b.v}; }
    static pack sqrt(pack a) { return {std::sqrt(a.v)}; }
    static pack round_nearest(pack a) { return {std::nearbyint(a.v)}; }

    static pack pow2_from_rounded(pack kd) {
        const std::int64_t ki = std::bit_cast<std::int64_t>(kd.v + kShifterC) -
                                std::bit_cast<std::int64_t>(kShifterC);
        return {std::bit_cast<double>((ki + 1023) << 52)};
    }
};

#ifdef __AVX2__
template <>
struct pack<4> {
    static constexpr std::size_t width = 4;
    __m256d v;

    static pack set1(double s) { return {_mm256_set1_pd(s)}; }
    static pack load(const double* p) { return {_mm256_loadu_pd(p)}; }
    static void store(double* p, pack a) { _mm256_storeu_pd(p, a.v); }

    friend pack operator+(pack a, pack b) { return {_mm256_add_pd(a.v, b.v)}; }
    friend pack operator-(pack a, pack b) { return {_mm256_sub_pd(a.v, b.v)}; }
    friend pack operator*(pack a, pack b) { return {_mm256_mul_pd(a.v, b.v)}; }

    static pack max(pack a, pack b) { return {_mm256_max_pd(a.v, b.v)}; }
    static pack min(pack a, pack b) { return {_mm256_min_pd(a.v, b.v)}; }
    static pack sqrt(pack a) { return {_mm256_sqrt_pd(a.v)}; }
    static pack round_nearest(pack a) {
        return {_mm256_round_pd(a.v,
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC)};
    }

    static pack pow2_from_rounded(pack kd) {
        const __m256d shifter = _mm256_set1_pd(kShifterC);
        const __m256i ki = _mm256_sub_epi64(
            _mm256_castpd_si256(_mm256_add_pd(kd.v, shifter)),
            _mm256_castpd_si256(shifter));
        const __m256i bits =
            _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)),
                              52);
        return {_mm256_castsi256_pd(bits)};
    }
};
#endif

}  // namespace smearkit::simd
