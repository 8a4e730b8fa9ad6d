#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "smearkit/gamma_math.hpp"
#include "smearkit/rng.hpp"

using namespace smearkit;

TEST_CASE("philox known-answer vectors") {
    CHECK(philox4x32({0u, 0u, 0u, 0u}, {0u, 0u}) ==
          std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu,
                                       0x9b00dbd8u});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                     {0xa4093822u, 0x299f31d0u}) ==
          std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u,
                                       0x24126ea1u});
    CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                     {0xffffffffu, 0xffffffffu}) ==
          std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u,
                                       0x6d5451fdu});
}

TEST_CASE("stream words follow the block layout") {
    // seed 0, stream 0: counter {0,0,0,0}, key {0,0}; the first four u32
    // draws are exactly the zero-vector block.
    PathStream s(0, 0);
    CHECK(s.next_u32() == 0x6627e8d5u);
    CHECK(s.next_u32() == 0xe169c58du);
    CHECK(s.next_u32() == 0xbc57ac4cu);
    CHECK(s.next_u32() == 0x9b00dbd8u);

    PathStream t(0, 0);
    const std::uint64_t lo = 0x6627e8d5u, hi = 0xe169c58du;
    CHECK(t.next_u64() == (lo | (hi << 32)));
}

TEST_CASE("streams are deterministic and distinct") {
    PathStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    bool differs_c = false, differs_d = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t x = a.next_u64();
        CHECK(x == b.next_u64());
        differs_c = differs_c || (x != c.next_u64());
        differs_d = differs_d || (x != d.next_u64());
    }
    CHECK(differs_c);
    CHECK(differs_d);
}

TEST_CASE("uniforms live in (0, 1] and pass a KS test") {
    PathStream s(2024, 0);
    const std::size_t n = 100000;
    std::vector<double> u(n);
    double mean = 0.0;
    for (double& x : u) {
        x = s.next_uniform();
        CHECK(x > 0.0);
        CHECK(x <= 1.0);
        mean += x;
    }
    mean /= double(n);
    CHECK(std::abs(mean - 0.5) < 3.0 / std::sqrt(12.0 * n));
    const double d = ks_statistic(u, [](double x) { return x; });
    CHECK(d < 1.63 / std::sqrt(double(n)));
}

TEST_CASE("normals pass a KS test") {
    PathStream s(5, 3);
    const std::size_t n = 50000;
    std::vector<double> z(n);
    for (double& x : z) x = s.next_normal();
    const double d = ks_statistic(z, [](double x) {
        return 0.5 * std::erfc(-x / std::sqrt(2.0));
    });
    CHECK(d < 1.63 / std::sqrt(double(n)));
}

TEST_CASE("gamma draws pass a KS test for both shape regimes") {
    for (double shape : {2.5, 0.7}) {
        PathStream s(11, 1);
        const std::size_t n = 30000;
        std::vector<double> g(n);
        for (double& x : g) {
            x = s.next_gamma(shape);
            CHECK(x > 0.0);
        }
        const double d = ks_statistic(
            g, [&](double x) { return gamma_cdf(x, shape, 1.0); });
        CHECK(d < 1.63 / std::sqrt(double(n)));
    }
}

TEST_CASE("parallel streams are uncorrelated") {
    PathStream a(99, 0), b(99, 1);
    const std::size_t n = 20000;
    double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = a.next_uniform(), y = b.next_uniform();
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double rho = cov / std::sqrt((sxx / n - (sx / n) * (sx / n)) *
                                       (syy / n - (sy / n) * (sy / n)));
    CHECK(std::abs(rho) < 0.03);
}

TEST_CASE("invalid gamma shape is rejected") {
    PathStream s(1, 0);
    CHECK_THROWS_AS(s.next_gamma(0.0), std::invalid_argument);
    CHECK_THROWS_AS(s.next_gamma(-2.0), std::invalid_argument);
}
