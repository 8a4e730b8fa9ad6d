#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "smearkit/rng.hpp"
#include "smearkit/simd/kernels.hpp"

using namespace smearkit;
using namespace smearkit::simd;

namespace {

std::vector<double> random_buffer(std::size_t n, std::uint64_t stream,
                                  double lo, double hi) {
    PathStream s(777, stream);
    std::vector<double> out(n);
    for (double& x : out) x = lo + (hi - lo) * s.next_uniform();
    return out;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("lane tables are wired") {
    CHECK(std::string(scalar_kernels().lane) == "scalar");
    if (const Kernels* wide = avx2_kernels())
        CHECK(std::string(wide->lane) == "avx2");
    const std::string active = active_kernels().lane;
    CHECK((active == "scalar" || active == "avx2"));
}

TEST_CASE("lanes are bit-identical on the step kernels") {
    const Kernels* wide = avx2_kernels();
    if (!wide) return;  // nothing to compare on this machine
    const Kernels& narrow = scalar_kernels();

    CoupledGammaStep cg{0.05 * 0.01, 0.005, std::sqrt(0.01), 2.0, 0.01 / 1.3,
                        std::sqrt(2.0) * std::sqrt(0.01) / 1.3};
    HestonStep hs{0.05 * 0.01, 0.005, std::sqrt(0.01), 2.0, 0.8 * 0.01,
                  0.9 * std::sqrt(0.01)};
    ExactStep ex{0.05 * 0.01};

    // Sizes straddle the vector width, including remainders and n < width.
    for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4},
                          std::size_t{5}, std::size_t{8}, std::size_t{1023}}) {
        // Mixed-sign v so the max(v, 0) clamp is exercised in both lanes.
        const std::vector<double> x0 = random_buffer(n, 1, -1.0, 1.0);
        const std::vector<double> v0 = random_buffer(n, 2, -0.5, 3.0);
        const std::vector<double> z1 = random_buffer(n, 3, -3.0, 3.0);
        const std::vector<double> z2 = random_buffer(n, 4, -3.0, 3.0);
        const std::vector<double> dy = random_buffer(n, 5, 0.0, 0.2);

        {
            std::vector<double> xs = x0, vs = v0, xw = x0, vw = v0;
            narrow.step_coupled_gamma(xs.data(), vs.data(), z1.data(),
                                      z2.data(), n, cg);
            wide->step_coupled_gamma(xw.data(), vw.data(), z1.data(),
                                     z2.data(), n, cg);
            CHECK(bit_equal(xs, xw));
            CHECK(bit_equal(vs, vw));
        }
        {
            std::vector<double> xs = x0, vs = v0, xw = x0, vw = v0;
            narrow.step_heston(xs.data(), vs.data(), z1.data(), z2.data(), n,
                               hs);
            wide->step_heston(xw.data(), vw.data(), z1.data(), z2.data(), n,
                              hs);
            CHECK(bit_equal(xs, xw));
            CHECK(bit_equal(vs, vw));
        }
        {
            std::vector<double> xs = x0, ys = v0, xw = x0, yw = v0;
            narrow.step_exact(xs.data(), ys.data(), dy.data(), z1.data(), n,
                              ex);
            wide->step_exact(xw.data(), yw.data(), dy.data(), z1.data(), n,
                             ex);
            CHECK(bit_equal(xs, xw));
            CHECK(bit_equal(ys, yw));
        }
    }
}

TEST_CASE("vexp lanes agree bitwise") {
    const Kernels* wide = avx2_kernels();
    if (!wide) return;
    for (std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t{4096}}) {
        const std::vector<double> in = random_buffer(n, 9, -700.0, 700.0);
        std::vector<double> a(n), b(n);
        scalar_kernels().vexp(in.data(), a.data(), n);
        wide->vexp(in.data(), b.data(), n);
        CHECK(bit_equal(a, b));
    }
}

TEST_CASE("vexp tracks the libm exponential") {
    const std::size_t n = 20000;
    const std::vector<double> in = random_buffer(n, 13, -700.0, 700.0);
    std::vector<double> out(n);
    scalar_kernels().vexp(in.data(), out.data(), n);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ref = std::exp(in[i]);
        worst = std::max(worst, std::abs(out[i] - ref) / ref);
    }
    CHECK(worst < 2e-13);

    // Inputs beyond the clamp saturate instead of producing inf/0.
    const double big[2] = {800.0, -800.0};
    double clamped[2], edge[2];
    const double at_edge[2] = {700.0, -700.0};
    scalar_kernels().vexp(big, clamped, 2);
    scalar_kernels().vexp(at_edge, edge, 2);
    CHECK(clamped[0] == edge[0]);
    CHECK(clamped[1] == edge[1]);
}
