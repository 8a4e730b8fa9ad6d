#include <doctest.h>

#include <cmath>

#include "smearkit/family.hpp"
#include "smearkit/km.hpp"
#include "smearkit/quadrature.hpp"

using namespace smearkit;

namespace {
const GammaFamily kFam{1.0, 2.0};
}

TEST_CASE("closed forms") {
    // K1 = (vbar - v)/t, K2 = c/(2 b^2 t^2); vbar = 2 here.
    CHECK(km_analytic_gamma(1, 1.0, 1.0, kFam) == doctest::Approx(1.0));
    CHECK(km_analytic_gamma(1, 2.0, 1.0, kFam) == doctest::Approx(0.0));
    CHECK(km_analytic_gamma(1, 4.0, 2.0, kFam) == doctest::Approx(-1.0));
    CHECK(km_analytic_gamma(2, 1.0, 1.0, kFam) == doctest::Approx(1.0));
    CHECK(km_analytic_gamma(2, 3.0, 2.0, kFam) == doctest::Approx(0.25));
    CHECK(km_analytic_gamma(2, 1.0, 4.0, kFam) == doctest::Approx(0.0625));
    CHECK_THROWS(km_analytic_gamma(3, 1.0, 1.0, kFam));
}

TEST_CASE("finite-window estimates extrapolate to the closed forms") {
    for (double v : {1.0, 2.0, 4.0}) {
        for (double t : {1.0, 2.0}) {
            for (int n : {1, 2}) {
                const KmEstimate est = km_coefficient_estimate(n, v, t, kFam);
                const double analytic = km_analytic_gamma(n, v, t, kFam);
                const double scale =
                    std::max(std::abs(analytic), kFam.mean() / t);
                CHECK(est.converged);
                CHECK(std::abs(est.value - analytic) / scale < 0.01);
            }
        }
    }
}

TEST_CASE("estimate record is populated") {
    const KmEstimate est = km_coefficient_estimate(1, 1.0, 1.0, kFam);
    CHECK(est.n == 1);
    CHECK(est.v == doctest::Approx(1.0));
    CHECK(est.t == doctest::Approx(1.0));
    CHECK(est.tau_sequence.size() >= 3);
    for (std::size_t i = 1; i < est.tau_sequence.size(); ++i)
        CHECK(est.tau_sequence[i] < est.tau_sequence[i - 1]);
    CHECK(est.extrapolation_error >= 0.0);
}

TEST_CASE("custom window sequence is honored") {
    const KmEstimate est =
        km_coefficient_estimate(2, 2.0, 1.0, kFam, {0.1, 0.05, 0.025});
    CHECK(est.tau_sequence.size() == 3);
    CHECK(std::abs(est.value - km_analytic_gamma(2, 2.0, 1.0, kFam)) < 0.02);
}

TEST_CASE("weight kernel propagates probability") {
    // The forward kernel integrates to one over its destination variable.
    for (double z_prev : {0.5, 1.0, 2.0}) {
        const QuadratureResult mass = integrate_semi_infinite(
            [&](double z) { return omega_kernel(z, 1.3, z_prev, 1.0, kFam); },
            0.0);
        CHECK(mass.converged);
        CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("kernel reproduces the marginal weight flow") {
    for (double z : {0.7, 1.5, 3.0})
        CHECK(std::abs(smearing_consistency_residual(z, 1.4, 1.0, kFam)) < 1e-8);
}

TEST_CASE("fixed-variance price-log coefficients") {
    const HamiltonianSpec spec{0.05};
    const XCoefficients xc = x_process_coefficients(0.04, spec);
    CHECK(xc.drift == doctest::Approx(0.03));
    CHECK(xc.diffusion == doctest::Approx(0.02));
}

TEST_CASE("argument validation") {
    CHECK_THROWS(km_coefficient_estimate(0, 1.0, 1.0, kFam));
    CHECK_THROWS(km_coefficient_estimate(1, -1.0, 1.0, kFam));
    CHECK_THROWS(km_coefficient_estimate(1, 1.0, 0.0, kFam));
}
