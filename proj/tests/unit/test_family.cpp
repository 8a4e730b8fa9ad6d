#include <doctest.h>

#include <cmath>

#include "smearkit/family.hpp"
#include "smearkit/quadrature.hpp"

using namespace smearkit;

TEST_CASE("gamma family validation and mean") {
    CHECK_THROWS_AS(GammaFamily(0.0, 1.0), FamilyError);
    CHECK_THROWS_AS(GammaFamily(-1.0, 1.0), FamilyError);
    CHECK_THROWS_AS(GammaFamily(1.0, -0.5), FamilyError);
    CHECK(GammaFamily(2.0, 3.0).mean() == doctest::Approx(1.5));
}

TEST_CASE("gamma image closed form") {
    const SmearingFamily fam = SmearingFamily::gamma(1.0, 2.0);
    // (1 + xi/(b t))^(-c t) at b=1, c=2, xi=1, t=1.
    CHECK(fam.image(1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(fam.image(3.0, 1.0) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
    CHECK(fam.image(1.0, 2.0) == doctest::Approx(std::pow(1.5, -4.0)).epsilon(1e-14));
    // t = 0 collapses to kappa^xi; gamma has kappa = 1.
    CHECK(fam.kappa() == doctest::Approx(1.0));
    CHECK(fam.image(5.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("custom stationary image") {
    const SmearingFamily fam =
        SmearingFamily::custom("x^2", ImagePolicy::Stationary, 1.0);
    CHECK(fam.image(1.5, 7.0) == doctest::Approx(std::exp(-2.25)).epsilon(1e-14));
    CHECK_FALSE(fam.is_gamma());
    CHECK_THROWS_AS(fam.gamma_params(), FamilyError);
}

TEST_CASE("weight density value and normalization") {
    const GammaFamily f22{2.0, 2.0};
    CHECK(density(f22, 1.0, 1.0) ==
          doctest::Approx(0.5413411329464508).epsilon(1e-13));

    const double combos[][3] = {{1.0, 2.0, 1.0}, {0.5, 1.5, 2.0},
                                {3.0, 0.8, 0.7}, {2.0, 2.0, 4.0},
                                {1.0, 0.4, 1.0}, {5.0, 10.0, 0.3},
                                {0.2, 3.0, 1.7}, {4.0, 8.0, 2.5}};
    for (const auto& bc : combos) {
        const GammaFamily fam{bc[0], bc[1]};
        const double t = bc[2];
        const QuadratureResult norm = integrate_semi_infinite(
            [&](double v) { return density(fam, v, t); }, 0.0);
        CHECK(norm.value == doctest::Approx(1.0).epsilon(1e-10));
        const QuadratureResult mean = integrate_semi_infinite(
            [&](double v) { return v * density(fam, v, t); }, 0.0);
        CHECK(mean.value == doctest::Approx(fam.mean()).epsilon(1e-10));
    }
}

TEST_CASE("functional equation residual") {
    const SmearingFamily fam = SmearingFamily::gamma(1.0, 2.0);
    for (double xi : {0.3, 1.0, 4.0})
        for (double t : {0.5, 1.0, 3.0})
            for (double alpha : {0.5, 1.0, 2.0})
                CHECK(std::abs(functional_equation_residual(fam, xi, t, alpha)) <
                      1e-13);

    // The stationary x^2 control has an O(1) gap: at xi = t = alpha = 1 the
    // image is e^{-xi^2}, so the residual is e^{-2} - e^{-4}.
    const SmearingFamily bad =
        SmearingFamily::custom("x^2", ImagePolicy::Stationary, 1.0);
    CHECK(std::abs(functional_equation_residual(bad, 1.0, 1.0, 1.0)) ==
          doctest::Approx(std::exp(-2.0) - std::exp(-4.0)).epsilon(1e-12));
    CHECK(std::abs(functional_equation_residual(bad, 1.0, 1.0, 1.0)) > 1e-2);
}

TEST_CASE("convolution identity residual") {
    const GammaFamily fam{1.0, 2.0};
    for (double z : {0.5, 1.0, 2.0})
        for (double t : {1.0, 2.0})
            for (double a : {0.5, 2.0})
                CHECK(std::abs(convolution_identity_residual(fam, z, t, a)) <
                      1e-7);
}

TEST_CASE("complete monotonicity probe") {
    const SmearingFamily good = SmearingFamily::gamma(1.0, 2.0);
    CHECK(complete_monotonicity_violation(good, 1.0, 0.01, 20.0, 64) >= -1e-12);
    const SmearingFamily bad =
        SmearingFamily::custom("x^2", ImagePolicy::Stationary, 1.0);
    CHECK(complete_monotonicity_violation(bad, 1.0, 0.01, 20.0, 64) < -1e-2);
}

TEST_CASE("cke pair") {
    CHECK(CkePair(1.0).b_cke == doctest::Approx(0.5));
    CHECK(CkePair(2.0).b_cke == doctest::Approx(2.0 / 3.0));
    CHECK(CkePair(0.25).b_cke == doctest::Approx(0.2));
    CHECK_THROWS_AS(CkePair(0.0), FamilyError);
    CHECK_THROWS_AS(CkePair(-1.0), FamilyError);
}

TEST_CASE("family json loading") {
    const SmearingFamily g =
        load_family_json(R"({"family": "gamma", "b": 2.0, "c": 3.0})");
    CHECK(g.is_gamma());
    CHECK(g.gamma_params().b == doctest::Approx(2.0));
    CHECK(g.gamma_params().c == doctest::Approx(3.0));

    const SmearingFamily c = load_family_json(
        R"({"family": "custom", "F": "x^2", "image": "stationary"})");
    CHECK_FALSE(c.is_gamma());
    CHECK(c.policy() == ImagePolicy::Stationary);

    const SmearingFamily s = load_family_json(
        R"json({"family": "custom", "F": "2*log(1+x)", "image": "scaled"})json");
    CHECK(s.policy() == ImagePolicy::Scaled);
    CHECK(s.image(1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));

    CHECK_THROWS_AS(load_family_json("not json"), FamilyError);
    CHECK_THROWS_AS(load_family_json(R"({"family": "gamma"})"), FamilyError);
    CHECK_THROWS_AS(load_family_json(R"({"family": "nope"})"), FamilyError);
    CHECK_THROWS_AS(
        load_family_json(R"({"family": "custom", "F": "x", "image": "bad"})"),
        FamilyError);
    CHECK_THROWS_AS(load_family_file("/nonexistent/family.json"), FamilyError);
}
