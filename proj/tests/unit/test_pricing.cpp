#include <doctest.h>

#include <cmath>

#include "smearkit/family.hpp"
#include "smearkit/pricing.hpp"
#include "smearkit/sim.hpp"

using namespace smearkit;

namespace {

// Tails of e^{2x} stay integrable at b = 4 (both price-log tail exponents
// clear the payoff growth), so this is the pricing workhorse family.
const GammaFamily kFam{4.0, 8.0};

OptionSpec make_option(double strike, double maturity, double rate,
                       OptionKind kind) {
    OptionSpec opt;
    opt.strike = strike;
    opt.maturity = maturity;
    opt.spot = 1.0;
    opt.rate = rate;
    opt.kind = kind;
    return opt;
}

SimConfig mc_config(double b, double c, std::size_t n_paths,
                    std::uint64_t seed) {
    SimConfig cfg;
    cfg.model = SimModel::CoupledExact;
    cfg.b = b;
    cfg.c = c;
    cfg.t0 = 0.1;
    cfg.dt = 0.005;
    cfg.n_paths = n_paths;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("put-call parity") {
    for (double strike : {0.8, 1.0, 1.3}) {
        const double call = price_fourier(
            make_option(strike, 1.0, 0.05, OptionKind::Call), kFam);
        const double put = price_fourier(
            make_option(strike, 1.0, 0.05, OptionKind::Put), kFam);
        const double forward = 1.0 - strike * std::exp(-0.05);
        CHECK(call - put == doctest::Approx(forward).epsilon(1e-9));
        CHECK(std::abs(call - put - forward) < 1e-6);
    }
}

TEST_CASE("zero strike degenerates to the spot") {
    const double c =
        price_fourier(make_option(0.0, 1.0, 0.05, OptionKind::Call), kFam);
    CHECK(c == doctest::Approx(1.0).epsilon(1e-9));
    const double p =
        price_fourier(make_option(0.0, 1.0, 0.05, OptionKind::Put), kFam);
    CHECK(std::abs(p) < 1e-12);
}

TEST_CASE("call prices are monotone and convex in strike") {
    double prev = 1e300;
    std::vector<double> prices;
    for (double strike : {0.7, 0.85, 1.0, 1.15, 1.3}) {
        const double c = price_fourier(
            make_option(strike, 1.0, 0.05, OptionKind::Call), kFam);
        CHECK(c < prev);
        CHECK(c > 0.0);
        prices.push_back(c);
        prev = c;
    }
    for (std::size_t i = 1; i + 1 < prices.size(); ++i)
        CHECK(prices[i - 1] + prices[i + 1] - 2.0 * prices[i] >= -1e-8);
}

TEST_CASE("fourier versus monte carlo") {
    const OptionSpec opt = make_option(1.0, 1.0, 0.05, OptionKind::Call);
    const double fourier = price_fourier(opt, kFam);
    const McPrice mc = price_mc(opt, mc_config(4.0, 8.0, 40000, 3));
    CHECK(mc.std_err > 0.0);
    CHECK(std::abs(fourier - mc.price) < 3.0 * mc.std_err);
}

TEST_CASE("monte carlo error shrinks as sqrt(n)") {
    const OptionSpec opt = make_option(1.0, 1.0, 0.05, OptionKind::Call);
    const McPrice small = price_mc(opt, mc_config(4.0, 8.0, 10000, 5));
    const McPrice large = price_mc(opt, mc_config(4.0, 8.0, 40000, 5));
    CHECK(small.std_err / large.std_err == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("antithetic pairing is unbiased and tightens the estimate") {
    const OptionSpec opt = make_option(1.0, 1.0, 0.05, OptionKind::Call);
    SimConfig cfg = mc_config(4.0, 8.0, 40000, 7);
    cfg.antithetic = true;
    const McPrice anti = price_mc(opt, cfg);
    const double fourier = price_fourier(opt, kFam);
    CHECK(std::abs(fourier - anti.price) < 3.0 * anti.std_err);
    const McPrice plain = price_mc(opt, mc_config(4.0, 8.0, 40000, 7));
    CHECK(anti.std_err < plain.std_err);
}

TEST_CASE("sharp-weight limit reproduces the gaussian-kernel price") {
    // c -> infinity pins v at vbar = 2; the reference value is the
    // fixed-variance kernel priced on the same contract.
    const GammaFamily sharp{5000.0, 10000.0};
    const OptionSpec opt = make_option(1.0, 1.0, 0.05, OptionKind::Call);
    const double smeared = price_fourier(opt, sharp);

    // Black-Scholes with sigma^2 = 2, T = 1, r = 0.05.
    const double sigma = std::sqrt(2.0);
    const double d1 = (std::log(1.0 / opt.strike) +
                       (0.05 + 0.5 * sigma * sigma)) / sigma;
    const double d2 = d1 - sigma;
    const auto Phi = [](double z) {
        return 0.5 * std::erfc(-z / std::sqrt(2.0));
    };
    const double bs = Phi(d1) - opt.strike * std::exp(-0.05) * Phi(d2);
    CHECK(smeared == doctest::Approx(bs).epsilon(2e-4));
}

TEST_CASE("maturity grows the time value") {
    const double short_t = price_fourier(
        make_option(1.0, 0.5, 0.05, OptionKind::Call), kFam);
    const double long_t = price_fourier(
        make_option(1.0, 2.0, 0.05, OptionKind::Call), kFam);
    CHECK(long_t > short_t);
}

TEST_CASE("contract validation") {
    CHECK_THROWS_AS(price_fourier(make_option(-1.0, 1.0, 0.0, OptionKind::Call),
                                  kFam),
                    PricingError);
    CHECK_THROWS_AS(price_fourier(make_option(1.0, 0.0, 0.0, OptionKind::Call),
                                  kFam),
                    PricingError);
    OptionSpec bad_spot = make_option(1.0, 1.0, 0.0, OptionKind::Call);
    bad_spot.spot = 0.0;
    CHECK_THROWS_AS(price_fourier(bad_spot, kFam), PricingError);
}
