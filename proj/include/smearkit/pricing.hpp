// European option pricing two independent ways: discounted payoff
// expectation over the Fourier-inverted density, and Monte Carlo over
// simulated paths. The two routes share no numerics past the model
// parameters, which is what makes their agreement a meaningful check.
#pragma once

#include <stdexcept>

#include "smearkit/family.hpp"
#include "smearkit/sim.hpp"

namespace smearkit {

enum class OptionKind { Call, Put };

struct OptionSpec {
    double strike = 1.0;    // zero is allowed (degenerate forward payoff)
    double maturity = 1.0;
    double spot = 1.0;
    double rate = 0.0;
    OptionKind kind = OptionKind::Call;
};

class PricingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// exp(-r T) * E[payoff(spot * e^x)] with x the log-return over the maturity
// window, integrated over the closed-form density grid. The grid widens
// geometrically until the payoff-weighted tail estimate drops below 1e-9 of
// the price; PricingError if the cap is reached first.
double price_fourier(const OptionSpec& opt, const GammaFamily& family);

struct McPrice {
    double price;
    double std_err;
};

// Discounted sample mean of the payoff. `sim` supplies the scheme, Gamma
// parameters, step size, path count, and seed; the option's rate and
// maturity override sim.r and set t_end = t0 + maturity. With antithetic
// sampling the standard error is computed over independent pair means.
McPrice price_mc(const OptionSpec& opt, const SimConfig& sim);

}  // namespace smearkit
