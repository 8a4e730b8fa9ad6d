// Monte Carlo simulation of the coupled (x, v) system and its statistical
// checks. Three schemes share one harness:
//
//   coupled_gamma  Euler-Maruyama on the coupled SDE, volatility driven by
//                  additive noise along the elapsed clock s:
//                      dx = (r - v/2) ds + sqrt(v) dW1
//                      dv = ((vbar - v)/s) ds + (1/s) sqrt(vbar/b) dW2
//   heston         Euler-Maruyama on the mean-reverting square-root model
//                  in log-price form:
//                      dx = (r - v/2) ds + sqrt(v) dW1
//                      dv = gamma_rev (vbar - v) ds + epsilon sqrt(v) dW2
//   coupled_exact  samples the integrated variance Y(s) = s * v(s) as a
//                  Gamma process (independent Gamma(c h, rate b) increments)
//                  and then x by conditional normality:
//                      x += r h - dY/2 + sqrt(dY) Z
//                  This reproduces the smeared marginal of x and the
//                  Gamma(c s, b s) marginal of v = Y/s exactly in law at
//                  every step size.
//
// Both Euler schemes use full truncation: diffusion terms and the x-drift
// evaluate max(v, 0), which keeps E[exp(dx) | v] = exp(r h) exact per step.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace smearkit {

enum class SimModel { CoupledExact, CoupledGamma, Heston };

const char* to_string(SimModel model);
SimModel sim_model_from_string(const std::string& name);

class SimError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SimConfig {
    SimModel model = SimModel::CoupledGamma;
    double b = 1.0;          // Gamma rate parameter
    double c = 2.0;          // Gamma shape-per-time parameter
    double r = 0.0;          // drift rate
    double gamma_rev = 1.0;  // heston mean-reversion speed
    double epsilon = 1.0;    // heston vol-of-vol (0 gives the noise-free ODE)
    double x0 = 0.0;
    double t0 = 1.0;    // start of the elapsed clock; must be > 0 because the
                        // coupled_gamma coefficients carry 1/s and 1/s^2
    double t_end = 2.0;
    double dt = 0.01;   // nominal step; the span is divided into
                        // round(span/dt) equal steps
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    double rho = 0.0;   // corr(W1, W2); ignored by coupled_exact
    bool antithetic = false;  // pairs (2i, 2i+1) share draws, normals negated
    unsigned threads = 1;     // 0 = hardware concurrency
    // Times to record (must lie on the step grid). Empty = {t0, t_end}.
    std::vector<double> record_times;

    double vbar() const { return c / b; }
};

struct PathEnsemble {
    std::vector<double> times;
    std::vector<double> x_paths;  // n_paths x times.size(), row-major
    std::vector<double> v_paths;  // same layout, clamped at 0 when recorded
    SimConfig config;

    std::size_t n_paths() const { return config.n_paths; }
    std::size_t n_times() const { return times.size(); }
    double x(std::size_t path, std::size_t ti) const {
        return x_paths[path * times.size() + ti];
    }
    double v(std::size_t path, std::size_t ti) const {
        return v_paths[path * times.size() + ti];
    }
    // Index of a recorded time (1e-9 match); throws SimError if absent.
    std::size_t time_index(double at_time) const;
};

// Bit-exact for fixed (config, seed) regardless of threads: every path has
// its own counter-based stream and blocks write disjoint rows.
PathEnsemble simulate(const SimConfig& config);

struct MarginalVReport {
    double ks_statistic;
    double threshold;  // 1.63 / sqrt(n_paths)
    bool pass;
};
// Two-sided KS distance of the recorded v column at at_time against
// Gamma(shape c*s, rate b*s).
MarginalVReport marginal_v_test(const PathEnsemble& ensemble, double at_time);

struct MartingaleReport {
    double ratio;    // sample mean of exp(x_T - x0 - r (T - t0))
    double std_err;
    bool pass;       // |ratio - 1| < 3 std_err
};
MartingaleReport martingale_test(const PathEnsemble& ensemble);

struct HestonCorrespondenceReport {
    double t_ref;
    double delta;          // window length simulated past t_ref
    double ks_terminal_x;  // two-sample KS, coupled_gamma vs heston
    std::size_t n_paths;
};
// Simulates coupled_gamma on [t_ref, t_ref + delta] and heston with
// gamma_rev = 1/t_ref, epsilon = 1/(t_ref sqrt(b)) from the same seed, so
// initial volatilities and Wiener increments match path for path. The KS
// distance between the terminal x samples shrinks as t_ref grows.
HestonCorrespondenceReport heston_correspondence_test(
    double b, double c, double r, double t_ref, std::size_t n_paths,
    std::uint64_t seed, double delta = 1.0, double dt = 0.01);

// Fixed-order pairwise reduction; used for all ensemble accumulations so
// results do not depend on scheduling.
double pairwise_sum(std::span<const double> values);

}  // namespace smearkit
