#include "smearkit/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "smearkit/gamma_math.hpp"
#include "smearkit/rng.hpp"
#include "smearkit/simd/kernels.hpp"

namespace smearkit {

namespace {

constexpr std::size_t kBlockPaths = 4096;  // even, so antithetic pairs never
                                           // straddle a block boundary

std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", t);
    return buf;
}

void validate(const SimConfig& cfg) {
    if (!(cfg.b > 0.0) || !(cfg.c > 0.0))
        throw SimError("b and c must be positive");
    if (!(cfg.t0 > 0.0))
        throw SimError(
            "t0 must be positive: the volatility coefficients scale like 1/s "
            "and 1/s^2 and are singular at s = 0");
    if (!(cfg.t_end > cfg.t0)) throw SimError("t_end must exceed t0");
    const double span = cfg.t_end - cfg.t0;
    if (!(cfg.dt > 0.0) || !(cfg.dt < span / 10.0))
        throw SimError("dt must be positive and below (t_end - t0)/10");
    if (cfg.n_paths < 1) throw SimError("n_paths must be at least 1");
    if (!(cfg.rho >= -1.0 && cfg.rho <= 1.0))
        throw SimError("rho must lie in [-1, 1]");
    if (cfg.model == SimModel::Heston) {
        if (!(cfg.gamma_rev > 0.0))
            throw SimError("heston requires gamma_rev > 0");
        if (!(cfg.epsilon >= 0.0)) throw SimError("epsilon must be >= 0");
    }
    if (cfg.antithetic && cfg.n_paths % 2 != 0)
        throw SimError("antithetic sampling needs an even n_paths");
}

struct StepPlan {
    long long n_steps;
    double h;
    std::vector<double> times;          // recorded times on the step grid
    std::vector<long long> rec_steps;   // matching step indices, increasing
};

StepPlan plan_steps(const SimConfig& cfg) {
    StepPlan plan;
    const double span = cfg.t_end - cfg.t0;
    plan.n_steps = std::llround(span / cfg.dt);
    if (plan.n_steps < 1) plan.n_steps = 1;
    plan.h = span / static_cast<double>(plan.n_steps);

    std::vector<double> wanted = cfg.record_times;
    if (wanted.empty()) wanted = {cfg.t0, cfg.t_end};
    double prev = -std::numeric_limits<double>::infinity();
    for (double tau : wanted) {
        if (!(tau > prev))
            throw SimError("record_times must be strictly increasing");
        prev = tau;
        const long long idx = std::llround((tau - cfg.t0) / plan.h);
        const double on_grid = cfg.t0 + static_cast<double>(idx) * plan.h;
        if (idx < 0 || idx > plan.n_steps ||
            std::abs(on_grid - tau) > 1e-9 * std::max(1.0, std::abs(tau)))
            throw SimError("record time " + format_time(tau) +
                           " is not on the step grid");
        plan.rec_steps.push_back(idx);
        plan.times.push_back(on_grid);
    }
    return plan;
}

struct BlockBuffers {
    std::vector<double> x, v, z1, z2;
    std::vector<PathStream> streams;
};

// Advances paths [p0, p1) through all steps, writing recorded snapshots
// into the ensemble (rows are disjoint across blocks).
void run_block(const SimConfig& cfg, const StepPlan& plan,
               const simd::Kernels& kernels, std::size_t p0, std::size_t p1,
               BlockBuffers& buf, PathEnsemble& out) {
    const std::size_t m = p1 - p0;
    const std::size_t nt = plan.times.size();
    const bool anti = cfg.antithetic;
    const bool exact = cfg.model == SimModel::CoupledExact;
    const double vbar = cfg.vbar();
    const double rho_c = std::sqrt(1.0 - cfg.rho * cfg.rho);
    const double h = plan.h;
    const double sqrt_h = std::sqrt(h);

    buf.x.assign(m, cfg.x0);
    buf.v.resize(m);
    buf.z1.resize(m);
    buf.z2.resize(m);
    buf.streams.clear();
    for (std::size_t j = 0; j < m; j += anti ? 2 : 1)
        buf.streams.emplace_back(cfg.seed, static_cast<std::uint64_t>(p0 + j));

    // Initial volatility from the exact marginal at t0. All models consume
    // one Gamma(c t0) draw here; coupled_exact keeps the integrated form
    // y = t0 * v0 in its state.
    for (std::size_t j = 0; j < m; ++j) {
        if (!anti || j % 2 == 0) {
            const double g =
                buf.streams[anti ? j / 2 : j].next_gamma(cfg.c * cfg.t0);
            buf.v[j] = exact ? g / cfg.b : g / (cfg.b * cfg.t0);
        } else {
            buf.v[j] = buf.v[j - 1];
        }
    }

    std::size_t cursor = 0;
    const auto snapshot = [&](long long step) {
        while (cursor < nt && plan.rec_steps[cursor] == step) {
            const double s = plan.times[cursor];
            for (std::size_t j = 0; j < m; ++j) {
                out.x_paths[(p0 + j) * nt + cursor] = buf.x[j];
                const double vrec = exact ? buf.v[j] / s : buf.v[j];
                out.v_paths[(p0 + j) * nt + cursor] = std::max(vrec, 0.0);
            }
            ++cursor;
        }
    };
    snapshot(0);

    const simd::HestonStep heston_p = {cfg.r * h,       0.5 * h, sqrt_h, vbar,
                                       cfg.gamma_rev * h,
                                       cfg.epsilon * sqrt_h};
    const simd::ExactStep exact_p = {cfg.r * h};

    for (long long k = 0; k < plan.n_steps; ++k) {
        if (exact) {
            // z1 holds the Gamma-process increment dY, z2 the normal draw.
            for (std::size_t j = 0; j < m; ++j) {
                if (!anti || j % 2 == 0) {
                    PathStream& st = buf.streams[anti ? j / 2 : j];
                    buf.z1[j] = st.next_gamma(cfg.c * h) / cfg.b;
                    buf.z2[j] = st.next_normal();
                } else {
                    buf.z1[j] = buf.z1[j - 1];
                    buf.z2[j] = -buf.z2[j - 1];
                }
            }
            kernels.step_exact(buf.x.data(), buf.v.data(), buf.z1.data(),
                               buf.z2.data(), m, exact_p);
        } else {
            for (std::size_t j = 0; j < m; ++j) {
                if (!anti || j % 2 == 0) {
                    PathStream& st = buf.streams[anti ? j / 2 : j];
                    const double g1 = st.next_normal();
                    const double g2 = st.next_normal();
                    buf.z1[j] = g1;
                    buf.z2[j] = cfg.rho * g1 + rho_c * g2;
                } else {
                    buf.z1[j] = -buf.z1[j - 1];
                    buf.z2[j] = -buf.z2[j - 1];
                }
            }
            if (cfg.model == SimModel::CoupledGamma) {
                const double s = cfg.t0 + static_cast<double>(k) * h;
                const simd::CoupledGammaStep p = {
                    cfg.r * h,           0.5 * h, sqrt_h, vbar, h / s,
                    std::sqrt(vbar / cfg.b) * sqrt_h / s};
                kernels.step_coupled_gamma(buf.x.data(), buf.v.data(),
                                           buf.z1.data(), buf.z2.data(), m, p);
            } else {
                kernels.step_heston(buf.x.data(), buf.v.data(), buf.z1.data(),
                                    buf.z2.data(), m, heston_p);
            }
        }
        snapshot(k + 1);
    }
}

}  // namespace

const char* to_string(SimModel model) {
    switch (model) {
        case SimModel::CoupledExact: return "coupled_exact";
        case SimModel::CoupledGamma: return "coupled_gamma";
        case SimModel::Heston: return "heston";
    }
    return "?";
}

SimModel sim_model_from_string(const std::string& name) {
    if (name == "coupled_exact") return SimModel::CoupledExact;
    if (name == "coupled_gamma") return SimModel::CoupledGamma;
    if (name == "heston") return SimModel::Heston;
    throw SimError("unknown model '" + name +
                   "' (expected coupled_exact, coupled_gamma, or heston)");
}

std::size_t PathEnsemble::time_index(double at_time) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - at_time) <=
            1e-9 * std::max(1.0, std::abs(at_time)))
            return i;
    throw SimError("time " + format_time(at_time) +
                   " was not recorded by this ensemble");
}

PathEnsemble simulate(const SimConfig& cfg) {
    validate(cfg);
    const StepPlan plan = plan_steps(cfg);
    const simd::Kernels& kernels = simd::active_kernels();

    PathEnsemble out;
    out.config = cfg;
    out.times = plan.times;
    out.x_paths.resize(cfg.n_paths * plan.times.size());
    out.v_paths.resize(cfg.n_paths * plan.times.size());

    const std::size_t n_blocks = (cfg.n_paths + kBlockPaths - 1) / kBlockPaths;
    unsigned threads = cfg.threads == 0
                           ? std::max(1u, std::thread::hardware_concurrency())
                           : cfg.threads;
    threads = static_cast<unsigned>(
        std::min<std::size_t>(threads, n_blocks));

    const auto block_range = [&](std::size_t blk) {
        const std::size_t p0 = blk * kBlockPaths;
        return std::pair<std::size_t, std::size_t>(
            p0, std::min(p0 + kBlockPaths, cfg.n_paths));
    };

    if (threads <= 1) {
        BlockBuffers buf;
        for (std::size_t blk = 0; blk < n_blocks; ++blk) {
            const auto [p0, p1] = block_range(blk);
            run_block(cfg, plan, kernels, p0, p1, buf, out);
        }
        return out;
    }

    std::atomic<std::size_t> next_block{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            BlockBuffers buf;
            try {
                for (;;) {
                    const std::size_t blk =
                        next_block.fetch_add(1, std::memory_order_relaxed);
                    if (blk >= n_blocks) return;
                    const auto [p0, p1] = block_range(blk);
                    run_block(cfg, plan, kernels, p0, p1, buf, out);
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double total = 0.0;
        for (double v : values) total += v;
        return total;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MarginalVReport marginal_v_test(const PathEnsemble& ensemble, double at_time) {
    const std::size_t ti = ensemble.time_index(at_time);
    const double s = ensemble.times[ti];
    const std::size_t n = ensemble.n_paths();
    std::vector<double> column(n);
    for (std::size_t p = 0; p < n; ++p) column[p] = ensemble.v(p, ti);
    const double shape = ensemble.config.c * s;
    const double rate = ensemble.config.b * s;
    const double ks = ks_statistic(
        column, [&](double v) { return gamma_cdf(v, shape, rate); });
    const double threshold = 1.63 / std::sqrt(static_cast<double>(n));
    return {ks, threshold, ks < threshold};
}

MartingaleReport martingale_test(const PathEnsemble& ensemble) {
    const std::size_t n = ensemble.n_paths();
    if (n == 0 || ensemble.times.empty())
        throw SimError("martingale_test needs a nonempty ensemble");
    const std::size_t last = ensemble.n_times() - 1;
    const double horizon = ensemble.times.back() - ensemble.config.t0;
    const double drift = ensemble.config.x0 + ensemble.config.r * horizon;

    // log-sum-exp guard: factor out the largest exponent before averaging.
    std::vector<double> expo(n);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < n; ++p) {
        expo[p] = ensemble.x(p, last) - drift;
        peak = std::max(peak, expo[p]);
    }
    std::vector<double> weights(n);
    for (std::size_t p = 0; p < n; ++p) weights[p] = std::exp(expo[p] - peak);

    // Antithetic pairs are dependent by construction; the estimator's error
    // comes from the independent pair means.
    std::vector<double> samples;
    if (ensemble.config.antithetic) {
        samples.resize(n / 2);
        for (std::size_t j = 0; j < samples.size(); ++j)
            samples[j] = 0.5 * (weights[2 * j] + weights[2 * j + 1]);
    } else {
        samples = std::move(weights);
    }
    const std::size_t ns = samples.size();
    const double mean = pairwise_sum(samples) / static_cast<double>(ns);
    const double ratio = std::exp(peak) * mean;
    if (ns < 2) return {ratio, std::numeric_limits<double>::quiet_NaN(), false};

    std::vector<double> sq(ns);
    for (std::size_t j = 0; j < ns; ++j) {
        const double d = samples[j] - mean;
        sq[j] = d * d;
    }
    const double variance =
        pairwise_sum(sq) / static_cast<double>(ns - 1);
    const double std_err =
        std::exp(peak) * std::sqrt(variance / static_cast<double>(ns));
    return {ratio, std_err, std::abs(ratio - 1.0) < 3.0 * std_err};
}

HestonCorrespondenceReport heston_correspondence_test(double b, double c,
                                                      double r, double t_ref,
                                                      std::size_t n_paths,
                                                      std::uint64_t seed,
                                                      double delta,
                                                      double dt) {
    if (!(t_ref > 0.0) || !(delta > 0.0))
        throw SimError("t_ref and delta must be positive");
    SimConfig cfg;
    cfg.model = SimModel::CoupledGamma;
    cfg.b = b;
    cfg.c = c;
    cfg.r = r;
    cfg.t0 = t_ref;
    cfg.t_end = t_ref + delta;
    cfg.dt = dt;
    cfg.n_paths = n_paths;
    cfg.seed = seed;
    cfg.record_times = {t_ref + delta};

    SimConfig heston_cfg = cfg;
    heston_cfg.model = SimModel::Heston;
    heston_cfg.gamma_rev = 1.0 / t_ref;
    heston_cfg.epsilon = 1.0 / (t_ref * std::sqrt(b));

    // Same seed, same per-path streams, same draw order: the two schemes see
    // identical initial volatilities and Wiener increments, so the KS
    // distance isolates the drift/diffusion replacement.
    const PathEnsemble gamma_run = simulate(cfg);
    const PathEnsemble heston_run = simulate(heston_cfg);

    std::vector<double> xa(n_paths), xb(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
        xa[p] = gamma_run.x(p, 0);
        xb[p] = heston_run.x(p, 0);
    }
    const double ks = ks_two_sample(xa, xb);
    return {t_ref, delta, ks, n_paths};
}

}  // namespace smearkit
