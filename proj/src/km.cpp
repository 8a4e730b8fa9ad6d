#include "smearkit/km.hpp"

#include <cmath>

#include "smearkit/gamma_math.hpp"

namespace smearkit {

double omega_kernel(double z, double t, double z_prev, double t_prev,
                    const GammaFamily& family) {
    if (!(t > t_prev && t_prev > 0.0))
        throw std::domain_error("omega_kernel requires t > t_prev > 0");
    if (z < 0.0) return 0.0;
    const double dt = t - t_prev;
    const double u = (t * z - t_prev * z_prev) / dt;
    if (u < 0.0) return 0.0;
    if (u == 0.0) {
        // Left-continuous at the support edge: 0 unless the weight density
        // has a finite positive limit there (shape exactly 1).
        return (family.c * dt == 1.0) ? (t / dt) * family.b * dt : 0.0;
    }
    return (t / dt) * gamma_pdf(u, family.c * dt, family.b * dt);
}

double OmegaKernel::operator()(double z, double t, double z_prev,
                               double t_prev) const {
    return omega_kernel(z, t, z_prev, t_prev, family);
}

double smearing_consistency_residual(double z, double t, double t_prev,
                                     const GammaFamily& family,
                                     const QuadratureConfig& quad) {
    if (!(t > t_prev && t_prev > 0.0))
        throw std::domain_error("smearing_consistency_residual requires "
                                "t > t_prev > 0");
    const double lhs = density(family, z, t);

    // theta support: z' < t z / t_prev; beyond the weight's far quantile the
    // integrand is negligible either way.
    const double support_hi = t * z / t_prev;
    const double q_hi =
        gamma_quantile(1.0 - 1e-14, family.c * t_prev, family.b * t_prev);
    const double hi = std::min(support_hi, q_hi);

    auto integrand = [&](double zp) {
        return gamma_pdf(zp, family.c * t_prev, family.b * t_prev) *
               omega_kernel(z, t, zp, t_prev, family);
    };
    QuadratureResult r = integrate(integrand, 0.0, hi, quad);
    if (!r.converged)
        throw QuadratureError("smearing consistency quadrature failed", r);
    return lhs - r.value;
}

namespace {

// int_0^inf (u - v)^n gamma_pdf(u; shape, rate) du by adaptive quadrature,
// truncated at the 1 - 1e-12 quantile. For shape < 1 the substitution
// w = u^shape turns u^{shape-1} du into dw/shape, removing the endpoint
// singularity exactly.
double gamma_moment_about(int n, double v, double shape, double rate,
                          double rel_tol) {
    const double hi = gamma_quantile(1.0 - 1e-12, shape, rate);
    QuadratureConfig cfg;
    cfg.rel_tol = rel_tol;
    // The integral vanishes identically at v = mean (odd n), where a purely
    // relative criterion can never be met; floor the tolerance at round-off
    // on the moment's natural scale (sd + |mean - v|)^n.
    const double scale =
        std::sqrt(shape) / rate + std::abs(shape / rate - v);
    cfg.abs_tol = 1e-13 * std::pow(scale, n);

    QuadratureResult r;
    if (shape < 1.0) {
        const double lognorm = shape * std::log(rate) - log_gamma_fn(shape);
        auto g = [&](double w) {
            const double u = std::pow(w, 1.0 / shape);
            double poly = 1.0;
            for (int j = 0; j < n; ++j) poly *= (u - v);
            return poly * std::exp(lognorm - rate * u) / shape;
        };
        r = integrate(g, 0.0, std::pow(hi, shape), cfg);
    } else {
        auto g = [&](double u) {
            double poly = 1.0;
            for (int j = 0; j < n; ++j) poly *= (u - v);
            return poly * gamma_pdf(u, shape, rate);
        };
        r = integrate(g, 0.0, hi, cfg);
    }
    if (!r.converged)
        throw QuadratureError("KM moment quadrature failed", r);
    return r.value;
}

}  // namespace

KmEstimate km_coefficient_estimate(int n, double v, double t,
                                   const GammaFamily& family,
                                   std::vector<double> tau_sequence) {
    if (n < 1) throw std::invalid_argument("km_coefficient_estimate: n >= 1");
    if (!(v > 0.0 && t > 0.0))
        throw std::domain_error("km_coefficient_estimate requires v, t > 0");
    if (tau_sequence.empty())
        tau_sequence = {0.08 * t, 0.04 * t, 0.02 * t, 0.01 * t};
    if (tau_sequence.size() < 2)
        throw std::invalid_argument("km_coefficient_estimate: need >= 2 taus");
    for (std::size_t i = 1; i < tau_sequence.size(); ++i)
        if (!(tau_sequence[i] < tau_sequence[i - 1]))
            throw std::invalid_argument("km_coefficient_estimate: tau sequence "
                                        "must be strictly decreasing");

    double n_factorial = 1.0;
    for (int j = 2; j <= n; ++j) n_factorial *= j;

    // The kernel moment reduces to a plain weight-density moment:
    //   x = (t v + tau u)/(t + tau),   x - v = tau (u - v)/(t + tau),
    //   kernel(x, t+tau | v, t) dx = gamma_pdf(u; c tau, b tau) du
    // so the n-th moment integral is (tau/(t+tau))^n * E[(U - v)^n].
    std::vector<double> rates(tau_sequence.size());
    for (std::size_t i = 0; i < tau_sequence.size(); ++i) {
        const double tau = tau_sequence[i];
        const double ratio = tau / (t + tau);
        double scaled = 1.0;
        for (int j = 0; j < n; ++j) scaled *= ratio;
        const double moment = gamma_moment_about(n, v, family.c * tau,
                                                 family.b * tau, 1e-11);
        rates[i] = scaled * moment / (n_factorial * tau);
    }

    // Least-squares linear fit value = a + s*tau, extrapolated to tau = 0,
    // cross-checked against the two-point extrapolant from the smallest pair.
    const std::size_t m = tau_sequence.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += tau_sequence[i];
        sy += rates[i];
        sxx += tau_sequence[i] * tau_sequence[i];
        sxy += tau_sequence[i] * rates[i];
    }
    const double denom = m * sxx - sx * sx;
    const double a_fit = (sy * sxx - sx * sxy) / denom;

    const double t1 = tau_sequence[m - 2], t2 = tau_sequence[m - 1];
    const double a_pair =
        rates[m - 1] + t2 * (rates[m - 1] - rates[m - 2]) / (t1 - t2);

    KmEstimate est;
    est.n = n;
    est.v = v;
    est.t = t;
    est.tau_sequence = tau_sequence;
    est.value = a_fit;
    est.extrapolation_error = std::abs(a_fit - a_pair);

    // Divergence flag: successive pairwise extrapolants should not move apart.
    if (m >= 3) {
        const double t0p = tau_sequence[m - 3];
        const double a_prev =
            rates[m - 2] + t1 * (rates[m - 2] - rates[m - 3]) / (t0p - t1);
        const double move1 = std::abs(a_pair - a_prev);
        const double scale = std::max({std::abs(a_fit), std::abs(a_pair), 1e-300});
        if (move1 > 0.5 * scale) est.converged = false;
    }
    return est;
}

double km_analytic_gamma(int n, double v, double t, const GammaFamily& family) {
    if (n == 1) return (family.mean() - v) / t;
    if (n == 2) return family.c / (2.0 * family.b * family.b * t * t);
    throw std::invalid_argument("km_analytic_gamma: closed form available for "
                                "n in {1, 2} only");
}

XCoefficients x_process_coefficients(double v, const HamiltonianSpec& spec) {
    if (!(v > 0.0))
        throw std::domain_error("x_process_coefficients requires v > 0");
    return {spec.r - 0.5 * v, 0.5 * v};
}

}  // namespace smearkit
