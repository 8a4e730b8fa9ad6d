#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace smearkit {

inline double log_gamma_fn(double x) { return boost::math::lgamma(x); }

// Gamma(shape, rate) density at v >= 0.
inline double gamma_pdf(double v, double shape, double rate) {
    if (v < 0.0) return 0.0;
    if (v == 0.0) {
        if (shape > 1.0) return 0.0;
        if (shape == 1.0) return rate;
        return std::numeric_limits<double>::infinity();
    }
    return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(v) -
                    rate * v - log_gamma_fn(shape));
}

inline double gamma_cdf(double v, double shape, double rate) {
    if (v <= 0.0) return 0.0;
    return boost::math::gamma_p(shape, rate * v);
}

inline double gamma_quantile(double q, double shape, double rate) {
    return boost::math::gamma_p_inv(shape, q) / rate;
}

// Raw moment E[V^n] of Gamma(shape, rate).
inline double gamma_moment(int n, double shape, double rate) {
    double m = 1.0;
    for (int j = 0; j < n; ++j) m *= (shape + j) / rate;
    return m;
}

// One-sample Kolmogorov-Smirnov statistic against a supplied CDF.
// `samples` is consumed sorted in place.
template <class Cdf>
double ks_statistic(std::vector<double>& samples, const Cdf& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - F;
        const double lo = F - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

// Two-sample Kolmogorov-Smirnov statistic. Both inputs are sorted in place.
inline double ks_two_sample(std::vector<double>& a, std::vector<double>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= t) ++i;
        while (j < b.size() && b[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    return d;
}

}  // namespace smearkit
