// Shared elementwise kernel bodies, instantiated once per lane with that
// lane's pack type. Keeping a single operation sequence here is what makes
// the lanes bit-identical: every arithmetic step maps to one correctly
// rounded machine operation in each lane (the TUs are compiled with
// -ffp-contract=off so nothing is fused). Callers pass n as a multiple of
// P::width; wider lanes delegate their remainder to the scalar lane.
#pragma once

#include <cstddef>

#include "smearkit/simd/kernels.hpp"

namespace smearkit::simd {

template <class P>
void step_coupled_gamma_impl(double* x, double* v, const double* z1,
                             const double* z2, std::size_t n,
                             const CoupledGammaStep& p) {
    const P rh = P::set1(p.rh), half_h = P::set1(p.half_h);
    const P sqrt_h = P::set1(p.sqrt_h), vbar = P::set1(p.vbar);
    const P drift_f = P::set1(p.drift_f), noise_v = P::set1(p.noise_v);
    const P zero = P::set1(0.0);
    for (std::size_t i = 0; i + P::width <= n; i += P::width) {
        const P vi = P::load(v + i);
        const P vp = P::max(vi, zero);
        const P xi = P::load(x + i);
        const P dx = rh - vp * half_h + P::sqrt(vp) * sqrt_h * P::load(z1 + i);
        P::store(x + i, xi + dx);
        const P dv = (vbar - vi) * drift_f + noise_v * P::load(z2 + i);
        P::store(v + i, vi + dv);
    }
}

template <class P>
void step_heston_impl(double* x, double* v, const double* z1, const double* z2,
                      std::size_t n, const HestonStep& p) {
    const P rh = P::set1(p.rh), half_h = P::set1(p.half_h);
    const P sqrt_h = P::set1(p.sqrt_h), vbar = P::set1(p.vbar);
    const P gamma_h = P::set1(p.gamma_h), eps_sqrt_h = P::set1(p.eps_sqrt_h);
    const P zero = P::set1(0.0);
    for (std::size_t i = 0; i + P::width <= n; i += P::width) {
        const P vi = P::load(v + i);
        const P vp = P::max(vi, zero);
        const P sv = P::sqrt(vp);
        const P xi = P::load(x + i);
        const P dx = rh - vp * half_h + sv * sqrt_h * P::load(z1 + i);
        P::store(x + i, xi + dx);
        const P dv = (vbar - vi) * gamma_h + sv * eps_sqrt_h * P::load(z2 + i);
        P::store(v + i, vi + dv);
    }
}

template <class P>
void step_exact_impl(double* x, double* y, const double* dy, const double* z,
                     std::size_t n, const ExactStep& p) {
    const P rh = P::set1(p.rh);
    const P half = P::set1(0.5);
    for (std::size_t i = 0; i + P::width <= n; i += P::width) {
        const P d = P::load(dy + i);
        const P xi = P::load(x + i);
        const P dx = rh - d * half + P::sqrt(d) * P::load(z + i);
        P::store(x + i, xi + dx);
        P::store(y + i, P::load(y + i) + d);
    }
}

// exp by Cody-Waite reduction and a degree-13 Taylor polynomial on
// r in [-ln2/2, ln2/2], rescaled by 2^k through exponent-field arithmetic.
template <class P>
void vexp_impl(const double* in, double* out, std::size_t n) {
    const P inv_ln2 = P::set1(1.4426950408889634074);
    const P ln2_hi = P::set1(6.93147180369123816490e-01);
    const P ln2_lo = P::set1(1.90821492927058770002e-10);
    const P hi_cap = P::set1(700.0), lo_cap = P::set1(-700.0);
    static const double kC[14] = {
        1.0,
        1.0,
        1.0 / 2,
        1.0 / 6,
        1.0 / 24,
        1.0 / 120,
        1.0 / 720,
        1.0 / 5040,
        1.0 / 40320,
        1.0 / 362880,
        1.0 / 3628800,
        1.0 / 39916800,
        1.0 / 479001600,
        1.0 / 6227020800.0};
    for (std::size_t i = 0; i + P::width <= n; i += P::width) {
        P xv = P::load(in + i);
        xv = P::min(xv, hi_cap);
        xv = P::max(xv, lo_cap);
        const P kd = P::round_nearest(xv * inv_ln2);
        const P r = (xv - kd * ln2_hi) - kd * ln2_lo;
        P poly = P::set1(kC[13]);
        for (int j = 12; j >= 0; --j) poly = poly * r + P::set1(kC[j]);
        P::store(out + i, poly * P::pow2_from_rounded(kd));
    }
}

}  // namespace smearkit::simd
