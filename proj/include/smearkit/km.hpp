#pragma once

#include <vector>

#include "smearkit/family.hpp"
#include "smearkit/propagators.hpp"

namespace smearkit {

// Transition kernel of the variance process induced by the smearing weights:
//
//   kernel(z, t | z', t') = (t/(t-t')) * theta(tz - t'z') *
//                           density((tz - t'z')/(t-t'), t-t')
//
// supported on z >= t'z'/t; total mass 1 in z for any valid (z', t', t).
struct OmegaKernel {
    GammaFamily family;

    double operator()(double z, double t, double z_prev, double t_prev) const;
};

double omega_kernel(double z, double t, double z_prev, double t_prev,
                    const GammaFamily& family);

// weight(z,t) - int_0^inf weight(z',t') kernel(z,t | z',t') dz': the kernel
// must propagate the weight density forward in t. Quadrature-small when it
// does.
double smearing_consistency_residual(double z, double t, double t_prev,
                                     const GammaFamily& family,
                                     const QuadratureConfig& quad = {});

struct KmEstimate {
    int n = 0;
    double v = 0.0;
    double t = 0.0;
    double value = 0.0;
    std::vector<double> tau_sequence;
    double extrapolation_error = 0.0;
    bool converged = true;
};

// n-th conditional moment rate at (v, t):
//   (1/(n! tau)) int (x - v)^n kernel(x, t+tau | v, t) dx
// per tau in tau_sequence (default {0.08, 0.04, 0.02, 0.01} * t), then a
// linear-in-tau fit extrapolated to tau = 0. The moment integral is reduced
// to the plain weight density via u = ((t+tau) x - t v)/tau, and for shapes
// c*tau < 1 the endpoint singularity u^{c tau - 1} is absorbed exactly by a
// second substitution w = u^{c tau}.
KmEstimate km_coefficient_estimate(int n, double v, double t,
                                   const GammaFamily& family,
                                   std::vector<double> tau_sequence = {});

// Closed forms for the Gamma kernel: n=1 -> (vbar - v)/t, n=2 -> c/(2 b^2 t^2).
// Orders n >= 3 are not closed-form supported.
double km_analytic_gamma(int n, double v, double t, const GammaFamily& family);

// Drift and diffusion of the price-log process at fixed variance v:
// (r - v/2, v/2).
struct XCoefficients {
    double drift;
    double diffusion;
};
XCoefficients x_process_coefficients(double v, const HamiltonianSpec& spec);

}  // namespace smearkit
