#pragma once

#include <cstddef>

namespace smearkit::simd {

// Per-step scalar parameters for the path-update kernels. The update rules
// (vp = max(v, 0) throughout):
//
//   coupled_gamma:  x += r*h - vp*h/2 + sqrt(vp)*sqrt_h*z1
//                   v += (vbar - v)*drift_f + noise_v*z2
//   heston:         x += r*h - vp*h/2 + sqrt(vp)*sqrt_h*z1
//                   v += gamma_rev*(vbar - v)*h + eps*sqrt(vp)*sqrt_h*z2
//   exact:          x += r*h - dY/2 + sqrt(dY)*z
//                   y += dY
struct CoupledGammaStep {
    double rh;       // r*h
    double half_h;   // h/2
    double sqrt_h;
    double vbar;
    double drift_f;  // h/s
    double noise_v;  // sqrt(vbar/b)*sqrt_h/s
};

struct HestonStep {
    double rh;
    double half_h;
    double sqrt_h;
    double vbar;
    double gamma_h;      // gamma_rev*h
    double eps_sqrt_h;   // epsilon*sqrt_h
};

struct ExactStep {
    double rh;
};

// One lane's kernel set. All functions are elementwise over n entries and
// bit-identical across lanes (same operation order, no fused contractions).
struct Kernels {
    void (*step_coupled_gamma)(double* x, double* v, const double* z1,
                               const double* z2, std::size_t n,
                               const CoupledGammaStep& p);
    void (*step_heston)(double* x, double* v, const double* z1,
                        const double* z2, std::size_t n, const HestonStep& p);
    void (*step_exact)(double* x, double* y, const double* dy, const double* z,
                       std::size_t n, const ExactStep& p);
    // out[i] = exp(in[i]); inputs clamped to [-700, 700]; <= 2e-13 relative
    // of the true exponential on that range.
    void (*vexp)(const double* in, double* out, std::size_t n);
    const char* lane;
};

const Kernels& scalar_kernels();

// nullptr when this build or CPU has no AVX2 lane.
const Kernels* avx2_kernels();

// Lane selection: SMEARKIT_SIMD = scalar | avx2 | auto (default auto).
// "auto" takes AVX2 when the CPU supports it. The choice cannot change
// results (lanes are bit-identical); it only changes throughput.
const Kernels& active_kernels();

}  // namespace smearkit::simd
