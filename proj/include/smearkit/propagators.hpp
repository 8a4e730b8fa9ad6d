#pragma once

#include <complex>
#include <vector>

#include "smearkit/family.hpp"

namespace smearkit {

// Quadratic martingale Hamiltonian split vH = vH1 + H2 with
//   H1(p) = p^2/2 - ip/2,   H2(p) = ipr.
// Both depend on p only, so [H1, H2] = 0 and Re H1(p) = p^2/2 >= 0, which is
// what keeps the analytically continued Laplace image convergent.
struct HamiltonianSpec {
    double r = 0.0;

    std::complex<double> h1(double p) const { return {0.5 * p * p, -0.5 * p}; }
    std::complex<double> h2(double p) const { return {0.0, p * r}; }
};

struct GridSpec {
    double x_min;
    double x_max;
    int n;  // power of two
};

class GridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A probability density sampled on a uniform grid of displacements from the
// origin x_a.
struct DensityGrid {
    double x_min = 0.0;
    double x_max = 0.0;
    int n = 0;
    std::vector<double> values;
    double t_elapsed = 0.0;
    double x_a = 0.0;
    bool nyquist_warning = false;  // |phi| at the Nyquist frequency > 1e-12

    double dx() const { return (x_max - x_min) / n; }
    double x(int i) const { return x_min + i * dx(); }

    double trapezoid() const;
    // Trapezoid of g(x) * density.
    double expectation(const std::function<double(double)>& g) const;
    // Central moment about `center`.
    double moment(int order, double center) const;

    // Type invariants: values >= -1e-12 and trapezoid within tol of 1.
    void validate(double norm_tol = 1e-6) const;
};

// Fixed-variance transition kernel: normal density in the displacement x with
// mean (r - v/2) t and variance v t.
double kernel_density_v(double x, double t, double v,
                        const HamiltonianSpec& spec);

// Default grid for the smeared density at horizon t: symmetric window of
// half-width 10*sigma_max, sigma_max = sqrt(quantile_0.999(weight) * t), with
// n doubled (power of two, from 4096 up to 2^20) until the characteristic
// function at the Nyquist frequency is below 1e-13.
GridSpec auto_grid(const GammaFamily& family, const HamiltonianSpec& spec,
                   double t, double sigmas = 10.0, int n_min = 4096,
                   int n_max = 1 << 20);

// Route 1: P(x,t) = int_0^inf density(v,t) * kernel_density_v(x,t,v) dv,
// node by node with adaptive quadrature.
DensityGrid smeared_density_quadrature(const GridSpec& grid, double t,
                                       const GammaFamily& family,
                                       const HamiltonianSpec& spec);

// The closed-form characteristic function phi(p,t) = E[e^{-ipx}]:
//   exp(-t H2(p)) * (1 + H1(p)/b)^{-ct}
// i.e. the weight image analytically continued to xi = t H1(p).
std::complex<double> effective_char_function(double p, double t,
                                             const GammaFamily& family,
                                             const HamiltonianSpec& spec);

// Route 2: inverse discrete Fourier transform of effective_char_function on
// the dual grid. Far-tail values bottom out at the transform's round-off
// floor (~1e-16 of the spectral mass); expectations of rapidly growing
// integrands (e^x and up) should use the quadrature route, whose nodes decay
// to true zero.
DensityGrid density_via_fourier(const GridSpec& grid, double t,
                                const GammaFamily& family,
                                const HamiltonianSpec& spec);

// Which v-mixture the composed-propagator check uses.
//   Smeared: weights density(v, dt) per leg (the consistent choice)
//   Frozen:  weights Gamma(c, b) independent of the leg length (the ad-hoc
//            choice; induces memory and must fail the check)
//   FixedV:  no mixture, single variance fixed_v (Gaussian semigroup)
enum class MixtureKind { Smeared, Frozen, FixedV };

struct CkeOptions {
    MixtureKind kind = MixtureKind::Smeared;
    double fixed_v = 1.0;
    double sigmas = 10.0;
    int n_min = 4096;
    int n_max = 1 << 20;
};

// L1 norm of  P(. , t_b - t_a)  -  [P(. , t_b - t_c) conv P(. , t_c - t_a)]
// on a common grid (FFT convolution; the grid is sized for the widest leg and
// the strictest Nyquist requirement).
double cke_residual(double t_a, double t_c, double t_b,
                    const GammaFamily& family, const HamiltonianSpec& spec,
                    const CkeOptions& options = {});

// F(x): the exponent whose single Hamiltonian reproduces the smeared
// propagator; for the Gamma family c*log(1 + x/b) = vbar * b * log(1 + x/b).
double effective_hamiltonian(const SmearingFamily& family, double x);

}  // namespace smearkit
