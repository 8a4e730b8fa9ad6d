#include "smearkit/propagators.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "smearkit/gamma_math.hpp"

namespace smearkit {

namespace {

// FFTW planning mutates global state; executions on distinct plans are safe.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

struct FftPlan {
    fftw_plan plan;
    fftw_complex* buf;
    int n;

    FftPlan(int n_, int sign) : n(n_) {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        buf = fftw_alloc_complex(static_cast<std::size_t>(n));
        plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
        fftw_free(buf);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double normal_pdf(double x, double mean, double variance) {
    const double z = x - mean;
    return std::exp(-0.5 * z * z / variance) /
           std::sqrt(2.0 * 3.14159265358979323846 * variance);
}

// Characteristic function of one composition leg under the selected mixture.
std::complex<double> leg_char_function(double p, double dt,
                                       const GammaFamily& family,
                                       const HamiltonianSpec& spec,
                                       MixtureKind kind, double fixed_v) {
    const std::complex<double> drift = std::exp(-dt * spec.h2(p));
    switch (kind) {
        case MixtureKind::Smeared:
            return drift * std::pow(1.0 + spec.h1(p) / family.b,
                                    -family.c * dt);
        case MixtureKind::Frozen:
            // Weights Gamma(c, b) regardless of dt: the image of the frozen
            // weight evaluated at xi = dt*H1.
            return drift * std::pow(1.0 + dt * spec.h1(p) / family.b,
                                    -family.c);
        case MixtureKind::FixedV:
            return drift * std::exp(-fixed_v * dt * spec.h1(p));
    }
    return {0.0, 0.0};
}

// Inverse transform of an arbitrary characteristic function onto the grid.
DensityGrid invert_char_function(
    const GridSpec& grid, double t,
    const std::function<std::complex<double>(double)>& phi) {
    if (!is_power_of_two(grid.n))
        throw GridError("grid n must be a power of two");
    DensityGrid out;
    out.x_min = grid.x_min;
    out.x_max = grid.x_max;
    out.n = grid.n;
    out.t_elapsed = t;
    out.values.resize(static_cast<std::size_t>(grid.n));

    const int n = grid.n;
    const double dx = (grid.x_max - grid.x_min) / n;
    const double dp = 2.0 * 3.14159265358979323846 / (n * dx);

    // P(x_j) = (dp/2pi) sum_{k'=-n/2}^{n/2-1} phi(k' dp) e^{i k' dp x_j}
    // with x_j = x_min + j dx. Writing m = k' + n/2 turns the sum into a
    // backward DFT times (-1)^j, with a pre-twiddle e^{i p x_min} per mode.
    FftPlan fft(n, FFTW_BACKWARD);
    double nyq_mod = 0.0;
    for (int m = 0; m < n; ++m) {
        const double p = (m - n / 2) * dp;
        std::complex<double> c = phi(p) * std::polar(1.0, p * grid.x_min);
        if (m == 0) nyq_mod = std::abs(c);
        fft.buf[m][0] = c.real();
        fft.buf[m][1] = c.imag();
    }
    fftw_execute(fft.plan);

    const double scale = dp / (2.0 * 3.14159265358979323846);
    for (int j = 0; j < n; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        out.values[static_cast<std::size_t>(j)] = sign * scale * fft.buf[j][0];
    }
    out.nyquist_warning = nyq_mod > 1e-12;
    return out;
}

}  // namespace

double DensityGrid::trapezoid() const {
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
    return s * dx();
}

double DensityGrid::expectation(const std::function<double(double)>& g) const {
    double s = 0.5 * (g(x(0)) * values.front() +
                      g(x(n - 1)) * values.back());
    for (int i = 1; i + 1 < n; ++i)
        s += g(x(i)) * values[static_cast<std::size_t>(i)];
    return s * dx();
}

double DensityGrid::moment(int order, double center) const {
    return expectation([order, center](double xv) {
        double acc = 1.0;
        for (int j = 0; j < order; ++j) acc *= (xv - center);
        return acc;
    });
}

void DensityGrid::validate(double norm_tol) const {
    for (double v : values)
        if (v < -1e-12)
            throw GridError("density grid has values below -1e-12");
    const double mass = trapezoid();
    if (std::abs(mass - 1.0) > norm_tol)
        throw GridError("density grid mass " + std::to_string(mass) +
                        " deviates from 1 beyond tolerance");
}

double kernel_density_v(double x, double t, double v,
                        const HamiltonianSpec& spec) {
    if (!(t > 0.0 && v > 0.0))
        throw std::domain_error("kernel_density_v requires t > 0, v > 0");
    return normal_pdf(x, (spec.r - 0.5 * v) * t, v * t);
}

GridSpec auto_grid(const GammaFamily& family, const HamiltonianSpec& spec,
                   double t, double sigmas, int n_min, int n_max) {
    if (!(t > 0.0)) throw GridError("auto_grid requires t > 0");
    const double q = gamma_quantile(0.999, family.c * t, family.b * t);
    const double sigma_max = std::sqrt(q * t);
    const double drift_margin =
        std::abs(spec.r * t) + 0.5 * q * t;  // kernel means spread this far
    const double half = sigmas * sigma_max + drift_margin;

    GridSpec g{-half, half, n_min};
    const double ct = family.c * t;
    while (g.n < n_max) {
        const double dx = (g.x_max - g.x_min) / g.n;
        const double p_nyq = 3.14159265358979323846 / dx;
        const double mod =
            std::pow(std::abs(1.0 + spec.h1(p_nyq) / family.b), -ct);
        if (mod < 1e-13) break;
        g.n *= 2;
    }
    return g;
}

DensityGrid smeared_density_quadrature(const GridSpec& grid, double t,
                                       const GammaFamily& family,
                                       const HamiltonianSpec& spec) {
    if (!(t > 0.0 && family.c * t > 0.0))
        throw std::domain_error("smeared_density_quadrature requires t > 0 "
                                "and c*t > 0");
    DensityGrid out;
    out.x_min = grid.x_min;
    out.x_max = grid.x_max;
    out.n = grid.n;
    out.t_elapsed = t;
    out.values.resize(static_cast<std::size_t>(grid.n));

    QuadratureConfig cfg;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-15;

    const double shape = family.c * t;
    const double rate = family.b * t;

    // Split the v-axis at weight quantiles so the adaptive rule always
    // samples the bulk. At large c*t the weight is a spike (relative width
    // ~ 1/sqrt(c*t)) that a panel spanning the whole half-line would step
    // straight over, silently returning zero.
    const double probs[] = {1e-14, 0.01, 0.25, 0.5, 0.75, 0.99, 1 - 1e-14};
    std::vector<double> cuts = {0.0};
    for (double q : probs) cuts.push_back(gamma_quantile(q, shape, rate));

    for (int j = 0; j < grid.n; ++j) {
        const double xj = out.x(j);
        auto integrand = [&](double v) {
            return gamma_pdf(v, shape, rate) * kernel_density_v(xj, t, v, spec);
        };
        double total = 0.0;
        const auto take = [&](const QuadratureResult& r, const char* where) {
            if (!r.converged)
                throw QuadratureError(
                    std::string("smeared density quadrature failed at node ") +
                        std::to_string(j) + " (x = " + std::to_string(xj) +
                        ", segment " + where + ")",
                    r);
            total += r.value;
        };
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s)
            take(integrate(integrand, cuts[s], cuts[s + 1], cfg), "bulk");
        take(integrate_semi_infinite(integrand, cuts.back(), cfg), "tail");
        out.values[static_cast<std::size_t>(j)] = total;
    }
    return out;
}

std::complex<double> effective_char_function(double p, double t,
                                             const GammaFamily& family,
                                             const HamiltonianSpec& spec) {
    if (!(t > 0.0)) throw std::domain_error("effective_char_function "
                                            "requires t > 0");
    // 1 + H1(p)/b has real part >= 1 for real p, so the principal power never
    // touches the branch cut.
    return std::exp(-t * spec.h2(p)) *
           std::pow(1.0 + spec.h1(p) / family.b, -family.c * t);
}

DensityGrid density_via_fourier(const GridSpec& grid, double t,
                                const GammaFamily& family,
                                const HamiltonianSpec& spec) {
    if (!(t > 0.0)) throw std::domain_error("density_via_fourier requires "
                                            "t > 0");
    return invert_char_function(grid, t, [&](double p) {
        return effective_char_function(p, t, family, spec);
    });
}

double cke_residual(double t_a, double t_c, double t_b,
                    const GammaFamily& family, const HamiltonianSpec& spec,
                    const CkeOptions& options) {
    if (!(t_a < t_c && t_c < t_b))
        throw std::domain_error("cke_residual requires t_a < t_c < t_b");

    const double tau1 = t_c - t_a;
    const double tau2 = t_b - t_c;
    const double tau_full = t_b - t_a;

    // One common grid: range sized for the full span, resolution (Nyquist)
    // sized for the shortest leg, whose characteristic function decays the
    // slowest.
    GridSpec g = auto_grid(family, spec, tau_full, options.sigmas,
                           options.n_min, options.n_max);
    {
        const double tau_min = std::min(tau1, tau2);
        GridSpec fine{g.x_min, g.x_max, g.n};
        const double ct = family.c * tau_min;
        while (fine.n < options.n_max) {
            const double dx = (fine.x_max - fine.x_min) / fine.n;
            const double p_nyq = 3.14159265358979323846 / dx;
            double mod;
            if (options.kind == MixtureKind::FixedV)
                mod = std::exp(-options.fixed_v * tau_min * 0.5 * p_nyq * p_nyq);
            else if (options.kind == MixtureKind::Frozen)
                mod = std::pow(std::abs(1.0 + tau_min * spec.h1(p_nyq) /
                                                  family.b),
                               -family.c);
            else
                mod = std::pow(std::abs(1.0 + spec.h1(p_nyq) / family.b), -ct);
            if (mod < 1e-13) break;
            fine.n *= 2;
        }
        g = fine;
    }

    auto leg = [&](double dt) {
        return invert_char_function(g, dt, [&](double p) {
            return leg_char_function(p, dt, family, spec, options.kind,
                                     options.fixed_v);
        });
    };

    DensityGrid p1 = leg(tau1);
    DensityGrid p2 = leg(tau2);
    DensityGrid direct = leg(tau_full);

    // Discrete linear convolution (p1 conv p2) * dx via zero-padded FFTs.
    const int n = g.n;
    const int n2 = 2 * n;
    FftPlan fa(n2, FFTW_FORWARD), fb(n2, FFTW_FORWARD), fc(n2, FFTW_BACKWARD);
    for (int i = 0; i < n2; ++i) {
        fa.buf[i][0] = i < n ? p1.values[static_cast<std::size_t>(i)] : 0.0;
        fa.buf[i][1] = 0.0;
        fb.buf[i][0] = i < n ? p2.values[static_cast<std::size_t>(i)] : 0.0;
        fb.buf[i][1] = 0.0;
    }
    fftw_execute(fa.plan);
    fftw_execute(fb.plan);
    for (int i = 0; i < n2; ++i) {
        const double re = fa.buf[i][0] * fb.buf[i][0] -
                          fa.buf[i][1] * fb.buf[i][1];
        const double im = fa.buf[i][0] * fb.buf[i][1] +
                          fa.buf[i][1] * fb.buf[i][0];
        fc.buf[i][0] = re;
        fc.buf[i][1] = im;
    }
    fftw_execute(fc.plan);

    // Sample k of the linear convolution sits at displacement
    // 2 x_min + k dx; the window point x_j = x_min + j dx is k = j + n/2
    // (symmetric window, so -x_min/dx = n/2).
    const double dx = direct.dx();
    const double conv_scale = dx / n2;
    double l1 = 0.0;
    for (int j = 0; j < n; ++j) {
        const double composed = fc.buf[j + n / 2][0] * conv_scale;
        l1 += std::abs(direct.values[static_cast<std::size_t>(j)] - composed);
    }
    return l1 * dx;
}

double effective_hamiltonian(const SmearingFamily& family, double x) {
    if (!(x >= 0.0))
        throw std::domain_error("effective_hamiltonian requires x >= 0");
    return family.F(x);
}

}  // namespace smearkit
