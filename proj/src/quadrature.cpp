#include "smearkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace smearkit {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15
// constants). xgk holds the positive abscissae; even indices are the Kronrod
// extension points, odd indices the embedded Gauss points.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767,
    0.3818300505051189, 0.4179591836734694};

struct Panel {
    double a, b;
    double integral;
    double error;
    long seq;  // creation order, the deterministic tie-breaker
};

// One (G7,K15) evaluation on [a,b]. Returns the K15 value and a conservative
// error estimate from the Gauss/Kronrod discrepancy.
void kronrod15(const std::function<double(double)>& f, double a, double b,
               double* integral, double* error) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double fc = f(center);
    double result_gauss = kWg[3] * fc;
    double result_kronrod = kWgk[7] * fc;

    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        result_kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) result_gauss += kWg[j / 2] * (f1 + f2);
    }

    *integral = result_kronrod * half;
    *error = std::abs((result_kronrod - result_gauss) * half);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f,
                           double a, double b,
                           const QuadratureConfig& cfg) {
    QuadratureResult res;
    if (a == b) {
        res.converged = true;
        return res;
    }

    std::vector<Panel> panels;
    panels.reserve(64);
    long seq = 0;

    Panel first{a, b, 0.0, 0.0, seq++};
    kronrod15(f, a, b, &first.integral, &first.error);
    res.n_evaluations = 15;
    panels.push_back(first);

    double total = first.integral;
    double total_err = first.error;

    while (static_cast<int>(panels.size()) < cfg.max_intervals) {
        const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
        if (total_err <= target) break;

        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i) {
            if (panels[i].error > panels[worst].error ||
                (panels[i].error == panels[worst].error &&
                 panels[i].seq < panels[worst].seq))
                worst = i;
        }

        Panel p = panels[worst];
        const double mid = 0.5 * (p.a + p.b);
        if (mid <= p.a || mid >= p.b) break;  // interval at floating resolution

        Panel left{p.a, mid, 0.0, 0.0, seq++};
        Panel right{mid, p.b, 0.0, 0.0, seq++};
        kronrod15(f, left.a, left.b, &left.integral, &left.error);
        kronrod15(f, right.a, right.b, &right.integral, &right.error);
        res.n_evaluations += 30;

        panels[worst] = left;
        panels.push_back(right);

        total = 0.0;
        total_err = 0.0;
        for (const Panel& q : panels) {
            total += q.integral;
            total_err += q.error;
        }
    }

    std::sort(panels.begin(), panels.end(),
              [](const Panel& x, const Panel& y) { return x.a < y.a; });
    double value = 0.0;
    double err = 0.0;
    for (const Panel& p : panels) {
        value += p.integral;
        err += p.error;
    }

    res.value = value;
    res.error_estimate = err;
    res.converged = err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
    return res;
}

QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         double a,
                                         const QuadratureConfig& cfg) {
    auto g = [&f, a](double u) {
        const double w = 1.0 - u;
        const double v = a + u / w;
        return f(v) / (w * w);
    };
    // The u=1 endpoint is never evaluated: K15 abscissae are interior.
    return integrate(g, 0.0, 1.0, cfg);
}

double integrate_or_throw(const std::function<double(double)>& f,
                          double a, double b,
                          const QuadratureConfig& cfg) {
    QuadratureResult r = integrate(f, a, b, cfg);
    if (!r.converged)
        throw QuadratureError("quadrature did not reach tolerance (achieved " +
                                  std::to_string(r.error_estimate) + ")",
                              r);
    return r.value;
}

}  // namespace smearkit
