#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace smearkit {

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
    int n_evaluations = 0;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, const QuadratureResult& partial)
        : std::runtime_error(what), result(partial) {}
    QuadratureResult result;
};

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval. The worst interval
// (largest error estimate; ties broken by creation order) is bisected until
// the summed error meets max(abs_tol, rel_tol*|I|) or the interval budget is
// exhausted. The final value is accumulated over intervals sorted by left
// endpoint, so the summation order is a pure function of the inputs.
QuadratureResult integrate(const std::function<double(double)>& f,
                           double a, double b,
                           const QuadratureConfig& cfg = {});

// Same contract on [a, inf), via the substitution v = a + u/(1-u) which maps
// u in [0,1) and weights the integrand by 1/(1-u)^2.
QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         double a,
                                         const QuadratureConfig& cfg = {});

// Throwing wrappers for callers that treat non-convergence as exceptional.
double integrate_or_throw(const std::function<double(double)>& f,
                          double a, double b,
                          const QuadratureConfig& cfg = {});

}  // namespace smearkit
