#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smearkit/family.hpp"

namespace smearkit {

// Real-axis Laplace inversion by high-order derivatives of the image:
//
//   w(v,t) = lim_{k->inf} ((-1)^k / k!) (k/v)^{k+1} wtilde^(k)(k/v, t)
//
// The k-th derivative comes from jet arithmetic (see jet.hpp), so each
// approximant is exact up to floating round-off; the limit converges at rate
// O(1/k), which Richardson extrapolation accelerates.

struct PostApproximant {
    int k = 0;
    double value = 0.0;
    // Present once a second approximant at k/2 was available:
    // 2*A(k) - A(k/2), the one-level O(1/k) extrapolant.
    std::optional<double> richardson_value;
};

struct InversionResult {
    double value = 0.0;          // best (extrapolated) estimate
    double error_estimate = 0.0; // smallest diagonal difference achieved
    bool converged = false;
    std::vector<int> k_sequence; // approximant orders actually evaluated
};

class InversionError : public std::runtime_error {
public:
    InversionError(const std::string& what, InversionResult partial)
        : std::runtime_error(what), result(std::move(partial)) {}
    InversionResult result;
};

// d^order/dx^order of xi -> image(xi, t) at xi = x. order >= 1 (the order-0
// convention is rejected; call image() for values). Throws on non-finite
// intermediate jet coefficients (overflow: lower the order).
double jet_derivative(const SmearingFamily& family, double x, double t,
                      int order);

// The k-th Post approximant at v. Throws on jet overflow and flags a
// non-finite result.
PostApproximant post_invert(const SmearingFamily& family, double v, double t,
                            int k);

// Evaluates approximants at k0, 2*k0, ... <= k_max (k0 halved down from
// k_max, never below 4) and extrapolates them to 1/k = 0 through a Neville
// table. Succeeds when a new-minimum diagonal difference (third row onward;
// a single doubling is never trusted) falls within tol (absolute); otherwise
// throws InversionError carrying the best row and the k sequence.
double invert_with_extrapolation(const SmearingFamily& family, double v,
                                 double t, int k_max, double tol = 1e-3);

// Non-throwing variant returning the full record.
InversionResult invert_with_extrapolation_result(const SmearingFamily& family,
                                                 double v, double t, int k_max,
                                                 double tol = 1e-3);

}  // namespace smearkit
