#include "smearkit/laplace.hpp"

#include <cmath>
#include <limits>

namespace smearkit {

double jet_derivative(const SmearingFamily& family, double x, double t,
                      int order) {
    if (order < 1)
        throw std::invalid_argument("jet_derivative: order must be >= 1 "
                                    "(use image() for plain values)");
    Jet j = family.image_jet(x, t, order);
    if (!j.all_finite())
        throw std::overflow_error("jet_derivative: coefficient overflow at "
                                  "order " + std::to_string(order) +
                                  "; use a lower order");
    return j.derivative(order);
}

PostApproximant post_invert(const SmearingFamily& family, double v, double t,
                            int k) {
    if (!(v > 0.0)) throw std::domain_error("post_invert: v must be > 0");
    if (!(t > 0.0)) throw std::domain_error("post_invert: t must be > 0");
    if (k < 1) throw std::invalid_argument("post_invert: k must be >= 1");

    const double x = static_cast<double>(k) / v;
    Jet j = family.image_jet(x, t, k);
    if (!j.all_finite())
        throw std::overflow_error("post_invert: jet overflow at k = " +
                                  std::to_string(k));

    // value = (-1)^k * (k/v)^{k+1} * wtilde^{(k)} / k!
    //       = (-1)^k * (k/v)^{k+1} * coeff[k].
    // The power is folded in one factor at a time: the running product moves
    // monotonically from the (tiny) jet coefficient toward the O(1) result,
    // so no intermediate overflows for representable answers.
    double value = j.coeff(k);
    for (int i = 0; i <= k; ++i) value *= x;
    if (k % 2 != 0) value = -value;

    if (!std::isfinite(value))
        throw std::range_error("post_invert: non-finite approximant at k = " +
                               std::to_string(k));
    PostApproximant a;
    a.k = k;
    a.value = value;
    return a;
}

InversionResult invert_with_extrapolation_result(const SmearingFamily& family,
                                                 double v, double t, int k_max,
                                                 double tol) {
    if (k_max < 4)
        throw std::invalid_argument("invert_with_extrapolation: k_max must be "
                                    ">= 4");
    if (!(tol > 0.0))
        throw std::invalid_argument("invert_with_extrapolation: tol must be "
                                    "> 0");

    int k0 = k_max;
    while (k0 / 2 >= 4) k0 /= 2;

    InversionResult res;
    // Neville table extrapolating the approximants to 1/k = 0: the error
    // expands in powers of 1/k, so row m cancels terms through 1/k^m. One
    // extra halving of error per row is what lets the sweep meet absolute
    // tolerances that a single Richardson level misses mid-range.
    std::vector<double> xs;                  // 1/k per row
    std::vector<std::vector<double>> table;  // table[i][j], j <= i
    double best_diff = std::numeric_limits<double>::infinity();

    for (int k = k0; k <= k_max; k *= 2) {
        const PostApproximant a = post_invert(family, v, t, k);
        res.k_sequence.push_back(k);

        xs.push_back(1.0 / static_cast<double>(k));
        const std::size_t i = table.size();
        table.emplace_back(i + 1, 0.0);
        table[i][0] = a.value;
        for (std::size_t j = 1; j <= i; ++j)
            table[i][j] = (xs[i - j] * table[i][j - 1] -
                           xs[i] * table[i - 1][j - 1]) /
                          (xs[i - j] - xs[i]);

        if (i == 0) {
            res.value = table[0][0];
            res.error_estimate = std::abs(res.value);
            continue;
        }
        const double diff = std::abs(table[i][i] - table[i - 1][i - 1]);
        // One doubling cannot distinguish asymptotic decay from a
        // pre-asymptotic stall (a near-flat pair of approximants produces a
        // deceptively small first difference), so row 1 is recorded but
        // never accepted.
        if (i == 1) {
            res.value = table[1][1];
            res.error_estimate = diff;
            continue;
        }
        // From the third row on, a row counts only while the diagonal keeps
        // improving; a corrupted or diverging row never displaces the best
        // one, and acceptance requires the improvement to land within tol.
        if (diff <= best_diff) {
            best_diff = diff;
            res.value = table[i][i];
            res.error_estimate = diff;
            if (diff <= tol) {
                res.converged = true;
                return res;
            }
        }
    }
    return res;
}

double invert_with_extrapolation(const SmearingFamily& family, double v,
                                 double t, int k_max, double tol) {
    InversionResult res =
        invert_with_extrapolation_result(family, v, t, k_max, tol);
    if (!res.converged) {
        std::string ks;
        for (std::size_t i = 0; i < res.k_sequence.size(); ++i)
            ks += (i ? "," : "") + std::to_string(res.k_sequence[i]);
        throw InversionError(
            "Post inversion did not converge to tol (best estimate " +
                std::to_string(res.value) + ", error estimate " +
                std::to_string(res.error_estimate) + ", k sequence [" + ks +
                "])",
            res);
    }
    return res.value;
}

}  // namespace smearkit
