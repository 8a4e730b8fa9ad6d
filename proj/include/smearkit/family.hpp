#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "smearkit/expr.hpp"
#include "smearkit/jet.hpp"
#include "smearkit/quadrature.hpp"

namespace smearkit {

class FamilyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The concrete family with exponent F(x) = c*log(1 + x/b). Its weight density
// at horizon t is Gamma(shape c*t, rate b*t), the Laplace image is
// (bt/(xi+bt))^{ct}, and the mean variance is vbar = c/b.
struct GammaFamily {
    double b;
    double c;

    GammaFamily(double b_, double c_) : b(b_), c(c_) {
        if (!(b > 0.0)) throw FamilyError("gamma family requires b > 0");
        if (!(c >= 0.0)) throw FamilyError("gamma family requires c >= 0");
    }

    double mean() const { return c / b; }
};

// How a one-argument exponent F is promoted to a two-argument Laplace image.
//
//   Scaled:      image(xi, t) = exp(-t * F(xi/t))   (the consistent scaling;
//                any F placed here satisfies the composition law by
//                construction, which is exactly what makes it the solution
//                family)
//   Stationary:  image(xi, t) = exp(-F(xi))         (time-independent weights;
//                preserves the composition law only for linear F, so this is
//                the policy under which candidate exponents are actually
//                falsifiable -- and the default for user-supplied ones)
enum class ImagePolicy { Scaled, Stationary };

// A smearing family: exponent F with F(0) = 0, the t=0 boundary constant
// kappa, and the image policy. The Gamma family keeps its closed forms; a
// custom family evaluates a parsed expression.
class SmearingFamily {
public:
    static SmearingFamily gamma(double b, double c, std::string label = "gamma");
    static SmearingFamily custom(const std::string& f_expression,
              ImagePolicy policy = ImagePolicy::Stationary,
              double kappa = 1.0, std::string label = "custom");

    bool is_gamma() const { return gamma_.has_value(); }
    const GammaFamily& gamma_params() const;
    ImagePolicy policy() const { return policy_; }
    double kappa() const { return kappa_; }
    const std::string& label() const { return label_; }

    double F(double x) const;
    Jet F(const Jet& x) const;

    // Laplace image of the weight density. t = 0 returns kappa^xi.
    double image(double xi, double t) const;

    // Jet of xi -> image(xi, t) around xi = x0, to the given order.
    Jet image_jet(double x0, double t, int order) const;

private:
    SmearingFamily() = default;

    std::optional<GammaFamily> gamma_;
    std::optional<Expr> f_expr_;
    ImagePolicy policy_ = ImagePolicy::Scaled;
    double kappa_ = 1.0;
    std::string label_;
};

// Parameters of the convolution self-consistency identity. The scale pair is
// (a, b_cke) with b_cke = a/(a+1), i.e. 1 + 1/a = 1/b_cke exactly.
struct CkePair {
    double a;
    double b_cke;

    explicit CkePair(double a_) : a(a_), b_cke(a_ / (a_ + 1.0)) {
        if (!(a > 0.0)) throw FamilyError("CkePair requires a > 0");
    }
};

// Weight density of the Gamma family at horizon t: Gamma(ct, bt) evaluated at
// v. Throws for the degenerate c*t = 0 case (a point mass, not a function).
double density(const GammaFamily& family, double v, double t);

// image(xi,t)*image(alpha*xi, alpha*t) - image(xi + alpha*xi, t + alpha*t).
// Zero (to round-off) for families whose image actually composes.
double functional_equation_residual(const SmearingFamily& family,
                                    double xi, double t, double alpha);

// LHS - RHS of the convolution identity at (z, t, a):
//   int_0^z w(z',t) * a*w(a(z-z'), t/a) dz'  -  b*w(b*z, t/b),  b = a/(a+1)
// for the Gamma closed-form density, by adaptive quadrature.
double convolution_identity_residual(const GammaFamily& family,
                                     double z, double t, double a,
                                     const QuadratureConfig& quad = {});

// Worst signed violation of the finite-difference complete-monotonicity test
// on the image in xi: (-1)^m * Delta_h^m image >= 0 for m = 0..max_order on a
// grid. Returns the most negative value found (>= 0 means no violation).
double complete_monotonicity_violation(const SmearingFamily& family, double t,
                                       double xi_min, double xi_max,
                                       int n_points, int max_order = 4);

// Family-file loader: {"family":"gamma","b":..,"c":..} or
// {"family":"custom","F":"<expr>"[,"image":"scaled"|"stationary"]}.
// Custom exponents are validated at load: F finite on a probe grid and
// F(0) = 0.
SmearingFamily load_family_json(const std::string& json_text);
SmearingFamily load_family_file(const std::string& path);

}  // namespace smearkit
