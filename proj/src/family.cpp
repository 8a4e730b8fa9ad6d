#include "smearkit/family.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "smearkit/gamma_math.hpp"

namespace smearkit {

SmearingFamily SmearingFamily::gamma(double b, double c, std::string label) {
    SmearingFamily f;
    f.gamma_ = GammaFamily(b, c);
    f.policy_ = ImagePolicy::Scaled;
    f.kappa_ = 1.0;  // lim_{t->0} (bt/(xi+bt))^{ct} = 1
    f.label_ = std::move(label);
    return f;
}

SmearingFamily SmearingFamily::custom(const std::string& f_expression,
                                      ImagePolicy policy, double kappa,
                                      std::string label) {
    SmearingFamily f;
    f.f_expr_ = Expr::parse(f_expression);
    f.policy_ = policy;
    f.kappa_ = kappa;
    f.label_ = std::move(label);

    const double f0 = f.F(0.0);
    if (!(std::abs(f0) <= 1e-12))
        throw FamilyError("exponent must satisfy F(0) = 0; got F(0) = " +
                          std::to_string(f0));
    for (double x : {1e-6, 0.01, 0.1, 1.0, 10.0, 100.0, 1e4, 1e8}) {
        const double v = f.F(x);
        if (!std::isfinite(v))
            throw FamilyError("exponent not finite at x = " + std::to_string(x));
    }
    return f;
}

const GammaFamily& SmearingFamily::gamma_params() const {
    if (!gamma_) throw FamilyError("not a gamma family");
    return *gamma_;
}

double SmearingFamily::F(double x) const {
    if (gamma_) {
        if (!(x / gamma_->b > -1.0))
            throw std::domain_error("gamma exponent undefined at x <= -b");
        return gamma_->c * std::log1p(x / gamma_->b);
    }
    return f_expr_->eval<double>(x);
}

Jet SmearingFamily::F(const Jet& x) const {
    if (gamma_) return gamma_->c * log(1.0 + x / gamma_->b);
    return f_expr_->eval<Jet>(x);
}

double SmearingFamily::image(double xi, double t) const {
    if (xi < 0.0) throw std::domain_error("image requires xi >= 0");
    if (t < 0.0) throw std::domain_error("image requires t >= 0");
    if (t == 0.0) return std::pow(kappa_, xi);
    if (policy_ == ImagePolicy::Stationary) return std::exp(-F(xi));
    return std::exp(-t * F(xi / t));
}

Jet SmearingFamily::image_jet(double x0, double t, int order) const {
    if (!(t > 0.0)) throw std::domain_error("image_jet requires t > 0");
    Jet x = Jet::variable(order, x0);
    if (policy_ == ImagePolicy::Stationary) return exp(-F(x));
    return exp(-t * F(x / t));
}

double density(const GammaFamily& family, double v, double t) {
    if (!(v > 0.0)) throw std::domain_error("density requires v > 0");
    if (!(t > 0.0)) throw std::domain_error("density requires t > 0");
    if (family.c * t == 0.0)
        throw FamilyError("degenerate weight (c*t = 0): point mass at v = 0+, "
                          "not a density");
    return gamma_pdf(v, family.c * t, family.b * t);
}

double functional_equation_residual(const SmearingFamily& family,
                                    double xi, double t, double alpha) {
    if (!(xi > 0.0 && t > 0.0 && alpha > 0.0))
        throw std::domain_error("functional_equation_residual requires "
                                "xi, t, alpha > 0");
    return family.image(xi, t) * family.image(alpha * xi, alpha * t) -
           family.image(xi + alpha * xi, t + alpha * t);
}

double convolution_identity_residual(const GammaFamily& family,
                                     double z, double t, double a,
                                     const QuadratureConfig& quad) {
    if (!(z > 0.0 && t > 0.0 && a > 0.0))
        throw std::domain_error("convolution_identity_residual requires "
                                "z, t, a > 0");
    const CkePair pair(a);

    auto integrand = [&](double zp) {
        return density(family, zp, t) * a * density(family, a * (z - zp), t / a);
    };
    // The open-interval rule never touches zp = 0 or zp = z, where one factor
    // can be singular for small shapes.
    QuadratureResult lhs = integrate(integrand, 0.0, z, quad);
    if (!lhs.converged)
        throw QuadratureError("convolution quadrature did not converge", lhs);

    const double rhs =
        pair.b_cke * density(family, pair.b_cke * z, t / pair.b_cke);
    return lhs.value - rhs;
}

double complete_monotonicity_violation(const SmearingFamily& family, double t,
                                       double xi_min, double xi_max,
                                       int n_points, int max_order) {
    if (n_points < max_order + 2)
        throw std::invalid_argument("complete_monotonicity_violation: grid too "
                                    "small for requested order");
    const double h = (xi_max - xi_min) / (n_points - 1);
    std::vector<double> row(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i)
        row[static_cast<std::size_t>(i)] = family.image(xi_min + i * h, t);

    // Tolerance floor: alternating finite differences of a smooth completely
    // monotone image sit near round-off of the sampled values.
    const double floor_tol = 1e-9;
    double worst = 0.0;
    for (int m = 0; m <= max_order; ++m) {
        if (m > 0) {
            for (std::size_t i = 0; i + 1 < row.size(); ++i)
                row[i] = row[i + 1] - row[i];
            row.pop_back();
        }
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        for (double d : row) {
            const double signed_value = sign * d;
            if (signed_value < -floor_tol)
                worst = std::min(worst, signed_value);
        }
    }
    return worst;
}

namespace {

SmearingFamily family_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family"))
        throw FamilyError("family file must be an object with a \"family\" key");
    const std::string kind = j.at("family").get<std::string>();
    if (kind == "gamma") {
        if (!j.contains("b") || !j.contains("c"))
            throw FamilyError("gamma family requires \"b\" and \"c\"");
        return SmearingFamily::gamma(j.at("b").get<double>(),
                                     j.at("c").get<double>());
    }
    if (kind == "custom") {
        if (!j.contains("F"))
            throw FamilyError("custom family requires an \"F\" expression");
        ImagePolicy policy = ImagePolicy::Stationary;
        if (j.contains("image")) {
            const std::string p = j.at("image").get<std::string>();
            if (p == "scaled")
                policy = ImagePolicy::Scaled;
            else if (p == "stationary")
                policy = ImagePolicy::Stationary;
            else
                throw FamilyError("image policy must be \"scaled\" or "
                                  "\"stationary\"");
        }
        double kappa = 1.0;
        if (j.contains("kappa")) kappa = j.at("kappa").get<double>();
        return SmearingFamily::custom(j.at("F").get<std::string>(), policy,
                                      kappa);
    }
    throw FamilyError("unknown family kind \"" + kind + "\"");
}

}  // namespace

SmearingFamily load_family_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw FamilyError(std::string("family JSON parse error: ") + e.what());
    }
    try {
        return family_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw FamilyError(std::string("family JSON field error: ") + e.what());
    }
}

SmearingFamily load_family_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FamilyError("cannot open family file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_family_json(ss.str());
}

}  // namespace smearkit
