#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace smearkit {

// Truncated Taylor series ("jet") around an expansion point, to a fixed order.
//
// A jet stores coefficients c[0..k] of  f(x0 + h) = sum_j c[j] h^j + O(h^{k+1}).
// All arithmetic is the exact truncation of the formal power-series operation,
// so the k-th derivative of any composite expression is recovered without any
// finite-difference error:  f^{(j)}(x0) = j! * c[j].
//
// Standard recurrences (Brent & Kung style) are used for the transcendental
// ops. With b = f(a):
//   exp:  n b_n = sum_{j=1..n} j a_j b_{n-j}
//   log:  n a_0 b_n = n a_n - sum_{j=1..n-1} j b_j a_{n-j}
//   a^s:  n a_0 b_n = sum_{j=0..n-1} (s(n-j) - j) a_{n-j} b_j
class Jet {
public:
    Jet() = default;

    static Jet constant(int order, double value) {
        Jet j;
        j.c_.assign(static_cast<std::size_t>(order) + 1, 0.0);
        j.c_[0] = value;
        return j;
    }

    static Jet variable(int order, double x0) {
        Jet j = constant(order, x0);
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double coeff(int i) const { return c_[static_cast<std::size_t>(i)]; }
    double& coeff(int i) { return c_[static_cast<std::size_t>(i)]; }

    // k-th derivative at the expansion point: k! * c[k]. Computed with the
    // factorial folded in multiplicatively so no intermediate overflows for
    // representable results.
    double derivative(int k) const {
        double result = c_[static_cast<std::size_t>(k)];
        for (int j = 2; j <= k; ++j) result *= j;
        return result;
    }

    bool all_finite() const {
        for (double v : c_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    Jet operator-() const {
        Jet r = *this;
        for (double& v : r.c_) v = -v;
        return r;
    }

    friend Jet operator+(const Jet& a, const Jet& b) {
        Jet r = a;
        check_same(a, b);
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
        return r;
    }
    friend Jet operator-(const Jet& a, const Jet& b) {
        Jet r = a;
        check_same(a, b);
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
        return r;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        check_same(a, b);
        Jet r = constant(a.order(), 0.0);
        const int k = a.order();
        for (int n = 0; n <= k; ++n) {
            double s = 0.0;
            for (int j = 0; j <= n; ++j) s += a.c_[static_cast<std::size_t>(j)] * b.c_[static_cast<std::size_t>(n - j)];
            r.c_[static_cast<std::size_t>(n)] = s;
        }
        return r;
    }
    friend Jet operator/(const Jet& a, const Jet& b) {
        check_same(a, b);
        if (b.c_[0] == 0.0) throw std::domain_error("jet division by zero constant term");
        Jet r = constant(a.order(), 0.0);
        const int k = a.order();
        for (int n = 0; n <= k; ++n) {
            double s = a.c_[static_cast<std::size_t>(n)];
            for (int j = 0; j < n; ++j) s -= r.c_[static_cast<std::size_t>(j)] * b.c_[static_cast<std::size_t>(n - j)];
            r.c_[static_cast<std::size_t>(n)] = s / b.c_[0];
        }
        return r;
    }

    friend Jet operator+(const Jet& a, double s) { Jet r = a; r.c_[0] += s; return r; }
    friend Jet operator+(double s, const Jet& a) { return a + s; }
    friend Jet operator-(const Jet& a, double s) { Jet r = a; r.c_[0] -= s; return r; }
    friend Jet operator-(double s, const Jet& a) { return -(a - s); }
    friend Jet operator*(const Jet& a, double s) {
        Jet r = a;
        for (double& v : r.c_) v *= s;
        return r;
    }
    friend Jet operator*(double s, const Jet& a) { return a * s; }
    friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
    friend Jet operator/(double s, const Jet& a) { return constant(a.order(), s) / a; }

    friend Jet exp(const Jet& a) {
        Jet r = constant(a.order(), std::exp(a.c_[0]));
        const int k = a.order();
        for (int n = 1; n <= k; ++n) {
            double s = 0.0;
            for (int j = 1; j <= n; ++j) s += j * a.c_[static_cast<std::size_t>(j)] * r.c_[static_cast<std::size_t>(n - j)];
            r.c_[static_cast<std::size_t>(n)] = s / n;
        }
        return r;
    }

    friend Jet log(const Jet& a) {
        if (!(a.c_[0] > 0.0)) throw std::domain_error("jet log of non-positive constant term");
        Jet r = constant(a.order(), std::log(a.c_[0]));
        const int k = a.order();
        for (int n = 1; n <= k; ++n) {
            double s = n * a.c_[static_cast<std::size_t>(n)];
            for (int j = 1; j < n; ++j) s -= j * r.c_[static_cast<std::size_t>(j)] * a.c_[static_cast<std::size_t>(n - j)];
            r.c_[static_cast<std::size_t>(n)] = s / (n * a.c_[0]);
        }
        return r;
    }

    friend Jet pow(const Jet& a, double s) {
        if (!(a.c_[0] > 0.0)) throw std::domain_error("jet pow of non-positive base");
        Jet r = constant(a.order(), std::pow(a.c_[0], s));
        const int k = a.order();
        for (int n = 1; n <= k; ++n) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j)
                acc += (s * (n - j) - j) * a.c_[static_cast<std::size_t>(n - j)] * r.c_[static_cast<std::size_t>(j)];
            r.c_[static_cast<std::size_t>(n)] = acc / (n * a.c_[0]);
        }
        return r;
    }

    friend Jet pow(const Jet& a, const Jet& b) { return exp(b * log(a)); }
    friend Jet pow(double base, const Jet& e) {
        if (!(base > 0.0)) throw std::domain_error("jet pow of non-positive base");
        return exp(e * std::log(base));
    }

private:
    static void check_same(const Jet& a, const Jet& b) {
        if (a.c_.size() != b.c_.size())
            throw std::logic_error("jet order mismatch");
    }

    std::vector<double> c_;
};

// Expr evaluation makes numeric literals through this hook (found by ADL).
inline Jet constant_like(const Jet& proto, double v) {
    return Jet::constant(proto.order(), v);
}

}  // namespace smearkit
