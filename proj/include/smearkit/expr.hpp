#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace smearkit {

// Error raised for both parse failures (with source position) and evaluation
// domain violations (log of a non-positive value, etc).
class ExprError : public std::runtime_error {
public:
    explicit ExprError(const std::string& what, std::size_t pos = std::string::npos)
        : std::runtime_error(what), position(pos) {}
    std::size_t position;
};

namespace expr_detail {

// Fallback for plain arithmetic types. Types without a converting
// constructor (Jet) supply their own overload in namespace smearkit, found
// by argument-dependent lookup at the call site.
template <class T>
T constant_like(const T& /*proto*/, double v) {
    return T(v);
}

}  // namespace expr_detail

// A parsed arithmetic expression in one variable `x`.
//
// Grammar:  + - * / ^  log(u)  exp(u)  pow(u, w)  numeric literals  pi
// `^` is sugar for pow. Unary minus binds looser than `^`.
//
// The tree is stored as a flat arena so evaluation is allocation-free and can
// be instantiated for any coefficient type supporting the arithmetic ops and
// log/exp/pow (double for plain evaluation, Jet for derivatives).
class Expr {
public:
    static Expr parse(const std::string& text);

    template <class T>
    T eval(const T& x) const {
        if (nodes_.empty()) throw ExprError("empty expression");
        return eval_node<T>(root_, x);
    }

    double operator()(double x) const { return eval<double>(x); }

    const std::string& text() const { return text_; }

private:
    enum class Kind { Num, Var, Add, Sub, Mul, Div, Neg, Log, Exp, Pow };

    struct Node {
        Kind kind;
        double value = 0.0;  // Kind::Num only
        int a = -1;
        int b = -1;
    };

    template <class T>
    T eval_node(int idx, const T& x) const {
        using std::exp;
        using std::log;
        using std::pow;
        const Node& n = nodes_[static_cast<std::size_t>(idx)];
        switch (n.kind) {
            case Kind::Num: {
                using expr_detail::constant_like;
                return constant_like(x, n.value);
            }
            case Kind::Var: return x;
            case Kind::Add: return eval_node<T>(n.a, x) + eval_node<T>(n.b, x);
            case Kind::Sub: return eval_node<T>(n.a, x) - eval_node<T>(n.b, x);
            case Kind::Mul: return eval_node<T>(n.a, x) * eval_node<T>(n.b, x);
            case Kind::Div: return eval_node<T>(n.a, x) / eval_node<T>(n.b, x);
            case Kind::Neg: return -eval_node<T>(n.a, x);
            case Kind::Log: return log(eval_node<T>(n.a, x));
            case Kind::Exp: return exp(eval_node<T>(n.a, x));
            case Kind::Pow:
                // A literal exponent keeps the power recurrence usable for
                // jets (and avoids exp(log()) round-off for plain doubles).
                if (nodes_[static_cast<std::size_t>(n.b)].kind == Kind::Num) {
                    return pow(eval_node<T>(n.a, x),
                               nodes_[static_cast<std::size_t>(n.b)].value);
                }
                return pow(eval_node<T>(n.a, x), eval_node<T>(n.b, x));
        }
        throw ExprError("corrupt expression node");
    }

    friend class ExprParser;

    std::vector<Node> nodes_;
    int root_ = -1;
    std::string text_;
};

}  // namespace smearkit
