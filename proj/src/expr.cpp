#include "smearkit/expr.hpp"

#include <cctype>
#include <cstdlib>

namespace smearkit {

namespace {

struct Token {
    enum class Type { Num, Ident, Op, LParen, RParen, Comma, End };
    Type type;
    double value = 0.0;
    std::string ident;
    char op = 0;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) {}

    Token next() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        Token t;
        t.pos = i_;
        if (i_ >= s_.size()) {
            t.type = Token::Type::End;
            return t;
        }
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + i_;
            char* end = nullptr;
            t.value = std::strtod(begin, &end);
            if (end == begin) throw ExprError("malformed number", i_);
            i_ += static_cast<std::size_t>(end - begin);
            t.type = Token::Type::Num;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
                ++j;
            t.type = Token::Type::Ident;
            t.ident = s_.substr(i_, j - i_);
            i_ = j;
            return t;
        }
        ++i_;
        switch (c) {
            case '+': case '-': case '*': case '/': case '^':
                t.type = Token::Type::Op;
                t.op = c;
                return t;
            case '(': t.type = Token::Type::LParen; return t;
            case ')': t.type = Token::Type::RParen; return t;
            case ',': t.type = Token::Type::Comma; return t;
            default: break;
        }
        throw ExprError(std::string("unexpected character '") + c + "'", t.pos);
    }

private:
    const std::string& s_;
    std::size_t i_ = 0;
};

}  // namespace

class ExprParser {
public:
    explicit ExprParser(const std::string& text) : lex_(text) { advance(); }

    Expr run(const std::string& text) {
        Expr e;
        e.text_ = text;
        nodes_ = &e.nodes_;
        e.root_ = parse_sum();
        if (cur_.type != Token::Type::End)
            throw ExprError("trailing input after expression", cur_.pos);
        return e;
    }

private:
    using Kind = Expr::Kind;

    void advance() { cur_ = lex_.next(); }

    int add_node(Kind k, int a = -1, int b = -1, double v = 0.0) {
        nodes_->push_back(Expr::Node{k, v, a, b});
        return static_cast<int>(nodes_->size()) - 1;
    }

    int parse_sum() {
        int lhs = parse_product();
        while (cur_.type == Token::Type::Op && (cur_.op == '+' || cur_.op == '-')) {
            char op = cur_.op;
            advance();
            int rhs = parse_product();
            lhs = add_node(op == '+' ? Kind::Add : Kind::Sub, lhs, rhs);
        }
        return lhs;
    }

    int parse_product() {
        int lhs = parse_unary();
        while (cur_.type == Token::Type::Op && (cur_.op == '*' || cur_.op == '/')) {
            char op = cur_.op;
            advance();
            int rhs = parse_unary();
            lhs = add_node(op == '*' ? Kind::Mul : Kind::Div, lhs, rhs);
        }
        return lhs;
    }

    int parse_unary() {
        bool negate = false;
        while (cur_.type == Token::Type::Op && (cur_.op == '+' || cur_.op == '-')) {
            if (cur_.op == '-') negate = !negate;
            advance();
        }
        int e = parse_power();
        return negate ? add_node(Kind::Neg, e) : e;
    }

    int parse_power() {
        int base = parse_primary();
        if (cur_.type == Token::Type::Op && cur_.op == '^') {
            advance();
            // right-associative; exponent may itself carry a sign
            int exponent = parse_unary();
            return add_node(Kind::Pow, base, exponent);
        }
        return base;
    }

    int parse_primary() {
        if (cur_.type == Token::Type::Num) {
            double v = cur_.value;
            advance();
            return add_node(Kind::Num, -1, -1, v);
        }
        if (cur_.type == Token::Type::LParen) {
            advance();
            int e = parse_sum();
            expect_rparen();
            return e;
        }
        if (cur_.type == Token::Type::Ident) {
            std::string name = cur_.ident;
            std::size_t pos = cur_.pos;
            advance();
            if (name == "x") return add_node(Kind::Var);
            if (name == "pi") return add_node(Kind::Num, -1, -1, 3.14159265358979323846);
            if (cur_.type != Token::Type::LParen)
                throw ExprError("unknown identifier '" + name + "'", pos);
            advance();
            if (name == "log" || name == "exp") {
                int arg = parse_sum();
                expect_rparen();
                return add_node(name == "log" ? Kind::Log : Kind::Exp, arg);
            }
            if (name == "pow") {
                int a = parse_sum();
                if (cur_.type != Token::Type::Comma)
                    throw ExprError("pow expects two arguments", cur_.pos);
                advance();
                int b = parse_sum();
                expect_rparen();
                return add_node(Kind::Pow, a, b);
            }
            throw ExprError("unknown function '" + name + "'", pos);
        }
        throw ExprError("expected a value", cur_.pos);
    }

    void expect_rparen() {
        if (cur_.type != Token::Type::RParen)
            throw ExprError("expected ')'", cur_.pos);
        advance();
    }

    Lexer lex_;
    Token cur_;
    std::vector<Expr::Node>* nodes_ = nullptr;
};

Expr Expr::parse(const std::string& text) {
    ExprParser p(text);
    return p.run(text);
}

}  // namespace smearkit
