#pragma once

#include "function.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chebyconvex {

struct ParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

/// Recursive-descent parser for one-variable expressions:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' integer)?
///   primary := number | 'x' | 't' | name | call '(' expr ')' | '(' expr ')'
///
/// Integer literals are exact (so 1/3 stays a rational); decimal literals
/// are inexact. Constant subexpressions are folded. `name` refers to a
/// previously declared function.
class ExprParser {
  public:
    ExprParser(std::string_view text, const std::map<std::string, Function>& names) : s_(text), names_(names) {}

    Function parse() {
        Node n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n.fn();
    }

    std::optional<Scalar> parse_constant() {
        Node n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n.constant;
    }

  private:
    // Either a folded constant or a function of x.
    struct Node {
        std::optional<Scalar> constant;
        Function f;
        Function fn() const { return constant ? Function::constant(*constant) : f; }
    };

    std::string_view s_;
    const std::map<std::string, Function>& names_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("expression '" + std::string(s_) + "': " + what + " at column " + std::to_string(pos_ + 1));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static Node constant(Scalar c) { return {std::move(c), {}}; }
    static Node function(Function f) { return {std::nullopt, std::move(f)}; }

    Node expr() {
        Node acc = term();
        while (true) {
            if (eat('+')) {
                Node r = term();
                acc = (acc.constant && r.constant) ? constant(*acc.constant + *r.constant) : function(acc.fn() + r.fn());
            } else if (eat('-')) {
                Node r = term();
                acc = (acc.constant && r.constant) ? constant(*acc.constant - *r.constant) : function(acc.fn() - r.fn());
            } else {
                return acc;
            }
        }
    }

    Node term() {
        Node acc = unary();
        while (true) {
            if (eat('*')) {
                Node r = unary();
                acc = (acc.constant && r.constant) ? constant(*acc.constant * *r.constant) : function(acc.fn() * r.fn());
            } else if (eat('/')) {
                Node r = unary();
                if (r.constant && r.constant->sign() == 0) fail("division by zero");
                acc = (acc.constant && r.constant) ? constant(*acc.constant / *r.constant) : function(acc.fn() / r.fn());
            } else {
                return acc;
            }
        }
    }

    Node unary() {
        if (eat('-')) {
            Node n = unary();
            return n.constant ? constant(Scalar(0) - *n.constant) : function(-n.f);
        }
        if (eat('+')) return unary();
        return power();
    }

    Node power() {
        Node base = primary();
        if (!eat('^')) return base;
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected a nonnegative integer exponent");
        const unsigned k = static_cast<unsigned>(std::stoul(std::string(s_.substr(start, pos_ - start))));
        if (base.constant) {
            Scalar acc(1);
            for (unsigned i = 0; i < k; ++i) acc = acc * *base.constant;
            return constant(acc);
        }
        return function(pow(base.f, k));
    }

    Node primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (eat('(')) {
            Node n = expr();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string id(s_.substr(start, pos_ - start));
            skip();
            if (pos_ < s_.size() && s_[pos_] == '(') {
                ++pos_;
                Node arg = expr();
                if (!eat(')')) fail("expected ')'");
                return call(id, arg);
            }
            if (id == "x" || id == "t") return function(Function::identity());
            if (id == "e") return constant(Scalar::real(std::exp(1.0)));
            if (auto it = names_.find(id); it != names_.end()) return function(it->second);
            fail("unknown name '" + id + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Node call(const std::string& id, const Node& arg) {
        if (id == "exp") {
            if (arg.constant && arg.constant->sign() == 0) return constant(Scalar(1));
            // exp(c*x) with exact c keeps the exact exponential form
            return function(exp(arg.fn()));
        }
        if (id == "abs") {
            if (arg.constant) return constant(arg.constant->sign() < 0 ? Scalar(0) - *arg.constant : *arg.constant);
            return function(abs(arg.f));
        }
        if (id == "sqrt") {
            if (!arg.constant) fail("sqrt is supported for constants only");
            if (arg.constant->sign() < 0) fail("sqrt of a negative constant");
            if (arg.constant->is_exact() && arg.constant->exact().is_rational())
                return constant(Scalar(Surd::sqrt(arg.constant->exact().rational())));
            return constant(Scalar::real(std::sqrt(arg.constant->approx())));
        }
        fail("unknown function '" + id + "'");
    }

    Node number() {
        const std::size_t start = pos_;
        bool decimal = false;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            decimal = true;
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                decimal = true;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            } else {
                pos_ = save;
            }
        }
        const std::string lit(s_.substr(start, pos_ - start));
        if (lit == ".") fail("malformed number");
        if (decimal) return constant(Scalar::real(std::stod(lit)));
        return constant(Scalar(mpq_class(mpz_class(lit))));
    }
};

} // namespace detail

/// Parses an expression in x (or t) into a function.
inline Function parse_function(std::string_view text, const std::map<std::string, Function>& names = {}) {
    return detail::ExprParser(text, names).parse();
}

/// Parses a constant expression such as "1/3", "sqrt(2)/2" or "0.25" (inexact).
inline Scalar parse_scalar(std::string_view text) {
    static const std::map<std::string, Function> none;
    auto c = detail::ExprParser(text, none).parse_constant();
    if (!c) throw ParseError("'" + std::string(text) + "' is not a constant");
    return *c;
}

/// Like parse_scalar, but the value must be exact.
inline Surd parse_exact(std::string_view text) {
    const Scalar s = parse_scalar(text);
    if (!s.is_exact()) throw ParseError("'" + std::string(text) + "' must be exact (integers, p/q, sqrt of rationals)");
    return s.exact();
}

} // namespace chebyconvex
