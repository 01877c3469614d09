#pragma once

#include "exact.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chebyconvex {

/// Node of a function expression tree. Implementations are immutable.
class FunctionNode {
  public:
    virtual ~FunctionNode() = default;
    /// Exact value at x; throws NotExact when the value is not representable.
    virtual ExactValue eval_exact(const Scalar& x) const = 0;
    virtual double eval_float(const Scalar& x) const = 0;
    virtual std::string describe() const = 0;
    /// True only when positivity on the whole real line is known symbolically.
    virtual bool known_positive() const { return false; }
    /// The finite set of points where the function is defined, if it is finite.
    virtual std::optional<std::vector<Scalar>> support() const { return std::nullopt; }
};

/// Handle to a real function of one variable (shared, immutable).
class Function {
  public:
    Function() = default;
    explicit Function(std::shared_ptr<const FunctionNode> node) : node_(std::move(node)) {}

    static Function constant(const Scalar& c);
    static Function identity();
    /// c0 + c1 x + ... + ck x^k
    static Function polynomial(std::vector<Surd> coefficients);
    static Function monomial(unsigned degree) {
        std::vector<Surd> c(degree + 1);
        c.back() = Surd(1);
        return polynomial(std::move(c));
    }
    /// exp(rate * x)
    static Function exponential(const Surd& rate);
    /// Defined only at the given abscissae, which must be strictly increasing.
    static Function tabulated(std::vector<std::pair<Scalar, Scalar>> samples);

    ExactValue eval_exact(const Scalar& x) const { return node().eval_exact(x); }
    double eval_float(const Scalar& x) const { return node().eval_float(x); }
    std::string describe() const { return node().describe(); }
    bool known_positive() const { return node().known_positive(); }
    std::optional<std::vector<Scalar>> support() const { return node().support(); }
    bool valid() const { return static_cast<bool>(node_); }
    const FunctionNode& node() const {
        if (!node_) throw std::logic_error("empty function handle");
        return *node_;
    }

  private:
    std::shared_ptr<const FunctionNode> node_;
};

namespace nodes {

class Constant final : public FunctionNode {
  public:
    explicit Constant(Scalar c) : c_(std::move(c)) {}
    ExactValue eval_exact(const Scalar&) const override {
        if (!c_.is_exact()) throw NotExact("inexact constant");
        return c_.exact();
    }
    double eval_float(const Scalar&) const override { return c_.approx(); }
    std::string describe() const override { return c_.to_string(); }
    bool known_positive() const override { return c_.sign() > 0; }

  private:
    Scalar c_;
};

class Identity final : public FunctionNode {
  public:
    ExactValue eval_exact(const Scalar& x) const override { return x.exact(); }
    double eval_float(const Scalar& x) const override { return x.approx(); }
    std::string describe() const override { return "x"; }
};

class Polynomial final : public FunctionNode {
  public:
    explicit Polynomial(std::vector<Surd> c) : c_(std::move(c)) {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
        for (const auto& v : c_) d_.push_back(v.to_double());
    }
    ExactValue eval_exact(const Scalar& x) const override {
        const Surd& t = x.exact();
        Surd acc;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
        return acc;
    }
    double eval_float(const Scalar& x) const override {
        const double t = x.approx();
        double acc = 0.0;
        for (auto it = d_.rbegin(); it != d_.rend(); ++it) acc = acc * t + *it;
        return acc;
    }
    std::string describe() const override {
        if (c_.empty()) return "0";
        std::string out;
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (c_[k].is_zero()) continue;
            if (!out.empty()) out += " + ";
            const std::string coef = "(" + c_[k].to_string() + ")";
            out += k == 0 ? coef : coef + "*x^" + std::to_string(k);
        }
        return out;
    }
    bool known_positive() const override { return c_.size() == 1 && c_[0].sign() > 0; }

  private:
    std::vector<Surd> c_;
    std::vector<double> d_;
};

class Exponential final : public FunctionNode {
  public:
    explicit Exponential(Surd rate) : rate_(std::move(rate)), rate_d_(rate_.to_double()) {}
    ExactValue eval_exact(const Scalar& x) const override { return {Surd(1), rate_ * x.exact()}; }
    double eval_float(const Scalar& x) const override { return std::exp(rate_d_ * x.approx()); }
    std::string describe() const override { return "exp((" + rate_.to_string() + ")*x)"; }
    bool known_positive() const override { return true; }

  private:
    Surd rate_;
    double rate_d_;
};

enum class UnaryOp { Negate, Abs, Exp };

class Unary final : public FunctionNode {
  public:
    Unary(UnaryOp op, Function arg) : op_(op), arg_(std::move(arg)) {}
    ExactValue eval_exact(const Scalar& x) const override {
        ExactValue v = arg_.eval_exact(x);
        switch (op_) {
        case UnaryOp::Negate: return -v;
        case UnaryOp::Abs: return v.sign() < 0 ? -v : v;
        case UnaryOp::Exp:
            if (!v.is_algebraic()) throw NotExact("exp of a transcendental value");
            return {Surd(1), v.coef()};
        }
        throw std::logic_error("unreachable");
    }
    double eval_float(const Scalar& x) const override {
        const double v = arg_.eval_float(x);
        switch (op_) {
        case UnaryOp::Negate: return -v;
        case UnaryOp::Abs: return std::abs(v);
        case UnaryOp::Exp: return std::exp(v);
        }
        throw std::logic_error("unreachable");
    }
    std::string describe() const override {
        switch (op_) {
        case UnaryOp::Negate: return "-(" + arg_.describe() + ")";
        case UnaryOp::Abs: return "abs(" + arg_.describe() + ")";
        case UnaryOp::Exp: return "exp(" + arg_.describe() + ")";
        }
        return {};
    }
    bool known_positive() const override { return op_ == UnaryOp::Exp; }
    std::optional<std::vector<Scalar>> support() const override { return arg_.support(); }

  private:
    UnaryOp op_;
    Function arg_;
};

enum class BinaryOp { Add, Sub, Mul, Div };

class Binary final : public FunctionNode {
  public:
    Binary(BinaryOp op, Function lhs, Function rhs) : op_(op), lhs_(std::move(lhs)), rhs_(std::move(rhs)) {}
    ExactValue eval_exact(const Scalar& x) const override {
        const ExactValue a = lhs_.eval_exact(x), b = rhs_.eval_exact(x);
        switch (op_) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div: return a / b;
        }
        throw std::logic_error("unreachable");
    }
    double eval_float(const Scalar& x) const override {
        const double a = lhs_.eval_float(x), b = rhs_.eval_float(x);
        switch (op_) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div: return a / b;
        }
        throw std::logic_error("unreachable");
    }
    std::string describe() const override {
        static const char* sym[] = {" + ", " - ", " * ", " / "};
        return "(" + lhs_.describe() + sym[static_cast<int>(op_)] + rhs_.describe() + ")";
    }
    bool known_positive() const override {
        switch (op_) {
        case BinaryOp::Add:
        case BinaryOp::Mul:
        case BinaryOp::Div: return lhs_.known_positive() && rhs_.known_positive();
        case BinaryOp::Sub: return false;
        }
        return false;
    }
    std::optional<std::vector<Scalar>> support() const override {
        auto a = lhs_.support(), b = rhs_.support();
        if (!a) return b;
        if (!b) return a;
        std::vector<Scalar> out;
        std::set_intersection(a->begin(), a->end(), b->begin(), b->end(), std::back_inserter(out));
        return out;
    }

  private:
    BinaryOp op_;
    Function lhs_, rhs_;
};

class Power final : public FunctionNode {
  public:
    Power(Function base, unsigned exponent) : base_(std::move(base)), exponent_(exponent) {}
    ExactValue eval_exact(const Scalar& x) const override {
        const ExactValue b = base_.eval_exact(x);
        ExactValue acc(1);
        for (unsigned i = 0; i < exponent_; ++i) acc *= b;
        return acc;
    }
    double eval_float(const Scalar& x) const override {
        return std::pow(base_.eval_float(x), static_cast<double>(exponent_));
    }
    std::string describe() const override { return "(" + base_.describe() + ")^" + std::to_string(exponent_); }
    bool known_positive() const override { return exponent_ == 0 || base_.known_positive(); }
    std::optional<std::vector<Scalar>> support() const override { return base_.support(); }

  private:
    Function base_;
    unsigned exponent_;
};

class Tabulated final : public FunctionNode {
  public:
    explicit Tabulated(std::vector<std::pair<Scalar, Scalar>> samples) : samples_(std::move(samples)) {
        if (samples_.empty()) throw std::invalid_argument("tabulated function needs samples");
        for (std::size_t i = 1; i < samples_.size(); ++i)
            if (!(samples_[i - 1].first < samples_[i].first))
                throw std::invalid_argument("tabulated abscissae must be strictly increasing");
    }
    ExactValue eval_exact(const Scalar& x) const override {
        const auto& v = lookup(x).second;
        if (!v.is_exact()) throw NotExact("tabulated value is inexact");
        return v.exact();
    }
    double eval_float(const Scalar& x) const override { return lookup(x).second.approx(); }
    std::string describe() const override { return "table[" + std::to_string(samples_.size()) + " samples]"; }
    const std::vector<std::pair<Scalar, Scalar>>& samples() const { return samples_; }
    std::optional<std::vector<Scalar>> support() const override {
        std::vector<Scalar> xs;
        for (const auto& s : samples_) xs.push_back(s.first);
        return xs;
    }

  private:
    std::vector<std::pair<Scalar, Scalar>> samples_;

    const std::pair<Scalar, Scalar>& lookup(const Scalar& x) const {
        auto it = std::lower_bound(samples_.begin(), samples_.end(), x,
                                   [](const auto& s, const Scalar& v) { return s.first < v; });
        if (it != samples_.end() && it->first == x) return *it;
        // Inexact abscissae match within a few ulps.
        if (!x.is_exact() || (it != samples_.end() && !it->first.is_exact())) {
            for (auto c : {it, it == samples_.begin() ? it : std::prev(it)}) {
                if (c == samples_.end()) continue;
                const double a = c->first.approx(), b = x.approx();
                if (std::abs(a - b) <= 4e-15 * std::max({1.0, std::abs(a), std::abs(b)})) return *c;
            }
        }
        throw EvaluationError("tabulated function evaluated off its abscissae at " + x.to_string());
    }
};

} // namespace nodes

inline Function Function::constant(const Scalar& c) { return Function(std::make_shared<nodes::Constant>(c)); }
inline Function Function::identity() { return Function(std::make_shared<nodes::Identity>()); }
inline Function Function::polynomial(std::vector<Surd> c) {
    return Function(std::make_shared<nodes::Polynomial>(std::move(c)));
}
inline Function Function::exponential(const Surd& rate) {
    return Function(std::make_shared<nodes::Exponential>(rate));
}
inline Function Function::tabulated(std::vector<std::pair<Scalar, Scalar>> samples) {
    return Function(std::make_shared<nodes::Tabulated>(std::move(samples)));
}

inline Function operator+(Function a, Function b) {
    return Function(std::make_shared<nodes::Binary>(nodes::BinaryOp::Add, std::move(a), std::move(b)));
}
inline Function operator-(Function a, Function b) {
    return Function(std::make_shared<nodes::Binary>(nodes::BinaryOp::Sub, std::move(a), std::move(b)));
}
inline Function operator*(Function a, Function b) {
    return Function(std::make_shared<nodes::Binary>(nodes::BinaryOp::Mul, std::move(a), std::move(b)));
}
inline Function operator/(Function a, Function b) {
    return Function(std::make_shared<nodes::Binary>(nodes::BinaryOp::Div, std::move(a), std::move(b)));
}
inline Function operator-(Function a) {
    return Function(std::make_shared<nodes::Unary>(nodes::UnaryOp::Negate, std::move(a)));
}
inline Function operator*(const Scalar& c, Function f) { return Function::constant(c) * std::move(f); }
inline Function abs(Function f) { return Function(std::make_shared<nodes::Unary>(nodes::UnaryOp::Abs, std::move(f))); }
inline Function exp(Function f) { return Function(std::make_shared<nodes::Unary>(nodes::UnaryOp::Exp, std::move(f))); }
inline Function pow(Function f, unsigned k) { return Function(std::make_shared<nodes::Power>(std::move(f), k)); }

} // namespace chebyconvex
