#pragma once

#include "surd.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace chebyconvex {

/// Raised when a value cannot be represented in the exact engine; callers
/// fall back to floating point.
struct NotExact : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a function is asked for a value it does not define
/// (tabulated handle off its abscissae, additive map off its module).
struct EvaluationError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Exact value of the form c * exp(E) with c, E in a multi-quadratic field.
///
/// Distinct algebraic exponents give linearly independent exponentials, so the
/// pair (c, E) is unique for nonzero values and equality is decided exactly.
/// Sums require matching exponents; otherwise NotExact is thrown.
class ExactValue {
  public:
    ExactValue() = default;
    ExactValue(const Surd& coef) : coef_(coef) {}
    ExactValue(long v) : coef_(v) {}
    ExactValue(Surd coef, Surd exponent) : coef_(std::move(coef)), exponent_(std::move(exponent)) {
        if (coef_.is_zero()) exponent_ = Surd{};
    }

    const Surd& coef() const { return coef_; }
    const Surd& exponent() const { return exponent_; }
    bool is_zero() const { return coef_.is_zero(); }
    bool is_algebraic() const { return exponent_.is_zero(); }
    int sign() const { return coef_.sign(); }

    /// The algebraic value; throws NotExact when an exponential factor remains.
    const Surd& algebraic() const {
        if (!exponent_.is_zero()) throw NotExact("value carries a transcendental factor");
        return coef_;
    }

    double to_double() const {
        if (exponent_.is_zero()) return coef_.to_double();
        return coef_.to_double() * std::exp(exponent_.to_double());
    }

    std::string to_string() const {
        if (exponent_.is_zero()) return coef_.to_string();
        return "(" + coef_.to_string() + ")*exp(" + exponent_.to_string() + ")";
    }

    ExactValue operator-() const { return {-coef_, exponent_}; }

    friend ExactValue operator+(const ExactValue& x, const ExactValue& y) {
        if (x.is_zero()) return y;
        if (y.is_zero()) return x;
        if (!(x.exponent_ == y.exponent_)) throw NotExact("sum of exponentials with distinct exponents");
        return {x.coef_ + y.coef_, x.exponent_};
    }
    friend ExactValue operator-(const ExactValue& x, const ExactValue& y) { return x + (-y); }
    friend ExactValue operator*(const ExactValue& x, const ExactValue& y) {
        if (x.is_zero() || y.is_zero()) return {};
        return {x.coef_ * y.coef_, x.exponent_ + y.exponent_};
    }
    friend ExactValue operator/(const ExactValue& x, const ExactValue& y) {
        if (y.is_zero()) throw std::domain_error("division by zero");
        if (x.is_zero()) return {};
        return {x.coef_ / y.coef_, x.exponent_ - y.exponent_};
    }
    ExactValue& operator+=(const ExactValue& y) { return *this = *this + y; }
    ExactValue& operator-=(const ExactValue& y) { return *this = *this - y; }
    ExactValue& operator*=(const ExactValue& y) { return *this = *this * y; }
    ExactValue& operator/=(const ExactValue& y) { return *this = *this / y; }

    friend bool operator==(const ExactValue& x, const ExactValue& y) {
        return x.coef_ == y.coef_ && x.exponent_ == y.exponent_;
    }

  private:
    Surd coef_;
    Surd exponent_;
};

/// A real number known either exactly (algebraic) or only as a double.
///
/// Points, steps and tabulated samples are Scalars. Arithmetic stays exact
/// while both operands are exact.
class Scalar {
  public:
    Scalar() : exact_(Surd{}), approx_(0.0) {}
    Scalar(const Surd& s) : exact_(s), approx_(s.to_double()) {}
    Scalar(const mpq_class& q) : Scalar(Surd(q)) {}
    Scalar(long v) : Scalar(Surd(v)) {}
    Scalar(int v) : Scalar(Surd(v)) {}

    static Scalar real(double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite scalar");
        Scalar s;
        s.exact_.reset();
        s.approx_ = v;
        return s;
    }

    bool is_exact() const { return exact_.has_value(); }
    const Surd& exact() const {
        if (!exact_) throw NotExact("scalar is only known approximately");
        return *exact_;
    }
    double approx() const { return approx_; }

    std::string to_string() const;

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        if (a.is_exact() && b.is_exact()) return Scalar(*a.exact_ + *b.exact_);
        return real(a.approx_ + b.approx_);
    }
    friend Scalar operator-(const Scalar& a, const Scalar& b) {
        if (a.is_exact() && b.is_exact()) return Scalar(*a.exact_ - *b.exact_);
        return real(a.approx_ - b.approx_);
    }
    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        if (a.is_exact() && b.is_exact()) return Scalar(*a.exact_ * *b.exact_);
        return real(a.approx_ * b.approx_);
    }
    friend Scalar operator/(const Scalar& a, const Scalar& b) {
        if (a.is_exact() && b.is_exact()) return Scalar(*a.exact_ / *b.exact_);
        return real(a.approx_ / b.approx_);
    }
    Scalar operator-() const { return is_exact() ? Scalar(-*exact_) : real(-approx_); }

    int sign() const {
        if (is_exact()) return exact_->sign();
        return approx_ > 0 ? 1 : (approx_ < 0 ? -1 : 0);
    }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        if (a.is_exact() && b.is_exact()) return *a.exact_ == *b.exact_;
        return a.approx_ == b.approx_;
    }
    friend std::partial_ordering operator<=>(const Scalar& a, const Scalar& b) {
        if (a.is_exact() && b.is_exact()) return *a.exact_ <=> *b.exact_;
        return a.approx_ <=> b.approx_;
    }

  private:
    std::optional<Surd> exact_;
    double approx_;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline std::string Scalar::to_string() const { return exact_ ? exact_->to_string() : detail::format_double(approx_); }

} // namespace chebyconvex
