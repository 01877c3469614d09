#pragma once

#include "matrix.hpp"
#include "system.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chebyconvex {

/// Strictly increasing point tuple x_1 < ... < x_k.
class SimplexTuple {
  public:
    SimplexTuple() = default;
    explicit SimplexTuple(std::vector<Scalar> points) : points_(std::move(points)) {
        for (std::size_t i = 1; i < points_.size(); ++i)
            if (!(points_[i - 1] < points_[i])) throw std::invalid_argument("tuple is not strictly increasing");
    }

    std::size_t arity() const { return points_.size(); }
    const std::vector<Scalar>& points() const { return points_; }
    const Scalar& operator[](std::size_t i) const { return points_[i]; }
    bool all_exact() const {
        for (const auto& p : points_)
            if (!p.is_exact()) return false;
        return true;
    }
    bool inside(const Interval& domain) const {
        for (const auto& p : points_)
            if (!domain.contains(p)) return false;
        return true;
    }

  private:
    std::vector<Scalar> points_;
};

namespace detail {

/// Determinant of rows = functions, columns = points.
///
/// In exact mode the exact engine is tried first and the float engine is used
/// when some entry or intermediate is not exactly representable.
inline DetValue collocation_det(std::span<const Function> rows, std::span<const Scalar> points, Mode mode) {
    const std::size_t n = rows.size();
    if (points.size() != n) throw std::invalid_argument("collocation matrix must be square");
    if (mode == Mode::Exact) {
        try {
            Matrix<ExactValue> m(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i].eval_exact(points[j]);
            return DetValue::from_exact(det_exact(std::move(m)));
        } catch (const NotExact&) {
        }
    }
    Matrix<double> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i].eval_float(points[j]);
    return det_float(m);
}

inline void require_arity(const SimplexTuple& t, std::size_t expected) {
    if (t.arity() != expected)
        throw std::invalid_argument("tuple arity " + std::to_string(t.arity()) + " does not match expected " +
                                    std::to_string(expected));
}

} // namespace detail

/// Phi_omega(x_1, ..., x_n) = det(omega_i(x_j)).
inline DetValue phi_system(const ChebSystem& system, const SimplexTuple& tuple, Mode mode = Mode::Exact) {
    detail::require_arity(tuple, system.dim());
    return detail::collocation_det(system.components(), tuple.points(), mode);
}

/// Phi_(omega,f)(x_0, ..., x_n): the system rows bordered by a last row of f.
inline DetValue phi_bordered(const ChebSystem& system, const Function& f, const SimplexTuple& tuple,
                             Mode mode = Mode::Exact) {
    detail::require_arity(tuple, system.dim() + 1);
    std::vector<Function> rows = system.components();
    rows.push_back(f);
    return detail::collocation_det(rows, tuple.points(), mode);
}

/// Quotient of two determinant values with propagated error bound.
inline DetValue divide(const DetValue& num, const DetValue& den) {
    if (num.exact && den.exact) {
        if (den.exact->is_zero()) throw std::domain_error("zero denominator");
        return DetValue::from_exact(*num.exact / *den.exact);
    }
    const double d = std::abs(den.value);
    if (d <= den.abs_error_bound) return DetValue::from_float(num.value / den.value, HUGE_VAL);
    const double r = num.value / den.value;
    const double bound = (num.abs_error_bound + std::abs(r) * den.abs_error_bound) / (d - den.abs_error_bound) +
                         4.0 * std::numeric_limits<double>::epsilon() * std::abs(r);
    return DetValue::from_float(r, bound);
}

/// Sum of determinant values; exact while every term is exact and summable.
inline DetValue sum(std::span<const DetValue> terms) {
    bool exact = true;
    for (const auto& t : terms) exact = exact && t.exact;
    if (exact) {
        try {
            ExactValue acc;
            for (const auto& t : terms) acc += *t.exact;
            return DetValue::from_exact(std::move(acc));
        } catch (const NotExact&) {
        }
    }
    double v = 0.0, bound = 0.0, mag = 0.0;
    for (const auto& t : terms) {
        v += t.value;
        bound += t.abs_error_bound;
        mag += std::abs(t.value);
    }
    bound += static_cast<double>(terms.size()) * std::numeric_limits<double>::epsilon() * mag;
    return DetValue::from_float(v, bound);
}

} // namespace chebyconvex
