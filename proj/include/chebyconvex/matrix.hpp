#pragma once

#include "exact.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chebyconvex {

enum class Mode { Exact, Float };

inline const char* to_string(Mode m) { return m == Mode::Exact ? "EXACT" : "FLOAT"; }

/// Dense row-major square-or-rectangular matrix.
template <class T>
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw std::invalid_argument("ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    void swap_rows(std::size_t a, std::size_t b) {
        for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
    }
    void swap_cols(std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = T(i == j ? 1 : 0);
        return m;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

namespace detail {

template <class T>
bool is_zero(const T& v) {
    if constexpr (requires { v.is_zero(); })
        return v.is_zero();
    else
        return v == 0;
}

} // namespace detail

/// Determinant by fraction-free (Bareiss) elimination.
///
/// Every division is exact, so T only needs field operations; for
/// ExactValue entries the column exponents must stay homogeneous, otherwise
/// NotExact propagates.
template <class T>
T det_exact(Matrix<T> m) {
    if (!m.square()) throw std::invalid_argument("determinant of a non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return T(1);
    int sign = 1;
    T prev(1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (detail::is_zero(m(k, k))) {
            std::size_t p = k + 1;
            while (p < n && detail::is_zero(m(p, k))) ++p;
            if (p == n) return T(0);
            m.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        }
        prev = m(k, k);
    }
    return sign < 0 ? T(0) - m(n - 1, n - 1) : m(n - 1, n - 1);
}

/// A determinant (or ratio of determinants) together with how it was computed.
///
/// Exact values carry no error. A float value's sign is only meaningful when
/// |value| exceeds abs_error_bound.
struct DetValue {
    double value = 0.0;
    Mode mode = Mode::Float;
    double abs_error_bound = 0.0;
    std::optional<ExactValue> exact;

    static DetValue from_exact(ExactValue v) {
        DetValue d;
        d.value = v.to_double();
        d.mode = Mode::Exact;
        d.exact = std::move(v);
        return d;
    }
    static DetValue from_float(double v, double bound) {
        DetValue d;
        d.value = v;
        d.abs_error_bound = bound;
        return d;
    }

    bool is_exact() const { return exact.has_value(); }
    bool positive() const { return exact ? exact->sign() > 0 : value > abs_error_bound; }
    bool negative() const { return exact ? exact->sign() < 0 : value < -abs_error_bound; }
    /// Nonnegative under the tolerance policy: value >= -bound.
    bool nonnegative() const { return !negative(); }
    bool zero() const { return exact ? exact->is_zero() : std::abs(value) <= abs_error_bound; }
    bool sign_definite() const { return exact || std::abs(value) > abs_error_bound; }

    std::string to_string() const { return exact ? exact->to_string() : detail::format_double(value); }
};

/// Determinant by partially pivoted LU with a rigorous first-order error bound.
///
/// With L*U = P*A + E and |E| <= gamma_n |L||U| (backward error of Gaussian
/// elimination), multilinearity and Hadamard's inequality give
/// |det(A+E) - det(A)| <= sum_j e_j prod_{k != j} (a_k + e_k), where a_k, e_k
/// are column 2-norms of A and of gamma_n |L||U|. The bound adds the rounding
/// of the pivot product and a safety factor of 2.
inline DetValue det_float(const Matrix<double>& a) {
    if (!a.square()) throw std::invalid_argument("determinant of a non-square matrix");
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!std::isfinite(a(i, j))) throw std::invalid_argument("non-finite matrix entry");
    if (n == 0) return DetValue::from_float(1.0, 0.0);

    Matrix<double> lu = a;
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
        if (p != k) {
            lu.swap_rows(p, k);
            det = -det;
        }
        const double pivot = lu(k, k);
        det *= pivot;
        if (pivot == 0.0) continue;
        for (std::size_t i = k + 1; i < n; ++i) {
            lu(i, k) /= pivot;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
        }
    }

    constexpr double u = std::numeric_limits<double>::epsilon() / 2;
    const double nu = static_cast<double>(n) * u;
    const double gamma = nu / (1.0 - nu);
    std::vector<double> col_a(n, 0.0), col_e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            col_a[j] += a(i, j) * a(i, j);
            double lu_abs = 0.0; // (|L||U|)(i, j), unit lower L
            for (std::size_t k = 0; k <= std::min(i, j); ++k) {
                const double l = k == i ? 1.0 : std::abs(lu(i, k));
                lu_abs += l * std::abs(lu(k, j));
            }
            col_e[j] += lu_abs * lu_abs;
        }
        col_a[j] = std::sqrt(col_a[j]);
        col_e[j] = gamma * std::sqrt(col_e[j]);
    }
    double bound = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double term = col_e[j];
        for (std::size_t k = 0; k < n; ++k)
            if (k != j) term *= col_a[k] + col_e[k];
        bound += term;
    }
    bound += gamma * std::abs(det);
    return DetValue::from_float(det, 2.0 * bound);
}

} // namespace chebyconvex
