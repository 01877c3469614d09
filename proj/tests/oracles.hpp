#pragma once

// Reference computations used by the tests. They work on plain mpq_class
// values and share no code with the library.

#include <chebyconvex/chebyconvex.hpp>

#include <gmpxx.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using Q = mpq_class;
using chebyconvex::Scalar;

inline Q q(long p, long d = 1) {
    Q v(p, d);
    v.canonicalize();
    return v;
}

/// det by cofactor expansion along the first row.
inline Q laplace(const std::vector<std::vector<Q>>& a) {
    const std::size_t n = a.size();
    if (n == 0) return 1;
    if (n == 1) return a[0][0];
    Q acc = 0;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::vector<Q>> minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<Q> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(a[i][k]);
            minor.push_back(std::move(row));
        }
        const Q term = a[0][j] * laplace(minor);
        acc += (j % 2 == 0) ? term : Q(-term);
    }
    return acc;
}

inline Q vandermonde(const std::vector<Q>& x) {
    Q p = 1;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) p *= x[j] - x[i];
    return p;
}

inline Q power(const Q& x, unsigned k) {
    Q p = 1;
    for (unsigned i = 0; i < k; ++i) p *= x;
    return p;
}

/// Newton divided-difference table; returns the top entry.
inline Q divided_difference(const std::vector<Q>& x, const std::function<Q(const Q&)>& g) {
    std::vector<Q> col;
    for (const auto& xi : x) col.push_back(g(xi));
    for (std::size_t level = 1; level < x.size(); ++level)
        for (std::size_t i = x.size() - 1; i >= level; --i) col[i] = (col[i] - col[i - 1]) / (x[i] - x[i - level]);
    return col.back();
}

/// Delta_{h_1} ... Delta_{h_n} g(x) as a signed sum over subsets of steps.
inline Q finite_difference(const Q& x, const std::vector<Q>& h, const std::function<Q(const Q&)>& g) {
    const std::size_t n = h.size();
    Q acc = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        Q pt = x;
        int bits = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) {
                pt += h[i];
                ++bits;
            }
        const Q v = g(pt);
        acc += ((n - bits) % 2 == 0) ? v : Q(-v);
    }
    return acc;
}

/// k distinct sorted rationals num/den in [lo, hi].
inline std::vector<Q> random_tuple(std::mt19937_64& rng, std::size_t k, long lo, long hi, long den) {
    std::uniform_int_distribution<long> pick(lo * den, hi * den);
    std::set<Q> s;
    while (s.size() < k) s.insert(q(pick(rng), den));
    return {s.begin(), s.end()};
}

inline Q random_rational(std::mt19937_64& rng, long range, long den) {
    std::uniform_int_distribution<long> num(-range * den, range * den);
    std::uniform_int_distribution<long> d(1, den);
    return q(num(rng), d(rng));
}

inline std::vector<Scalar> scalars(const std::vector<Q>& xs) {
    std::vector<Scalar> out;
    for (const auto& x : xs) out.emplace_back(x);
    return out;
}

inline chebyconvex::SimplexTuple tuple(const std::vector<Q>& xs) { return chebyconvex::SimplexTuple(scalars(xs)); }

/// Rational value of an exact, purely algebraic, rational determinant.
inline Q rational(const chebyconvex::DetValue& v) {
    if (!v.exact) throw std::logic_error("value is not exact");
    return v.exact->algebraic().rational();
}

} // namespace oracle
