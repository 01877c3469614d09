#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chebyconvex {

namespace detail {

inline std::uint64_t smallest_prime_factor(std::uint64_t n) {
    if (n % 2 == 0) return 2;
    for (std::uint64_t p = 3; p * p <= n; p += 2)
        if (n % p == 0) return p;
    return n;
}

// Splits n into s^2 * r with r squarefree.
inline std::pair<std::uint64_t, std::uint64_t> split_square(std::uint64_t n) {
    std::uint64_t square = 1, rest = 1;
    while (n > 1) {
        const std::uint64_t p = smallest_prime_factor(n);
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        for (int i = 0; i < e / 2; ++i) square *= p;
        if (e % 2) rest *= p;
    }
    return {square, rest};
}

inline std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

} // namespace detail

/// Element of the multi-quadratic field Q(sqrt p1, ..., sqrt pk).
///
/// Stored as a sorted list of (squarefree radicand, rational coefficient)
/// with no zero coefficients; radicand 1 is the rational part. The
/// representation is canonical, so equality is structural. Field
/// operations, sign and ordering are all exact.
class Surd {
  public:
    using Term = std::pair<std::uint64_t, mpq_class>;

    Surd() = default;
    Surd(long v) : Surd(mpq_class(v)) {}
    Surd(int v) : Surd(mpq_class(v)) {}
    Surd(const mpq_class& q) {
        if (q != 0) {
            terms_.emplace_back(1, q);
            terms_.back().second.canonicalize();
        }
    }

    /// Exact square root of a nonnegative rational.
    static Surd sqrt(const mpq_class& q) {
        if (q < 0) throw std::domain_error("sqrt of a negative rational");
        if (q == 0) return {};
        mpq_class c(q);
        c.canonicalize();
        // sqrt(a/b) = sqrt(a*b)/b
        mpz_class ab = c.get_num() * c.get_den();
        if (!ab.fits_ulong_p()) throw std::overflow_error("radicand too large");
        auto [s, r] = detail::split_square(ab.get_ui());
        mpq_class coef(mpz_class(static_cast<unsigned long>(s)), c.get_den());
        coef.canonicalize();
        Surd out;
        out.terms_.emplace_back(r, coef);
        return out;
    }

    bool is_zero() const { return terms_.empty(); }
    bool is_rational() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 1); }
    mpq_class rational() const {
        if (!is_rational()) throw std::domain_error("surd is irrational");
        return terms_.empty() ? mpq_class(0) : terms_[0].second;
    }
    const std::vector<Term>& terms() const { return terms_; }

    /// Coefficient of sqrt(radicand); zero when absent.
    mpq_class coefficient(std::uint64_t radicand) const {
        for (const auto& [r, c] : terms_)
            if (r == radicand) return c;
        return 0;
    }

    double to_double() const {
        double v = 0.0;
        for (const auto& [r, c] : terms_) v += c.get_d() * std::sqrt(static_cast<double>(r));
        return v;
    }

    int sign() const {
        if (is_rational()) return terms_.empty() ? 0 : ::sgn(terms_[0].second);
        Surd a, b;
        std::uint64_t p;
        split(a, b, p);
        const int sa = a.sign(), sb = b.sign();
        if (sb == 0) return sa;
        if (sa == 0 || sa == sb) return sb;
        // a and b*sqrt(p) have opposite signs: the larger magnitude wins.
        const Surd d = a * a - b * b * Surd(mpq_class(static_cast<unsigned long>(p)));
        return d.sign() * sa;
    }

    Surd operator-() const {
        Surd out(*this);
        for (auto& t : out.terms_) t.second = -t.second;
        return out;
    }

    friend Surd operator+(const Surd& x, const Surd& y) {
        Surd out;
        out.terms_.reserve(x.terms_.size() + y.terms_.size());
        auto i = x.terms_.begin(), j = y.terms_.begin();
        while (i != x.terms_.end() || j != y.terms_.end()) {
            if (j == y.terms_.end() || (i != x.terms_.end() && i->first < j->first)) {
                out.terms_.push_back(*i++);
            } else if (i == x.terms_.end() || j->first < i->first) {
                out.terms_.push_back(*j++);
            } else {
                mpq_class c = i->second + j->second;
                if (c != 0) out.terms_.emplace_back(i->first, std::move(c));
                ++i;
                ++j;
            }
        }
        return out;
    }
    friend Surd operator-(const Surd& x, const Surd& y) { return x + (-y); }

    friend Surd operator*(const Surd& x, const Surd& y) {
        if (x.is_zero() || y.is_zero()) return {};
        if (y.is_rational()) return x.scaled(y.terms_[0].second);
        if (x.is_rational()) return y.scaled(x.terms_[0].second);
        std::vector<Term> raw;
        raw.reserve(x.terms_.size() * y.terms_.size());
        for (const auto& [ra, ca] : x.terms_) {
            for (const auto& [rb, cb] : y.terms_) {
                const std::uint64_t g = detail::gcd_u64(ra, rb);
                mpq_class c = ca * cb * static_cast<unsigned long>(g);
                raw.emplace_back((ra / g) * (rb / g), std::move(c));
            }
        }
        return from_raw(std::move(raw));
    }

    friend Surd operator/(const Surd& x, const Surd& y) { return x * y.inverse(); }

    Surd inverse() const {
        if (is_zero()) throw std::domain_error("division by zero");
        if (is_rational()) return Surd(mpq_class(1) / terms_[0].second);
        // 1/(a + b sqrt p) = (a - b sqrt p) / (a^2 - p b^2); the denominator lives in a smaller field.
        Surd a, b;
        std::uint64_t p;
        split(a, b, p);
        const Surd conj = a - b * Surd::sqrt(mpq_class(static_cast<unsigned long>(p)));
        const Surd norm = a * a - b * b * Surd(mpq_class(static_cast<unsigned long>(p)));
        return conj * norm.inverse();
    }

    Surd& operator+=(const Surd& y) { return *this = *this + y; }
    Surd& operator-=(const Surd& y) { return *this = *this - y; }
    Surd& operator*=(const Surd& y) { return *this = *this * y; }
    Surd& operator/=(const Surd& y) { return *this = *this / y; }

    friend bool operator==(const Surd& x, const Surd& y) { return x.terms_ == y.terms_; }
    friend std::strong_ordering operator<=>(const Surd& x, const Surd& y) {
        const int s = (x - y).sign();
        return s < 0 ? std::strong_ordering::less
                     : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    /// Largest integer not exceeding the value.
    mpz_class floor() const {
        if (is_rational()) {
            const mpq_class q = rational();
            mpz_class f;
            mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
            return f;
        }
        mpz_class guess(std::floor(to_double()));
        while (Surd(mpq_class(guess)) > *this) --guess;
        while (Surd(mpq_class(guess + 1)) <= *this) ++guess;
        return guess;
    }

    /// Renders as "p/q", "sqrt(2)", "3/2*sqrt(6)-1" etc.
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [r, c] : terms_) {
            const bool neg = c < 0;
            const mpq_class mag = neg ? mpq_class(-c) : c;
            if (out.empty()) {
                if (neg) out += "-";
            } else {
                out += neg ? "-" : "+";
            }
            if (r == 1) {
                out += mag.get_str();
            } else {
                if (mag != 1) out += mag.get_str() + "*";
                out += "sqrt(" + std::to_string(r) + ")";
            }
        }
        return out;
    }

  private:
    std::vector<Term> terms_;

    Surd scaled(const mpq_class& q) const {
        Surd out(*this);
        for (auto& t : out.terms_) t.second *= q;
        return out;
    }

    static Surd from_raw(std::vector<Term> raw) {
        std::sort(raw.begin(), raw.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
        Surd out;
        for (auto& t : raw) {
            if (!out.terms_.empty() && out.terms_.back().first == t.first) {
                out.terms_.back().second += t.second;
                if (out.terms_.back().second == 0) out.terms_.pop_back();
            } else if (t.second != 0) {
                out.terms_.push_back(std::move(t));
            }
        }
        return out;
    }

    // Writes *this = a + b*sqrt(p) for a prime p, with a and b free of sqrt(p).
    void split(Surd& a, Surd& b, std::uint64_t& p) const {
        p = 0;
        a = Surd();
        b = Surd();
        for (const auto& [r, c] : terms_) {
            if (r != 1) {
                p = detail::smallest_prime_factor(r);
                break;
            }
        }
        for (const auto& [r, c] : terms_) {
            if (r % p == 0)
                b.terms_.emplace_back(r / p, c);
            else
                a.terms_.emplace_back(r, c);
        }
        // r/p preserves relative order among multiples of p, so b is sorted already.
    }
};

inline Surd abs(const Surd& s) { return s.sign() < 0 ? -s : s; }

} // namespace chebyconvex
