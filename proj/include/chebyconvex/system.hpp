#pragma once

#include "function.hpp"
#include "matrix.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chebyconvex {

/// Real interval with independently open or closed ends.
struct Interval {
    Scalar lo, hi;
    bool lo_open = false;
    bool hi_open = false;

    Interval(Scalar lo_, Scalar hi_, bool lo_open_ = false, bool hi_open_ = false)
        : lo(std::move(lo_)), hi(std::move(hi_)), lo_open(lo_open_), hi_open(hi_open_) {
        if (!(lo < hi)) throw std::invalid_argument("interval requires lo < hi");
    }

    bool contains(const Scalar& x) const {
        const bool above = lo_open ? lo < x : lo <= x;
        const bool below = hi_open ? x < hi : x <= hi;
        return above && below;
    }
    Scalar width() const { return hi - lo; }

    std::string to_string() const {
        return std::string(lo_open ? "(" : "[") + lo.to_string() + ", " + hi.to_string() + (hi_open ? ")" : "]");
    }
};

/// Weight factorization omega_i(x) = (sum_j M(i,j) x^j) * omega_0(x).
struct Factorization {
    Function weight;
    Matrix<Surd> coeff;
};

/// An ordered tuple of n functions on an interval, optionally weight-factorized.
class ChebSystem {
  public:
    ChebSystem(std::vector<Function> components, Interval domain, std::optional<Factorization> factorized = {})
        : components_(std::move(components)), domain_(std::move(domain)), factorized_(std::move(factorized)) {
        if (components_.empty()) throw std::invalid_argument("a Chebyshev system needs at least one component");
        if (factorized_ && (factorized_->coeff.rows() != dim() || factorized_->coeff.cols() != dim()))
            throw std::invalid_argument("coefficient matrix does not match the system dimension");
    }

    std::size_t dim() const { return components_.size(); }
    const std::vector<Function>& components() const { return components_; }
    const Function& component(std::size_t i) const { return components_.at(i); }
    const Interval& domain() const { return domain_; }
    const std::optional<Factorization>& factorized() const { return factorized_; }
    const Factorization& factorization() const {
        if (!factorized_) throw std::invalid_argument("system has no weight factorization");
        return *factorized_;
    }

  private:
    std::vector<Function> components_;
    Interval domain_;
    std::optional<Factorization> factorized_;
};

/// omega-bar = (omega_1, ..., omega_n, omega_{n+1}).
class ExtendedSystem {
  public:
    ExtendedSystem(ChebSystem base, Function extra) : base_(std::move(base)), extra_(std::move(extra)) {}

    const ChebSystem& base() const { return base_; }
    const Function& extra() const { return extra_; }
    std::size_t dim() const { return base_.dim() + 1; }

    /// The (n+1)-dimensional system. When the extension is t^n * omega_0 of a
    /// factorized base, the result is factorized with M-bar = diag(M, 1).
    ChebSystem as_system() const {
        std::vector<Function> comps = base_.components();
        comps.push_back(extra_);
        std::optional<Factorization> f;
        if (power_extension_) {
            const auto& bf = base_.factorization();
            const std::size_t n = base_.dim();
            Matrix<Surd> m(n + 1, n + 1);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) m(i, j) = bf.coeff(i, j);
            m(n, n) = Surd(1);
            f = Factorization{bf.weight, std::move(m)};
        }
        return ChebSystem(std::move(comps), base_.domain(), std::move(f));
    }

    bool is_power_extension() const { return power_extension_; }

  private:
    ChebSystem base_;
    Function extra_;
    bool power_extension_ = false;

    friend ExtendedSystem extend_with_power(const ChebSystem& system);
};

/// pi_n = (1, t, ..., t^{n-1}) with weight 1 and M = I.
inline ChebSystem make_polynomial_system(std::size_t n, Interval domain) {
    if (n == 0) throw std::invalid_argument("polynomial system dimension must be positive");
    std::vector<Function> comps;
    for (std::size_t k = 0; k < n; ++k) comps.push_back(Function::monomial(static_cast<unsigned>(k)));
    return ChebSystem(std::move(comps), std::move(domain),
                      Factorization{Function::constant(Scalar(1)), Matrix<Surd>::identity(n)});
}

namespace detail {

inline Function row_polynomial(const Matrix<Surd>& m, std::size_t i) {
    std::vector<Surd> c(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) c[j] = m(i, j);
    return Function::polynomial(std::move(c));
}

inline bool is_constant_one(const Function& f) {
    try {
        return f.eval_exact(Scalar(0)) == ExactValue(1) && f.eval_exact(Scalar(1)) == ExactValue(1) &&
               f.describe() == "1";
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace detail

/// Systems of the form omega_i = p_i * weight, where row i of coeff holds the
/// coefficients of p_i in ascending degree.
///
/// Rejects det(M) <= 0 (such a system is never a positive Chebyshev system)
/// and weights that are not positive on the domain. Positivity is taken from
/// the expression when it is symbolically known, otherwise sampled densely.
inline ChebSystem make_weighted_system(const Function& weight, const Matrix<Surd>& coeff, Interval domain) {
    if (!coeff.square() || coeff.rows() == 0) throw std::invalid_argument("coefficient matrix must be square");
    if (det_exact(coeff).sign() <= 0)
        throw std::invalid_argument("det(M) must be positive for a positive Chebyshev system");
    if (!weight.known_positive()) {
        constexpr int samples = 4096;
        const double lo = domain.lo.approx(), hi = domain.hi.approx();
        for (int k = 0; k <= samples; ++k) {
            const Scalar x = Scalar::real(lo + (hi - lo) * k / samples);
            if ((k == 0 && domain.lo_open) || (k == samples && domain.hi_open)) continue;
            if (!(weight.eval_float(x) > 0.0))
                throw std::invalid_argument("weight is not positive at x = " + x.to_string());
        }
    }
    const bool unit = detail::is_constant_one(weight);
    std::vector<Function> comps;
    for (std::size_t i = 0; i < coeff.rows(); ++i) {
        Function p = detail::row_polynomial(coeff, i);
        comps.push_back(unit ? p : p * weight);
    }
    return ChebSystem(std::move(comps), std::move(domain), Factorization{weight, coeff});
}

/// Extends a factorized system by omega_{n+1}(t) = t^n * omega_0(t); the
/// result is positive whenever the base is.
inline ExtendedSystem extend_with_power(const ChebSystem& system) {
    const auto& f = system.factorization();
    Function power = Function::monomial(static_cast<unsigned>(system.dim()));
    Function extra = detail::is_constant_one(f.weight) ? power : power * f.weight;
    ExtendedSystem ext(system, std::move(extra));
    ext.power_extension_ = true;
    return ext;
}

} // namespace chebyconvex
