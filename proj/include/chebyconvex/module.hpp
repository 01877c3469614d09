#pragma once

#include "function.hpp"
#include "matrix.hpp"
#include "system.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace chebyconvex {

/// A point q_1 b_1 + ... + q_m b_m of a finitely generated rational module.
struct ModulePoint {
    std::vector<mpq_class> coords;
    Surd value;
};

/// The Q-module spanned by finitely many real generators.
///
/// Generators are exact surds, so Q-independence is checked exactly at
/// construction and membership of a point is an exact linear decomposition.
class RationalModule {
  public:
    RationalModule(std::vector<Surd> generators, Interval domain)
        : generators_(std::move(generators)), domain_(std::move(domain)) {
        if (generators_.empty()) throw std::invalid_argument("module needs at least one generator");
        std::set<std::uint64_t> radicands;
        for (const auto& g : generators_)
            for (const auto& [r, c] : g.terms()) radicands.insert(r);
        radicands_.assign(radicands.begin(), radicands.end());
        build_left_inverse();
    }

    /// Generators {1, sqrt 2}.
    static RationalModule sqrt2(Interval domain) {
        return RationalModule({Surd(1), Surd::sqrt(2)}, std::move(domain));
    }
    /// Generators {1, sqrt 2, sqrt 3}.
    static RationalModule sqrt2_sqrt3(Interval domain) {
        return RationalModule({Surd(1), Surd::sqrt(2), Surd::sqrt(3)}, std::move(domain));
    }

    std::size_t rank() const { return generators_.size(); }
    const std::vector<Surd>& generators() const { return generators_; }
    const Interval& domain() const { return domain_; }

    ModulePoint point(std::vector<mpq_class> coords) const {
        if (coords.size() != rank()) throw std::invalid_argument("coordinate count does not match module rank");
        Surd v;
        for (std::size_t i = 0; i < rank(); ++i) v += Surd(coords[i]) * generators_[i];
        return {std::move(coords), std::move(v)};
    }

    /// Rational coordinates of x, or nothing when x lies outside the module.
    std::optional<std::vector<mpq_class>> coordinates(const Surd& x) const {
        std::vector<mpq_class> q(rank(), 0);
        for (std::size_t i = 0; i < rank(); ++i)
            for (std::size_t k = 0; k < rank(); ++k) q[i] += left_inverse_(i, k) * x.coefficient(pivot_radicands_[k]);
        if (!(point(q).value == x)) return std::nullopt;
        return q;
    }

    ModulePoint require_point(const Surd& x) const {
        auto q = coordinates(x);
        if (!q) throw EvaluationError("point " + x.to_string() + " is not in the rational module");
        return point(std::move(*q));
    }

    std::string describe() const {
        std::string s = "Q<";
        for (std::size_t i = 0; i < rank(); ++i) s += (i ? ", " : "") + generators_[i].to_string();
        return s + ">";
    }

  private:
    std::vector<Surd> generators_;
    Interval domain_;
    std::vector<std::uint64_t> radicands_;
    std::vector<std::uint64_t> pivot_radicands_;
    Matrix<mpq_class> left_inverse_;

    // Picks rank() radicand rows on which the generator matrix is invertible.
    void build_left_inverse() {
        const std::size_t m = rank(), r = radicands_.size();
        Matrix<mpq_class> g(r, m);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < m; ++j) g(i, j) = generators_[j].coefficient(radicands_[i]);
        // Row-reduce the transpose to find independent rows of g.
        std::vector<std::size_t> chosen;
        Matrix<mpq_class> work = g;
        std::vector<bool> used(r, false);
        for (std::size_t col = 0; col < m; ++col) {
            std::size_t piv = r;
            for (std::size_t i = 0; i < r; ++i)
                if (!used[i] && work(i, col) != 0) {
                    piv = i;
                    break;
                }
            if (piv == r) throw std::invalid_argument("module generators are not Q-independent");
            used[piv] = true;
            chosen.push_back(piv);
            for (std::size_t i = 0; i < r; ++i) {
                if (i == piv || work(i, col) == 0) continue;
                const mpq_class factor = work(i, col) / work(piv, col);
                for (std::size_t j = 0; j < m; ++j) work(i, j) -= factor * work(piv, j);
            }
        }
        std::sort(chosen.begin(), chosen.end());
        Matrix<mpq_class> sq(m, m);
        for (std::size_t k = 0; k < m; ++k) {
            pivot_radicands_.push_back(radicands_[chosen[k]]);
            for (std::size_t j = 0; j < m; ++j) sq(k, j) = g(chosen[k], j);
        }
        left_inverse_ = invert(sq);
    }

    static Matrix<mpq_class> invert(Matrix<mpq_class> a) {
        const std::size_t n = a.rows();
        Matrix<mpq_class> inv = Matrix<mpq_class>::identity(n);
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) throw std::invalid_argument("module generators are not Q-independent");
            a.swap_rows(k, p);
            inv.swap_rows(k, p);
            const mpq_class d = a(k, k);
            for (std::size_t j = 0; j < n; ++j) {
                a(k, j) /= d;
                inv(k, j) /= d;
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (i == k || a(i, k) == 0) continue;
                const mpq_class f = a(i, k);
                for (std::size_t j = 0; j < n; ++j) {
                    a(i, j) -= f * a(k, j);
                    inv(i, j) -= f * inv(k, j);
                }
            }
        }
        return inv;
    }
};

/// Additive map determined by its values on the generators.
class AdditiveMap {
  public:
    AdditiveMap(std::shared_ptr<const RationalModule> module, std::vector<Surd> gen_values)
        : module_(std::move(module)), values_(std::move(gen_values)) {
        if (values_.size() != module_->rank())
            throw std::invalid_argument("additive map needs one value per generator");
    }

    const std::vector<Surd>& gen_values() const { return values_; }
    const RationalModule& module() const { return *module_; }
    std::shared_ptr<const RationalModule> module_ptr() const { return module_; }

  private:
    std::shared_ptr<const RationalModule> module_;
    std::vector<Surd> values_;
};

/// A(sum q_i b_i) = sum q_i A(b_i).
inline Surd eval_additive(const AdditiveMap& map, const ModulePoint& p) {
    if (p.coords.size() != map.gen_values().size()) throw std::invalid_argument("module dimension mismatch");
    Surd acc;
    for (std::size_t i = 0; i < p.coords.size(); ++i) acc += Surd(p.coords[i]) * map.gen_values()[i];
    return acc;
}

/// x -> A_0 + A_1(x) + A_2(x, x) + ... + A_k(x, ..., x) on a rational module,
/// each A_j a symmetric j-additive map given by its values on generators.
class GenPolynomial {
  public:
    using Index = std::vector<std::size_t>; // non-decreasing generator indices

    explicit GenPolynomial(std::shared_ptr<const RationalModule> module) : module_(std::move(module)) {}

    static GenPolynomial additive(const AdditiveMap& a) {
        GenPolynomial g(a.module_ptr());
        g.set_tensor_upper(1, {});
        for (std::size_t i = 0; i < a.gen_values().size(); ++i) g.set_entry({i}, a.gen_values()[i]);
        return g;
    }

    const RationalModule& module() const { return *module_; }
    std::shared_ptr<const RationalModule> module_ptr() const { return module_; }

    /// Highest order with a nonzero tensor; 0 for constants (and zero).
    std::size_t degree() const {
        std::size_t d = 0;
        for (const auto& [idx, v] : entries_)
            if (!v.is_zero()) d = std::max(d, idx.size());
        return d;
    }

    void set_constant(const Surd& a0) { set_entry({}, a0); }

    /// Entry A_k(b_{i_1}, ..., b_{i_k}) for the sorted multi-index; symmetric by construction.
    void set_entry(Index idx, const Surd& v) {
        std::sort(idx.begin(), idx.end());
        for (auto i : idx)
            if (i >= module_->rank()) throw std::invalid_argument("generator index out of range");
        entries_[std::move(idx)] = v;
    }

    /// Sets the order-k tensor from its full row-major m^k entries; rejects asymmetric input.
    void set_tensor(std::size_t k, const std::vector<Surd>& dense) {
        const std::size_t m = module_->rank();
        std::size_t total = 1;
        for (std::size_t i = 0; i < k; ++i) total *= m;
        if (dense.size() != total) throw std::invalid_argument("tensor has the wrong number of entries");
        for (std::size_t flat = 0; flat < total; ++flat) {
            Index idx = unflatten(flat, k, m);
            Index sorted = idx;
            std::sort(sorted.begin(), sorted.end());
            if (!(dense[flat] == dense[flatten(sorted, m)]))
                throw std::invalid_argument("tensor of order " + std::to_string(k) + " is not symmetric");
        }
        erase_order(k);
        for (std::size_t flat = 0; flat < total; ++flat) {
            Index idx = unflatten(flat, k, m);
            if (std::is_sorted(idx.begin(), idx.end()) && !dense[flat].is_zero()) entries_[idx] = dense[flat];
        }
    }

    void set_tensor_upper(std::size_t k, const std::map<Index, Surd>& upper) {
        erase_order(k);
        for (const auto& [idx, v] : upper) {
            if (idx.size() != k) throw std::invalid_argument("multi-index has the wrong order");
            set_entry(idx, v);
        }
    }

    const std::map<Index, Surd>& entries() const { return entries_; }

    /// Sum over orders of the diagonal multilinear expansion at the coordinates.
    Surd eval(const std::vector<mpq_class>& q) const {
        if (q.size() != module_->rank()) throw std::invalid_argument("module dimension mismatch");
        Surd acc;
        for (const auto& [idx, v] : entries_) {
            mpq_class prod = multinomial(idx);
            for (auto i : idx) prod *= q[i];
            acc += Surd(prod) * v;
        }
        return acc;
    }

    std::string describe() const {
        std::string s = "genpoly[" + module_->describe() + "; ";
        bool first = true;
        for (const auto& [idx, v] : entries_) {
            if (v.is_zero()) continue;
            if (!first) s += ", ";
            first = false;
            s += "A(";
            for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i] + 1);
            s += ")=" + v.to_string();
        }
        return s + "]";
    }

  private:
    std::shared_ptr<const RationalModule> module_;
    std::map<Index, Surd> entries_;

    void erase_order(std::size_t k) {
        for (auto it = entries_.begin(); it != entries_.end();)
            it = it->first.size() == k ? entries_.erase(it) : std::next(it);
    }

    static Index unflatten(std::size_t flat, std::size_t k, std::size_t m) {
        Index idx(k);
        for (std::size_t i = k; i-- > 0;) {
            idx[i] = flat % m;
            flat /= m;
        }
        return idx;
    }
    static std::size_t flatten(const Index& idx, std::size_t m) {
        std::size_t f = 0;
        for (auto i : idx) f = f * m + i;
        return f;
    }
    // Number of distinct orderings of the multi-index.
    static mpq_class multinomial(const Index& idx) {
        mpz_class num = 1;
        for (std::size_t i = 2; i <= idx.size(); ++i) num *= static_cast<unsigned long>(i);
        std::size_t run = 1;
        for (std::size_t i = 1; i <= idx.size(); ++i) {
            if (i < idx.size() && idx[i] == idx[i - 1]) {
                ++run;
            } else {
                for (std::size_t r = 2; r <= run; ++r) num /= static_cast<unsigned long>(r);
                run = 1;
            }
        }
        return mpq_class(num);
    }
};

/// Diagonal of a generalized polynomial evaluated at a module point.
inline Surd eval_genpoly(const GenPolynomial& g, const ModulePoint& p) { return g.eval(p.coords); }

namespace nodes {

/// A generalized polynomial as a function; defined only on its module.
class ModuleFunction final : public FunctionNode {
  public:
    explicit ModuleFunction(GenPolynomial g) : g_(std::move(g)) {}
    ExactValue eval_exact(const Scalar& x) const override {
        if (!x.is_exact()) throw EvaluationError("module function needs an exact module point");
        return g_.eval(g_.module().require_point(x.exact()).coords);
    }
    double eval_float(const Scalar& x) const override { return eval_exact(x).to_double(); }
    std::string describe() const override { return g_.describe(); }

  private:
    GenPolynomial g_;
};

} // namespace nodes

inline Function module_function(GenPolynomial g) {
    return Function(std::make_shared<nodes::ModuleFunction>(std::move(g)));
}

} // namespace chebyconvex
