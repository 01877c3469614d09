#pragma once

#include "certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chebyconvex {

namespace detail {

constexpr double eps = std::numeric_limits<double>::epsilon();

/// Exact when every operand is exact, float with a first-order bound otherwise.
struct Num {
    std::optional<ExactValue> exact;
    double value = 0.0;
    double bound = 0.0;

    static Num of(const Function& g, const Scalar& x, Mode mode) {
        if (mode == Mode::Exact) {
            try {
                ExactValue v = g.eval_exact(x);
                const double d = v.to_double();
                return {std::move(v), d, 0.0};
            } catch (const NotExact&) {
            }
        }
        const double v = g.eval_float(x);
        return {std::nullopt, v, 2 * eps * std::abs(v)};
    }
    static Num of(const Scalar& s) {
        if (s.is_exact()) return {ExactValue(s.exact()), s.approx(), 0.0};
        return {std::nullopt, s.approx(), 0.0};
    }
    static Num of(const DetValue& d) { return {d.exact, d.value, d.abs_error_bound}; }

    DetValue det() const { return exact ? DetValue::from_exact(*exact) : DetValue::from_float(value, bound); }

    friend Num operator-(const Num& a, const Num& b) {
        if (a.exact && b.exact) {
            try {
                ExactValue v = *a.exact - *b.exact;
                const double d = v.to_double();
                return {std::move(v), d, 0.0};
            } catch (const NotExact&) {
            }
        }
        const double v = a.value - b.value;
        return {std::nullopt, v, a.bound + b.bound + eps * std::abs(v)};
    }
    friend Num operator+(const Num& a, const Num& b) {
        Num nb = b;
        if (nb.exact) nb.exact = -*nb.exact;
        nb.value = -nb.value;
        return a - nb;
    }
    friend Num operator*(const Num& a, const Num& b) {
        if (a.exact && b.exact) {
            ExactValue v = *a.exact * *b.exact;
            const double d = v.to_double();
            return {std::move(v), d, 0.0};
        }
        const double v = a.value * b.value;
        return {std::nullopt, v,
                a.bound * std::abs(b.value) + b.bound * std::abs(a.value) + a.bound * b.bound + eps * std::abs(v)};
    }
    friend Num operator/(const Num& a, const Num& b) {
        if (a.exact && b.exact) {
            if (b.exact->is_zero()) throw std::domain_error("division by zero");
            ExactValue v = *a.exact / *b.exact;
            const double d = v.to_double();
            return {std::move(v), d, 0.0};
        }
        const double d = std::abs(b.value);
        if (d <= b.bound) return {std::nullopt, a.value / b.value, HUGE_VAL};
        const double v = a.value / b.value;
        return {std::nullopt, v, (a.bound + std::abs(v) * b.bound) / (d - b.bound) + eps * std::abs(v)};
    }
};

/// Two independently computed values agree: exactly, or within their bounds
/// plus a relative tolerance.
inline bool agree(const DetValue& a, const DetValue& b, double rel_tol) {
    if (a.exact && b.exact) return *a.exact == *b.exact;
    if (!std::isfinite(a.abs_error_bound) || !std::isfinite(b.abs_error_bound)) return false;
    const double diff = std::abs(a.value - b.value);
    return diff <= a.abs_error_bound + b.abs_error_bound + rel_tol * std::max(std::abs(a.value), std::abs(b.value));
}

inline Certificate identity_report(Property property, Mode mode, const DetValue& left, const DetValue& right,
                                   double rel_tol, std::vector<std::string> names, std::vector<Scalar> config) {
    Certificate c;
    c.property = property;
    c.mode = (left.is_exact() && right.is_exact()) ? Mode::Exact : Mode::Float;
    if (mode == Mode::Float) c.mode = Mode::Float;
    c.samples = 1;
    c.coordinate_names = std::move(names);
    c.both_sides = std::make_pair(left, right);
    const bool ok = agree(left, right, rel_tol);
    c.verdict = ok ? Verdict::Pass : Verdict::Fail;
    const double diff = left.value - right.value;
    c.details["difference"] = detail::format_double(diff);
    const double scale = std::max(std::abs(left.value), std::abs(right.value));
    c.details["relative_error"] = detail::format_double(scale > 0 ? std::abs(diff) / scale : std::abs(diff));
    if (left.exact && right.exact) c.details["exact_equal"] = ok;
    c.records.push_back({config, DetValue::from_float(diff, left.abs_error_bound + right.abs_error_bound),
                         ok ? RecordStatus::Ok : RecordStatus::Violation});
    if (!ok) c.witnesses.push_back({std::move(config), {}, DetValue::from_float(diff, 0.0), std::nullopt});
    return c;
}

inline Function over_weight(const Function& f, const Factorization& fac) {
    return is_constant_one(fac.weight) ? f : f / fac.weight;
}

} // namespace detail

/// Default relative tolerance when comparing two float-computed sides.
constexpr double identity_rel_tol = 1e-10;

/// [x_0, ..., x_k; g] by the Newton recursion. Nodes need not be sorted.
inline DetValue divided_difference(const Function& g, const std::vector<Scalar>& nodes, Mode mode = Mode::Exact) {
    if (nodes.empty()) throw std::invalid_argument("divided difference needs at least one node");
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            if (nodes[i] == nodes[j]) throw std::invalid_argument("repeated node " + nodes[i].to_string());
    std::vector<detail::Num> table;
    for (const auto& x : nodes) table.push_back(detail::Num::of(g, x, mode));
    for (std::size_t level = 1; level < nodes.size(); ++level)
        for (std::size_t i = 0; i + level < nodes.size(); ++i)
            table[i] = (table[i + 1] - table[i]) /
                       (detail::Num::of(nodes[i + level]) - detail::Num::of(nodes[i]));
    return table[0].det();
}

/// Delta_{h_1} ... Delta_{h_n} g(x) as a signed sum over subsets of the steps.
inline DetValue finite_difference(const Function& g, const Scalar& x, const std::vector<Scalar>& steps,
                                  Mode mode = Mode::Exact, const Interval* domain = nullptr) {
    const std::size_t n = steps.size();
    if (n > 20) throw std::invalid_argument("too many steps");
    detail::Num acc{ExactValue(0), 0.0, 0.0};
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        Scalar p = x;
        std::size_t bits = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) {
                p = p + steps[i];
                ++bits;
            }
        if (domain && !domain->contains(p)) throw std::invalid_argument("finite difference leaves the domain at " + p.to_string());
        detail::Num v = detail::Num::of(g, p, mode);
        if ((n - bits) % 2 == 1) {
            if (v.exact) v.exact = -*v.exact;
            v.value = -v.value;
        }
        acc = acc + v;
    }
    return acc.det();
}

/// Phi_(omega,f) = omega_0(x_0)...omega_0(x_n) det(M) Phi_(pi_n, f/omega_0), both
/// sides computed independently (without f: the same for Phi_omega).
inline Certificate factorization_check(const ChebSystem& system, const std::optional<Function>& f,
                                       const SimplexTuple& tuple, Mode mode = Mode::Exact,
                                       double rel_tol = identity_rel_tol) {
    const auto& fac = system.factorization();
    const std::size_t n = system.dim();
    const ChebSystem poly = make_polynomial_system(n, system.domain());
    const DetValue left = f ? phi_bordered(system, *f, tuple, mode) : phi_system(system, tuple, mode);
    const DetValue reduced = f ? phi_bordered(poly, detail::over_weight(*f, fac), tuple, mode)
                               : phi_system(poly, tuple, mode);
    detail::Num right = detail::Num::of(reduced) * detail::Num::of(Scalar(det_exact(fac.coeff)));
    for (const auto& x : tuple.points()) right = right * detail::Num::of(fac.weight, x, mode);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < tuple.arity(); ++i) names.push_back("x" + std::to_string(i));
    return detail::identity_report(Property::Factorization, mode, left, right.det(), rel_tol, names, tuple.points());
}

/// Phi_(omega,f)/Phi_omega-bar = [x_0, ..., x_n; f/omega_0] for the power extension.
inline Certificate chwc_ratio_check(const ExtendedSystem& ext, const Function& f, const SimplexTuple& tuple,
                                    Mode mode = Mode::Exact, double rel_tol = identity_rel_tol) {
    if (!ext.is_power_extension()) throw std::invalid_argument("ratio identity needs the power extension");
    const DetValue den = phi_system(ext.as_system(), tuple, mode);
    if (den.negative() || (den.is_exact() && den.zero()))
        throw std::logic_error("extended system determinant is not positive");
    const DetValue left = divide(phi_bordered(ext.base(), f, tuple, mode), den);
    const DetValue right = divided_difference(detail::over_weight(f, ext.base().factorization()), tuple.points(), mode);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < tuple.arity(); ++i) names.push_back("x" + std::to_string(i));
    return detail::identity_report(Property::ChwcRatio, mode, left, right, rel_tol, names, tuple.points());
}

/// Wright permutation sum = Delta_{h_1}...Delta_{h_n}(f/omega_0)(x) / (h_1 ... h_n).
inline Certificate chwc_perm_sum_check(const ExtendedSystem& ext, const Function& f, const Scalar& x,
                                       const std::vector<Scalar>& steps, Mode mode = Mode::Exact,
                                       double rel_tol = identity_rel_tol) {
    if (!ext.is_power_extension()) throw std::invalid_argument("permutation-sum identity needs the power extension");
    const WrightConfig cfg{x, steps};
    const DetValue left = wright_sum(ext, ext.as_system(), f, cfg, mode);
    const Function g = detail::over_weight(f, ext.base().factorization());
    detail::Num right = detail::Num::of(finite_difference(g, x, steps, mode, &ext.base().domain()));
    for (const auto& h : steps) right = right / detail::Num::of(h);
    std::vector<std::string> names{"x"};
    for (std::size_t i = 1; i <= steps.size(); ++i) names.push_back("h" + std::to_string(i));
    std::vector<Scalar> config{x};
    config.insert(config.end(), steps.begin(), steps.end());
    return detail::identity_report(Property::ChwcPermSum, mode, left, right.det(), rel_tol, names, config);
}

struct AffineFit {
    std::vector<DetValue> alpha;
    /// Residual report over the validation grid (verdict PASS iff f is the fitted combination there).
    Certificate report;
};

/// Validation points: `count` equally spaced points of the domain (interior
/// ones when an end is open), or the finite support when there is one.
inline std::vector<Scalar> validation_grid(const ChebSystem& system, const Function& f, std::size_t count) {
    if (auto s = finite_support(system, &f)) {
        std::vector<Scalar> pts;
        for (const auto& x : *s)
            if (system.domain().contains(x)) pts.push_back(x);
        return pts;
    }
    const Interval& d = system.domain();
    std::vector<Scalar> pts;
    const Scalar w = d.width();
    for (std::size_t k = 0; k < count; ++k) {
        Scalar x = d.lo + w * Scalar(mpq_class(static_cast<long>(k), static_cast<long>(count - 1)));
        if (!d.contains(x)) x = d.lo + w * Scalar(mpq_class(static_cast<long>(2 * k + 1), static_cast<long>(2 * count)));
        pts.push_back(x);
    }
    return pts;
}

/// alpha_i = (-1)^{n-i} Phi_(omega without omega_i, f)(nodes) / Phi_omega(nodes).
inline AffineFit fit_omega_affine(const ChebSystem& system, const Function& f, const SimplexTuple& nodes,
                                  Mode mode = Mode::Exact, std::size_t validation_points = 100) {
    const std::size_t n = system.dim();
    detail::require_arity(nodes, n);
    const DetValue den = phi_system(system, nodes, mode);
    if (den.zero()) throw std::invalid_argument("node matrix is singular; the system is not Chebyshev at these nodes");
    AffineFit fit;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Function> rows;
        for (std::size_t k = 0; k < n; ++k)
            if (k != i) rows.push_back(system.component(k));
        rows.push_back(f);
        DetValue num = detail::collocation_det(rows, nodes.points(), mode);
        if ((n - 1 - i) % 2 == 1) {
            if (num.exact) num.exact = -*num.exact;
            num.value = -num.value;
        }
        fit.alpha.push_back(divide(num, den));
    }

    Certificate& rep = fit.report;
    rep.property = Property::AffineFit;
    rep.mode = mode;
    rep.coordinate_names = {"x"};
    bool all_exact = true, ok = true;
    double max_residual = 0.0;
    const auto pts = validation_grid(system, f, validation_points);
    for (const auto& x : pts) {
        detail::Num r = detail::Num::of(f, x, mode);
        for (std::size_t i = 0; i < n; ++i)
            r = r - detail::Num::of(fit.alpha[i]) * detail::Num::of(system.component(i), x, mode);
        const DetValue v = r.det();
        all_exact = all_exact && v.is_exact();
        const bool zero = v.zero() && std::isfinite(v.abs_error_bound);
        ok = ok && zero;
        max_residual = std::max(max_residual, std::abs(v.value));
        rep.records.push_back({{x}, v, zero ? RecordStatus::Ok : RecordStatus::Violation});
        if (!zero && rep.witnesses.size() < 16) rep.witnesses.push_back({{x}, {x}, v, std::nullopt});
    }
    rep.samples = pts.size();
    rep.exhaustive = finite_support(system, &f).has_value();
    rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
    rep.mode = all_exact ? Mode::Exact : Mode::Float;
    nlohmann::json a = nlohmann::json::array();
    for (const auto& v : fit.alpha) a.push_back(v.to_string());
    rep.details["alpha"] = a;
    rep.details["max_residual"] = detail::format_double(max_residual);
    nlohmann::json nd = nlohmann::json::array();
    for (const auto& x : nodes.points()) nd.push_back(x.to_string());
    rep.details["nodes"] = nd;
    return fit;
}

/// Triple (u, y, z) for the quadratic-polynomial functional equation.
struct QpTriple {
    Scalar u, y, z;
};

/// Triples with y -+ u, z -+ u inside the domain; one in ten comes from the
/// limiting family z -> y (the central-difference derivative identity).
inline std::vector<QpTriple> sample_qp_triples(const Interval& domain, const SamplingOptions& opt) {
    using namespace detail;
    PointSampler sampler(domain, opt.source);
    std::vector<QpTriple> out;
    const Scalar quarter = domain.width() * Scalar(mpq_class(1, 4));
    for (std::size_t s = 0; s < opt.budget; ++s) {
        auto rng = sample_rng(opt.seed, s);
        const bool limiting = s % 10 == 9;
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            std::optional<Scalar> u = s % 50 == 0 ? std::optional<Scalar>(Scalar(0)) : sampler.step_up_to(quarter, rng);
            if (!u) continue;
            auto y = sampler.point_in(domain.lo + *u, domain.hi - *u, rng);
            if (!y) continue;
            std::optional<Scalar> z;
            if (limiting) {
                const Scalar t = sampler.tiny_step(rng);
                z = uniform_int(rng, 0, 1) ? *y + t : *y - t;
            } else {
                z = sampler.point_in(domain.lo + *u, domain.hi - *u, rng);
            }
            if (!z || *z == *y) continue;
            const Scalar wide = *z - *y + *u + *u;
            if (wide.sign() == 0) continue;
            if (!domain.contains(*y - *u) || !domain.contains(*y + *u) || !domain.contains(*z - *u) ||
                !domain.contains(*z + *u))
                continue;
            if (sampler.min_gap() > 0 && std::abs((*z - *y).approx()) < sampler.min_gap()) continue;
            out.push_back({*u, *y, *z});
            break;
        }
    }
    return out;
}

/// (rho(z) - rho(y))/(z - y) = (rho(z+u) - rho(y-u))/((z+u) - (y-u)) on every triple.
inline Certificate qp_equation_check(const Function& rho, const std::vector<QpTriple>& triples,
                                     const CheckOptions& opt = {}) {
    if (triples.empty()) throw std::invalid_argument("empty triple set");
    struct Row {
        DetValue left, right, diff;
        bool ok;
    };
    std::vector<Row> rows(triples.size());
    parallel_for(triples.size(), opt.workers, [&](std::size_t i) {
        const auto& [u, y, z] = triples[i];
        if (z == y) throw std::invalid_argument("degenerate triple z = y");
        using detail::Num;
        const Num l = (Num::of(rho, z, opt.mode) - Num::of(rho, y, opt.mode)) / (Num::of(z) - Num::of(y));
        const Num r = (Num::of(rho, z + u, opt.mode) - Num::of(rho, y - u, opt.mode)) / (Num::of(z + u) - Num::of(y - u));
        const Num d = l - r;
        const DetValue left = l.det(), right = r.det(), diff = d.det();
        bool ok;
        if (left.exact && right.exact)
            ok = *left.exact == *right.exact;
        else
            ok = std::isfinite(diff.abs_error_bound) &&
                 std::abs(diff.value) <=
                     8 * diff.abs_error_bound + 1e-12 * std::max({1.0, std::abs(left.value), std::abs(right.value)});
        rows[i] = {left, right, diff, ok};
    });
    Certificate c;
    c.property = Property::QpEquation;
    c.mode = opt.mode;
    c.samples = triples.size();
    c.seed = opt.seed;
    c.coordinate_names = {"u", "y", "z"};
    std::size_t bad = 0, exact = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& [u, y, z] = triples[i];
        exact += rows[i].diff.is_exact();
        if (opt.keep_records)
            c.records.push_back({{u, y, z}, rows[i].diff, rows[i].ok ? RecordStatus::Ok : RecordStatus::Violation});
        if (!rows[i].ok) {
            ++bad;
            if (c.witnesses.size() < opt.max_witnesses) {
                c.witnesses.push_back({{u, y, z}, {y - u, y, z, z + u}, rows[i].diff, std::nullopt});
                if (!c.both_sides) c.both_sides = std::make_pair(rows[i].left, rows[i].right);
            }
        }
    }
    if (!c.both_sides) c.both_sides = std::make_pair(rows[0].left, rows[0].right);
    std::sort(c.witnesses.begin(), c.witnesses.end(),
              [](const Witness& a, const Witness& b) { return detail::config_less(a.configuration, b.configuration); });
    c.verdict = bad ? Verdict::Violated : Verdict::SatisfiedSampled;
    c.details["violations"] = bad;
    c.details["exact_evaluations"] = exact;
    return c;
}

inline Certificate qp_equation_check(const Function& rho, const Interval& domain, const SamplingOptions& sampling,
                                     CheckOptions opt = {}) {
    opt.seed = sampling.seed;
    return qp_equation_check(rho, sample_qp_triples(domain, sampling), opt);
}

/// Samples g(offset + k * step), k = 0, ..., N-1.
struct GridFunction {
    Scalar offset;
    Scalar step;
    std::vector<Scalar> values;

    std::size_t size() const { return values.size(); }
    Scalar node(std::size_t k) const { return offset + step * Scalar(mpq_class(static_cast<unsigned long>(k))); }
    Function as_table() const {
        std::vector<std::pair<Scalar, Scalar>> s;
        for (std::size_t k = 0; k < values.size(); ++k) s.emplace_back(node(k), values[k]);
        return Function::tabulated(std::move(s));
    }
};

namespace nodes {

/// omega_0(x) times the local Newton interpolant of degree n-1 of g/omega_0
/// through the n grid nodes around x.
class GridExtension final : public FunctionNode {
  public:
    GridExtension(GridFunction grid, Function weight, bool unit_weight, std::size_t n)
        : grid_(std::move(grid)), weight_(std::move(weight)), unit_(unit_weight), n_(n) {
        if (grid_.size() < n_) throw std::invalid_argument("grid has fewer than n nodes");
    }
    ExactValue eval_exact(const Scalar& x) const override {
        const auto w = window(x);
        if (auto k = on_grid(x)) return grid_.values[*k].exact();
        std::vector<ExactValue> c;
        for (std::size_t j = 0; j < n_; ++j) c.push_back(ratio_exact(w + j));
        for (std::size_t level = 1; level < n_; ++level)
            for (std::size_t j = n_ - 1; j >= level; --j)
                c[j] = (c[j] - c[j - 1]) / ExactValue((grid_.node(w + j) - grid_.node(w + j - level)).exact());
        ExactValue acc = c[n_ - 1];
        for (std::size_t j = n_ - 1; j-- > 0;) acc = acc * ExactValue((x - grid_.node(w + j)).exact()) + c[j];
        return unit_ ? acc : acc * weight_.eval_exact(x);
    }
    double eval_float(const Scalar& x) const override {
        const auto w = window(x);
        if (auto k = on_grid(x)) return grid_.values[*k].approx();
        std::vector<double> c;
        for (std::size_t j = 0; j < n_; ++j) c.push_back(grid_.values[w + j].approx() / weight_at(w + j));
        for (std::size_t level = 1; level < n_; ++level)
            for (std::size_t j = n_ - 1; j >= level; --j)
                c[j] = (c[j] - c[j - 1]) / (grid_.node(w + j) - grid_.node(w + j - level)).approx();
        double acc = c[n_ - 1];
        for (std::size_t j = n_ - 1; j-- > 0;) acc = acc * (x - grid_.node(w + j)).approx() + c[j];
        return unit_ ? acc : acc * weight_.eval_float(x);
    }
    std::string describe() const override {
        return "extension[" + std::to_string(grid_.size()) + " nodes, local degree " + std::to_string(n_ - 1) + "]";
    }

  private:
    GridFunction grid_;
    Function weight_;
    bool unit_;
    std::size_t n_;

    std::optional<std::size_t> on_grid(const Scalar& x) const {
        const Scalar t = (x - grid_.offset) / grid_.step;
        if (t.is_exact()) {
            if (!t.exact().is_rational() || t.exact().rational().get_den() != 1) return std::nullopt;
            return static_cast<std::size_t>(t.exact().rational().get_num().get_ui());
        }
        const double r = std::round(t.approx());
        if (std::abs(t.approx() - r) <= 1e-12 * std::max(1.0, std::abs(r))) return static_cast<std::size_t>(r);
        return std::nullopt;
    }
    // First node of the interpolation window for the cell containing x.
    std::size_t window(const Scalar& x) const {
        const Scalar last = grid_.node(grid_.size() - 1);
        if (x < grid_.offset || last < x) throw EvaluationError("extension evaluated outside its grid at " + x.to_string());
        const double t = ((x - grid_.offset) / grid_.step).approx();
        std::size_t cell = static_cast<std::size_t>(std::max(0.0, std::floor(t)));
        cell = std::min(cell, grid_.size() - 1);
        const std::size_t back = n_ >= 2 ? (n_ - 2) / 2 : 0;
        const std::size_t start = cell >= back ? cell - back : 0;
        return std::min(start, grid_.size() - n_);
    }
    ExactValue ratio_exact(std::size_t k) const {
        if (!grid_.values[k].is_exact()) throw NotExact("grid value is inexact");
        const ExactValue v(grid_.values[k].exact());
        return unit_ ? v : v / weight_.eval_exact(grid_.node(k));
    }
    double weight_at(std::size_t k) const { return unit_ ? 1.0 : weight_.eval_float(grid_.node(k)); }
};

} // namespace nodes

struct GridExtensionResult {
    Function extension;
    Certificate jensen;
    Certificate report;
};

/// Continuous extension of an omega-Jensen convex grid function by local
/// interpolation; agreement on the grid is exact, convexity off the grid is
/// sampled on `refine` tuples and reported against the threshold -tolerance.
inline GridExtensionResult extend_from_dense_grid(const ChebSystem& system, const GridFunction& grid,
                                                  std::size_t refine, std::uint64_t seed, Mode mode = Mode::Exact,
                                                  double tolerance = 1e-10, CheckOptions opt = {}) {
    const auto& fac = system.factorization();
    const std::size_t n = system.dim();
    if (grid.step.sign() <= 0) throw std::invalid_argument("grid step must be positive");
    if (grid.size() < n + 1) throw std::invalid_argument("grid needs at least n + 1 nodes");
    const Interval span(grid.node(0), grid.node(grid.size() - 1));
    if (!system.domain().contains(span.lo) || !system.domain().contains(span.hi))
        throw std::invalid_argument("grid leaves the system domain");

    // every equidistant tuple of grid nodes
    const ChebSystem on_span(system.components(), span, system.factorized());
    std::vector<Scalar> hs;
    for (std::size_t d = 1; d * n < grid.size(); ++d) hs.push_back(grid.step * Scalar(mpq_class(static_cast<unsigned long>(d))));
    const Function table = grid.as_table();
    opt.mode = mode;
    opt.affine = false;
    opt.source = DiscreteSource{};
    Certificate jensen = check_omega_jensen(on_span, table, jensen_grid(span, n, hs, grid.step), opt);
    if (jensen.verdict == Verdict::Refuted)
        throw std::invalid_argument("grid function is not omega-Jensen convex on its grid");

    Function ext(std::make_shared<nodes::GridExtension>(grid, fac.weight, detail::is_constant_one(fac.weight), n));

    Certificate rep;
    rep.property = Property::GridExtension;
    rep.mode = mode;
    rep.seed = seed;
    std::size_t disagreements = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Scalar x = grid.node(k);
        bool same;
        if (mode == Mode::Exact && grid.values[k].is_exact()) {
            try {
                same = ext.eval_exact(x) == ExactValue(grid.values[k].exact());
            } catch (const NotExact&) {
                same = ext.eval_float(x) == grid.values[k].approx();
            }
        } else {
            same = ext.eval_float(x) == grid.values[k].approx();
        }
        disagreements += !same;
    }

    SamplingOptions sampling{refine, seed, mode == Mode::Exact ? PointSource(RationalSource{0}) : PointSource(RealSource{0})};
    auto tuples = sample_simplex_tuples(span, n + 1, sampling);
    // keep tuples with at least one off-grid point
    std::erase_if(tuples.configs, [&](const SimplexTuple& t) {
        for (const auto& x : t.points()) {
            const Scalar r = (x - grid.offset) / grid.step;
            if (!r.is_exact() || !r.exact().is_rational() || r.exact().rational().get_den() != 1) return false;
        }
        return true;
    });
    std::vector<DetValue> values(tuples.configs.size());
    parallel_for(values.size(), opt.workers,
                 [&](std::size_t i) { values[i] = phi_bordered(on_span, ext, tuples.configs[i], mode); });
    double min_phi = HUGE_VAL;
    std::size_t below = 0;
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const DetValue& v = values[i];
        min_phi = std::min(min_phi, v.value);
        const bool fails = v.is_exact() ? v.value < -tolerance && v.negative() : v.value + v.abs_error_bound < -tolerance;
        if (fails) {
            ++below;
            bad.push_back(i);
        }
        if (opt.keep_records)
            rep.records.push_back({tuples.configs[i].points(), v, fails ? RecordStatus::Violation : RecordStatus::Ok});
    }
    for (std::size_t k = 0; k < std::min<std::size_t>(bad.size(), 16); ++k)
        rep.witnesses.push_back({tuples.configs[bad[k]].points(), tuples.configs[bad[k]].points(), values[bad[k]], std::nullopt});
    rep.samples = values.size();
    rep.coordinate_names.clear();
    for (std::size_t i = 0; i <= n; ++i) rep.coordinate_names.push_back("x" + std::to_string(i));
    rep.verdict = (disagreements == 0 && below == 0) ? Verdict::PassSampled : Verdict::Fail;
    rep.details["grid_nodes"] = grid.size();
    rep.details["grid_disagreements"] = disagreements;
    rep.details["jensen_verdict"] = to_string(jensen.verdict);
    rep.details["min_phi"] = detail::format_double(values.empty() ? 0.0 : min_phi);
    rep.details["tolerance"] = detail::format_double(tolerance);
    rep.details["below_tolerance"] = below;
    return {std::move(ext), std::move(jensen), std::move(rep)};
}

} // namespace chebyconvex
