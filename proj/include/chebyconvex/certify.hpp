#pragma once

#include "certificate.hpp"
#include "sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chebyconvex {

struct CheckOptions {
    Mode mode = Mode::Exact;
    /// Require equality (affine variants) instead of nonnegativity.
    bool affine = false;
    unsigned workers = default_workers();
    /// Keep every evaluated configuration for plot export.
    bool keep_records = false;
    bool minimize = true;
    std::size_t max_witnesses = 16;
    std::optional<std::uint64_t> seed;
    /// Source the configurations were drawn from; shrunk witnesses must stay admissible.
    PointSource source = RationalSource{};
};

/// Admissible points for a system: the common abscissae when some component
/// (or the function under test) is tabulated, otherwise the continuum.
inline std::optional<std::vector<Scalar>> finite_support(const ChebSystem& system,
                                                         const Function* f = nullptr) {
    std::optional<std::vector<Scalar>> out;
    auto meet = [&](const Function& g) {
        auto s = g.support();
        if (!s) return;
        if (!out) {
            out = std::move(s);
            return;
        }
        std::vector<Scalar> both;
        std::set_intersection(out->begin(), out->end(), s->begin(), s->end(), std::back_inserter(both));
        out = std::move(both);
    };
    for (const auto& c : system.components()) meet(c);
    if (f) meet(*f);
    return out;
}

/// Default point source for a mode: exact rationals or rationals plus reals,
/// or the finite support when there is one.
inline PointSource default_source(const ChebSystem& system, Mode mode, const Function* f = nullptr) {
    if (auto s = finite_support(system, f)) return DiscreteSource{std::move(*s)};
    if (mode == Mode::Exact) return RationalSource{};
    return RealSource{};
}

namespace detail {

struct Evaluation {
    std::vector<Scalar> configuration;
    std::vector<Scalar> points;
    DetValue value;
};

enum class Outcome { Ok, Violation, Indeterminate };

inline Outcome classify(const DetValue& v, bool affine) {
    if (!v.exact && !std::isfinite(v.abs_error_bound)) return Outcome::Indeterminate;
    if (affine) return v.zero() ? Outcome::Ok : Outcome::Violation;
    return v.negative() ? Outcome::Violation : Outcome::Ok;
}

inline bool config_less(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i].approx() != b[i].approx()) return a[i].approx() < b[i].approx();
        const std::string sa = a[i].to_string(), sb = b[i].to_string();
        if (sa != sb) return sa < sb;
    }
    return a.size() < b.size();
}

/// Evaluates every configuration (in parallel, deterministic aggregation),
/// classifies, shrinks witnesses and fills in the certificate.
template <class Config>
Certificate run_check(Property property, const ConfigSet<Config>& set, std::vector<std::string> names,
                      const CheckOptions& opt, const std::function<Evaluation(const Config&)>& eval,
                      const std::function<std::optional<Config>(const Config&)>& shrink) {
    if (set.configs.empty()) throw std::invalid_argument("empty configuration set");
    std::vector<Evaluation> results(set.configs.size());
    parallel_for(set.configs.size(), opt.workers, [&](std::size_t i) { results[i] = eval(set.configs[i]); });

    Certificate cert;
    cert.property = property;
    cert.mode = opt.mode;
    cert.samples = set.configs.size();
    cert.seed = opt.seed;
    cert.affine = opt.affine;
    cert.exhaustive = set.lattice_exhaustive && set.random == 0 && set.adversarial == 0;
    cert.coordinate_names = std::move(names);

    std::vector<std::size_t> violations;
    std::size_t indeterminate = 0, exact_count = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const Outcome o = classify(results[i].value, opt.affine);
        if (o == Outcome::Violation) violations.push_back(i);
        if (o == Outcome::Indeterminate) ++indeterminate;
        if (results[i].value.is_exact()) ++exact_count;
        if (opt.keep_records)
            cert.records.push_back({results[i].configuration, results[i].value,
                                    o == Outcome::Ok          ? RecordStatus::Ok
                                    : o == Outcome::Violation ? RecordStatus::Violation
                                                              : RecordStatus::Indeterminate});
    }

    std::sort(violations.begin(), violations.end(), [&](std::size_t a, std::size_t b) {
        return config_less(results[a].configuration, results[b].configuration);
    });
    if (violations.size() > opt.max_witnesses) violations.resize(opt.max_witnesses);
    std::vector<Witness> witnesses(violations.size());
    parallel_for(violations.size(), opt.workers, [&](std::size_t w) {
        const std::size_t i = violations[w];
        Evaluation best = results[i];
        if (opt.minimize && !std::holds_alternative<DiscreteSource>(opt.source)) {
            Config cur = set.configs[i];
            for (int iter = 0; iter < 8; ++iter) {
                auto next = shrink(cur);
                if (!next) break;
                Evaluation e;
                try {
                    e = eval(*next);
                } catch (const std::exception&) {
                    break;
                }
                if (classify(e.value, opt.affine) != Outcome::Violation) break;
                best = std::move(e);
                cur = std::move(*next);
            }
        }
        Witness wt{best.configuration, best.points, best.value, std::nullopt};
        if (best.configuration != results[i].configuration) wt.shrunk_from = results[i].configuration;
        witnesses[w] = std::move(wt);
    });
    cert.witnesses = std::move(witnesses);

    const std::size_t total_violations = [&] {
        std::size_t k = 0;
        for (const auto& r : results) k += classify(r.value, opt.affine) == Outcome::Violation;
        return k;
    }();
    if (total_violations > 0)
        cert.verdict = Verdict::Refuted;
    else if (indeterminate > 0)
        cert.verdict = Verdict::Indeterminate;
    else
        cert.verdict = Verdict::PassSampled;

    cert.details["violations"] = total_violations;
    cert.details["indeterminate"] = indeterminate;
    cert.details["exact_evaluations"] = exact_count;
    cert.details["lattice"] = set.lattice;
    cert.details["random"] = set.random;
    cert.details["adversarial"] = set.adversarial;
    if (!set.scale_kind.empty()) cert.details["sampled_from"] = set.scale_kind;
    return cert;
}

inline bool shrink_ok(const std::vector<Scalar>& pts, const CheckOptions& opt, const Interval& domain) {
    const double gap = std::holds_alternative<RealSource>(opt.source) ? 1e-6 * domain.width().approx() : 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!domain.contains(pts[i])) return false;
        if (i > 0 && (!(pts[i - 1] < pts[i]) || pts[i].approx() - pts[i - 1].approx() < gap)) return false;
    }
    return true;
}

inline const Scalar& half() {
    static const Scalar h(mpq_class(1, 2));
    return h;
}

} // namespace detail

/// Phi_(omega,f) >= 0 (or = 0 when affine) on every sampled increasing tuple.
inline Certificate check_omega_convex(const ChebSystem& system, const Function& f,
                                      const ConfigSet<SimplexTuple>& tuples, const CheckOptions& opt = {}) {
    const std::size_t n = system.dim();
    std::vector<std::string> names;
    for (std::size_t i = 0; i <= n; ++i) names.push_back("x" + std::to_string(i));
    auto eval = [&](const SimplexTuple& t) {
        return detail::Evaluation{t.points(), t.points(), phi_bordered(system, f, t, opt.mode)};
    };
    auto shrink = [&](const SimplexTuple& t) -> std::optional<SimplexTuple> {
        // pull every point halfway toward the first one
        std::vector<Scalar> pts{t[0]};
        for (std::size_t i = 1; i < t.arity(); ++i) pts.push_back(t[0] + (t[i] - t[0]) * detail::half());
        if (!detail::shrink_ok(pts, opt, system.domain())) return std::nullopt;
        return SimplexTuple(std::move(pts));
    };
    return detail::run_check<SimplexTuple>(opt.affine ? Property::OmegaAffine : Property::OmegaConvex, tuples,
                                           names, opt, eval, shrink);
}

inline Certificate check_omega_convex(const ChebSystem& system, const Function& f, const SamplingOptions& sampling,
                                      CheckOptions opt = {}) {
    opt.source = sampling.source;
    opt.seed = sampling.seed;
    return check_omega_convex(system, f, sample_simplex_tuples(system.domain(), system.dim() + 1, sampling), opt);
}

namespace detail {

inline Certificate check_steps(Property property, const ChebSystem& system, const Function& f,
                               const ConfigSet<StepConfig>& configs, const CheckOptions& opt) {
    for (const auto& c : configs.configs)
        if (c.steps.size() != system.dim()) throw std::invalid_argument("step tuple length must equal the system dimension");
    auto eval = [&](const StepConfig& c) {
        const SimplexTuple t = c.tuple();
        if (!t.inside(system.domain())) throw std::invalid_argument("configuration leaves the domain");
        return Evaluation{{c.base, c.scale}, t.points(), phi_bordered(system, f, t, opt.mode)};
    };
    auto shrink = [&](const StepConfig& c) -> std::optional<StepConfig> {
        StepConfig next{c.base, c.steps, c.scale * half()};
        if (!shrink_ok(next.tuple().points(), opt, system.domain())) return std::nullopt;
        return next;
    };
    Certificate cert = run_check<StepConfig>(property, configs, {"x", "h"}, opt, eval, shrink);
    nlohmann::json t = nlohmann::json::array();
    if (!configs.configs.empty())
        for (const auto& s : configs.configs.front().steps) t.push_back(s.to_string());
    cert.details["steps"] = t;
    return cert;
}

} // namespace detail

/// (t, omega)-convexity along x, x + t_1 h, ..., x + (t_1 + ... + t_n) h.
inline Certificate check_t_omega_convex(const ChebSystem& system, const Function& f, const std::vector<Scalar>& steps,
                                        const ConfigSet<StepConfig>& configs, const CheckOptions& opt = {}) {
    for (const auto& c : configs.configs)
        if (c.steps != steps) throw std::invalid_argument("configuration steps differ from the tested step tuple");
    return detail::check_steps(Property::TOmegaConvex, system, f, configs, opt);
}

inline Certificate check_t_omega_convex(const ChebSystem& system, const Function& f, const std::vector<Scalar>& steps,
                                        const SamplingOptions& sampling, CheckOptions opt = {}) {
    opt.source = sampling.source;
    opt.seed = sampling.seed;
    return check_t_omega_convex(system, f, steps, sample_step_configs(system.domain(), steps, sampling), opt);
}

/// omega-Jensen convexity on equidistant tuples x, x + h, ..., x + n h.
inline Certificate check_omega_jensen(const ChebSystem& system, const Function& f,
                                      const ConfigSet<StepConfig>& grid, const CheckOptions& opt = {}) {
    for (const auto& c : grid.configs)
        for (const auto& t : c.steps)
            if (!(t == Scalar(1))) throw std::invalid_argument("Jensen configurations must have unit steps");
    return detail::check_steps(opt.affine ? Property::JensenAffine : Property::OmegaJensen, system, f, grid, opt);
}

inline Certificate check_omega_jensen(const ChebSystem& system, const Function& f, const SamplingOptions& sampling,
                                      CheckOptions opt = {}) {
    opt.source = sampling.source;
    opt.seed = sampling.seed;
    const std::vector<Scalar> ones(system.dim(), Scalar(1));
    return check_omega_jensen(system, f, sample_step_configs(system.domain(), ones, sampling), opt);
}

/// Sum over all orderings of the increments of Phi_(omega,f)/Phi_omega-bar along
/// the chain x, x + h_{i1}, ..., x + h_{i1} + ... + h_{in}.
///
/// Repeated increments give coinciding chains; each distinct chain is
/// evaluated once and weighted by its multiplicity.
inline DetValue wright_sum(const ExtendedSystem& ext, const ChebSystem& extended, const Function& f,
                           const WrightConfig& c, Mode mode) {
    const std::size_t n = ext.base().dim();
    if (c.increments.size() != n) throw std::invalid_argument("Wright configuration needs n increments");
    if (n > 8) throw std::invalid_argument("Wright sums are limited to n <= 8 (factorial growth)");
    for (const auto& h : c.increments)
        if (h.sign() <= 0) throw std::invalid_argument("Wright increments must be positive");

    std::vector<Scalar> order = c.increments;
    std::sort(order.begin(), order.end());
    long multiplicity = 1;
    for (std::size_t i = 0, run = 0; i < order.size(); ++i) {
        run = (i > 0 && order[i] == order[i - 1]) ? run + 1 : 1;
        multiplicity *= static_cast<long>(run);
    }
    std::vector<DetValue> terms;
    do {
        std::vector<Scalar> pts{c.base};
        for (const auto& h : order) pts.push_back(pts.back() + h);
        const SimplexTuple t(std::move(pts));
        const DetValue den = phi_system(extended, t, mode);
        if (den.negative() || (den.is_exact() && den.zero()))
            throw std::logic_error("extended system is not positive at a Wright chain");
        terms.push_back(divide(phi_bordered(ext.base(), f, t, mode), den));
    } while (std::next_permutation(order.begin(), order.end()));
    DetValue s = sum(terms);
    if (multiplicity == 1) return s;
    if (s.exact) return DetValue::from_exact(*s.exact * ExactValue(Surd(multiplicity)));
    return DetValue::from_float(s.value * static_cast<double>(multiplicity),
                                s.abs_error_bound * static_cast<double>(multiplicity));
}

/// omega-bar-Wright convexity: nonnegative Wright sums on every configuration.
inline Certificate check_wright(const ExtendedSystem& ext, const Function& f, const ConfigSet<WrightConfig>& configs,
                                const CheckOptions& opt = {}) {
    const ChebSystem extended = ext.as_system();
    const std::size_t n = ext.base().dim();
    std::vector<std::string> names{"x"};
    for (std::size_t i = 1; i <= n; ++i) names.push_back("h" + std::to_string(i));
    const Interval& domain = ext.base().domain();
    auto eval = [&](const WrightConfig& c) {
        std::vector<Scalar> cfg{c.base};
        cfg.insert(cfg.end(), c.increments.begin(), c.increments.end());
        Scalar end = c.base;
        for (const auto& h : c.increments) end = end + h;
        if (!domain.contains(c.base) || !domain.contains(end))
            throw std::invalid_argument("Wright configuration leaves the domain");
        return detail::Evaluation{cfg, {c.base, end}, wright_sum(ext, extended, f, c, opt.mode)};
    };
    auto shrink = [&](const WrightConfig& c) -> std::optional<WrightConfig> {
        WrightConfig next{c.base, {}};
        for (const auto& h : c.increments) next.increments.push_back(h * detail::half());
        std::vector<Scalar> pts{c.base};
        for (const auto& h : next.increments) pts.push_back(pts.back() + h);
        if (!domain.contains(pts.back())) return std::nullopt;
        if (std::holds_alternative<RealSource>(opt.source))
            for (const auto& h : next.increments)
                if (h.approx() < 1e-6 * domain.width().approx()) return std::nullopt;
        return next;
    };
    return detail::run_check<WrightConfig>(Property::Wright, configs, names, opt, eval, shrink);
}

inline Certificate check_wright(const ExtendedSystem& ext, const Function& f, const SamplingOptions& sampling,
                                CheckOptions opt = {}) {
    opt.source = sampling.source;
    opt.seed = sampling.seed;
    return check_wright(ext, f, sample_wright_configs(ext.base().domain(), ext.base().dim(), sampling), opt);
}

/// Positivity of Phi_omega on sampled increasing n-tuples. Never a proof.
inline Certificate is_positive_chebyshev(const ChebSystem& system, const SamplingOptions& sampling,
                                         CheckOptions opt = {}) {
    if (sampling.budget == 0) throw std::invalid_argument("sample budget must be at least 1");
    opt.source = sampling.source;
    opt.seed = sampling.seed;
    const std::size_t n = system.dim();
    if (auto d = std::get_if<DiscreteSource>(&sampling.source)) {
        std::size_t inside = 0;
        for (const auto& x : d->points) inside += system.domain().contains(x);
        if (inside < n) throw std::invalid_argument("domain holds fewer than n admissible points");
    }
    const auto tuples = sample_simplex_tuples(system.domain(), n, sampling);
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
    std::vector<DetValue> values(tuples.configs.size());
    parallel_for(values.size(), opt.workers,
                 [&](std::size_t i) { values[i] = phi_system(system, tuples.configs[i], opt.mode); });

    Certificate cert;
    cert.property = Property::ChebyshevPositive;
    cert.mode = opt.mode;
    cert.samples = values.size();
    cert.seed = sampling.seed;
    cert.coordinate_names = names;
    std::size_t refuted = 0, unclear = 0;
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const DetValue& v = values[i];
        const bool not_positive = v.is_exact() ? !v.positive() : v.negative();
        if (not_positive) {
            ++refuted;
            bad.push_back(i);
        } else if (!v.positive()) {
            ++unclear;
        }
        if (opt.keep_records)
            cert.records.push_back({tuples.configs[i].points(), v,
                                    not_positive ? RecordStatus::Violation
                                    : v.positive() ? RecordStatus::Ok
                                                   : RecordStatus::Indeterminate});
    }
    std::sort(bad.begin(), bad.end(), [&](std::size_t a, std::size_t b) {
        return detail::config_less(tuples.configs[a].points(), tuples.configs[b].points());
    });
    for (std::size_t k = 0; k < std::min(bad.size(), opt.max_witnesses); ++k)
        cert.witnesses.push_back(
            {tuples.configs[bad[k]].points(), tuples.configs[bad[k]].points(), values[bad[k]], std::nullopt});
    cert.verdict = refuted ? Verdict::Refuted : unclear ? Verdict::Indeterminate : Verdict::PositiveSampled;
    cert.exhaustive = tuples.lattice_exhaustive && tuples.random == 0 && tuples.adversarial == 0;
    cert.details["sampled"] = "non-exhaustive sampling; not a proof of positivity";
    cert.details["violations"] = refuted;
    cert.details["indeterminate"] = unclear;
    return cert;
}

} // namespace chebyconvex
