#pragma once

#include "det.hpp"
#include "module.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace chebyconvex {

// ---------------------------------------------------------------------------
// Deterministic seeding and parallel evaluation

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Generator for sample `index` of a run seeded with `seed`.
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

/// Worker count from CHEBYCONVEX_WORKERS (default 1). Never affects results.
inline unsigned default_workers() {
    if (const char* env = std::getenv("CHEBYCONVEX_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

/// Calls fn(i) for i in [0, n) on up to `workers` threads; fn writes into slot i.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto body = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n && !failed;) {
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    for (unsigned w = 0; w < count; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Point sources

/// Rational lattice plus random dyadic rationals; every point is exact.
struct RationalSource {
    int q_max = 8;
};
/// Rational lattice plus random doubles with a minimum separation floor.
struct RealSource {
    int q_max = 8;
};
/// Random points of a rational module (dense in the reals when rank >= 2).
struct ModuleSource {
    std::shared_ptr<const RationalModule> module;
};
/// A finite set of admissible points (tabulated abscissae).
struct DiscreteSource {
    std::vector<Scalar> points;
};

using PointSource = std::variant<RationalSource, RealSource, ModuleSource, DiscreteSource>;

struct SamplingOptions {
    std::size_t budget = 1000;
    std::uint64_t seed = 0;
    PointSource source = RationalSource{};
};

/// x, x + t_1 h, ..., x + (t_1 + ... + t_n) h
struct StepConfig {
    Scalar base;
    std::vector<Scalar> steps;
    Scalar scale;

    SimplexTuple tuple() const {
        std::vector<Scalar> pts{base};
        Scalar acc = base;
        for (const auto& t : steps) {
            acc = acc + t * scale;
            pts.push_back(acc);
        }
        return SimplexTuple(std::move(pts));
    }
};

/// Base point and increments (x; h_1, ..., h_n) of a Wright configuration.
struct WrightConfig {
    Scalar base;
    std::vector<Scalar> increments;
};

template <class C>
struct ConfigSet {
    std::vector<C> configs;
    bool lattice_exhaustive = false;
    std::size_t lattice = 0, random = 0, adversarial = 0;
    std::string scale_kind;
};

namespace detail {

constexpr std::uint64_t dyadic_bits = 20;

inline bool source_is_exact(const PointSource& s) { return !std::holds_alternative<RealSource>(s); }

inline int lattice_q(const PointSource& s) {
    if (auto r = std::get_if<RationalSource>(&s)) return r->q_max;
    if (auto r = std::get_if<RealSource>(&s)) return r->q_max;
    return 0;
}

/// Rationals p/q with q <= q_max in [lo, hi] respecting openness, ascending.
inline std::vector<Scalar> farey_points(const Interval& d, int q_max) {
    std::vector<Scalar> out;
    if (q_max <= 0 || !d.lo.is_exact() || !d.hi.is_exact()) return out;
    if (!d.lo.exact().is_rational() || !d.hi.exact().is_rational()) return out;
    const mpq_class lo = d.lo.exact().rational(), hi = d.hi.exact().rational();
    std::vector<mpq_class> pts;
    for (int q = 1; q <= q_max; ++q) {
        mpz_class p;
        const mpq_class s = lo * q;
        mpz_cdiv_q(p.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
        for (;; ++p) {
            mpq_class v(p, q);
            v.canonicalize();
            if (v > hi) break;
            if (v.get_den() == q) pts.push_back(v);
        }
    }
    std::sort(pts.begin(), pts.end());
    for (auto& v : pts) {
        Scalar x(v);
        if (d.contains(x)) out.push_back(x);
    }
    return out;
}

inline double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::uint64_t uniform_int(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

/// Random module point in [a, b]; coordinates beyond the first are small rationals.
inline std::optional<Scalar> module_point_in(const RationalModule& m, const Scalar& a, const Scalar& b,
                                             std::mt19937_64& rng) {
    const double b1 = m.generators()[0].to_double();
    if (b1 == 0.0) throw std::invalid_argument("first module generator must be nonzero");
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double target = a.approx() + (b.approx() - a.approx()) * uniform01(rng);
        std::vector<mpq_class> q(m.rank());
        double rest = 0.0;
        for (std::size_t i = 1; i < m.rank(); ++i) {
            if (attempt >= 48) break;
            q[i] = mpq_class(static_cast<long>(uniform_int(rng, 0, 16)) - 8, static_cast<long>(uniform_int(rng, 1, 8)));
            q[i].canonicalize();
            rest += q[i].get_d() * m.generators()[i].to_double();
        }
        const long den = static_cast<long>(uniform_int(rng, 1, 64));
        q[0] = mpq_class(static_cast<long>(std::llround((target - rest) / b1 * den)), den);
        q[0].canonicalize();
        ModulePoint p = m.point(std::move(q));
        Scalar x(p.value);
        if (a <= x && x <= b) return x;
    }
    return std::nullopt;
}

class PointSampler {
  public:
    PointSampler(const Interval& domain, const PointSource& source) : domain_(domain), source_(source) {
        if (auto d = std::get_if<DiscreteSource>(&source_)) {
            discrete_ = d->points;
            std::sort(discrete_.begin(), discrete_.end());
            discrete_.erase(std::remove_if(discrete_.begin(), discrete_.end(),
                                           [&](const Scalar& x) { return !domain.contains(x); }),
                            discrete_.end());
        }
    }

    bool exact() const { return source_is_exact(source_); }
    bool discrete() const { return std::holds_alternative<DiscreteSource>(source_); }
    const std::vector<Scalar>& discrete_points() const { return discrete_; }

    /// Smallest gap allowed between sampled points in float sampling.
    double min_gap() const { return exact() ? 0.0 : 1e-6 * (domain_.hi.approx() - domain_.lo.approx()); }

    bool admissible(const Scalar& x) const {
        if (!domain_.contains(x)) return false;
        if (discrete()) return std::binary_search(discrete_.begin(), discrete_.end(), x);
        if (auto m = std::get_if<ModuleSource>(&source_)) return x.is_exact() && m->module->coordinates(x.exact());
        return true;
    }

    /// Random point in [a, b] (a subrange of the domain).
    std::optional<Scalar> point_in(const Scalar& a, const Scalar& b, std::mt19937_64& rng) const {
        if (!(a <= b)) return std::nullopt;
        if (discrete()) {
            auto lo = std::lower_bound(discrete_.begin(), discrete_.end(), a);
            auto hi = std::upper_bound(discrete_.begin(), discrete_.end(), b);
            if (lo >= hi) return std::nullopt;
            return *(lo + static_cast<std::ptrdiff_t>(uniform_int(rng, 0, static_cast<std::uint64_t>(hi - lo - 1))));
        }
        if (auto m = std::get_if<ModuleSource>(&source_)) return module_point_in(*m->module, a, b, rng);
        if (exact() && a.is_exact() && b.is_exact()) {
            const std::uint64_t k = uniform_int(rng, 0, 1ULL << dyadic_bits);
            return a + (b - a) * Scalar(mpq_class(mpz_class(static_cast<unsigned long>(k)),
                                                  mpz_class(1UL << dyadic_bits)));
        }
        return Scalar::real(a.approx() + (b.approx() - a.approx()) * uniform01(rng));
    }

    /// Random positive increment in (0, max].
    std::optional<Scalar> step_up_to(const Scalar& max, std::mt19937_64& rng) const {
        if (!(Scalar(0) < max)) return std::nullopt;
        if (discrete()) {
            // differences of admissible points; caller filters the resulting configuration
            if (discrete_.size() < 2) return std::nullopt;
            const auto i = uniform_int(rng, 0, discrete_.size() - 2);
            const auto j = uniform_int(rng, i + 1, discrete_.size() - 1);
            Scalar h = discrete_[j] - discrete_[i];
            if (max < h) return std::nullopt;
            return h;
        }
        if (auto m = std::get_if<ModuleSource>(&source_)) {
            auto h = module_point_in(*m->module, Scalar(0), max, rng);
            if (h && h->sign() > 0) return h;
            return std::nullopt;
        }
        if (exact() && max.is_exact()) {
            const std::uint64_t k = uniform_int(rng, 1, 1ULL << dyadic_bits);
            return max * Scalar(mpq_class(mpz_class(static_cast<unsigned long>(k)),
                                          mpz_class(1UL << dyadic_bits)));
        }
        const double h = max.approx() * uniform01(rng);
        if (h < min_gap() || h <= 0.0) return std::nullopt;
        return Scalar::real(h);
    }

    /// Tiny positive increment for adversarial configurations.
    Scalar tiny_step(std::mt19937_64& rng) const {
        const Scalar w = domain_.width();
        if (auto m = std::get_if<ModuleSource>(&source_)) {
            auto h = module_point_in(*m->module, Scalar(0), w * Scalar(mpq_class(1, 4096)), rng);
            if (h && h->sign() > 0) return *h;
            return w * Scalar(mpq_class(1, 4096));
        }
        if (exact() && w.is_exact())
            return w * Scalar(mpq_class(static_cast<long>(uniform_int(rng, 1, 16)), 1L << 24));
        // float clusters tighter than this cannot be resolved by any double engine
        return Scalar::real(w.approx() * 1e-3 * static_cast<double>(uniform_int(rng, 1, 16)));
    }

  private:
    const Interval& domain_;
    const PointSource& source_;
    std::vector<Scalar> discrete_;
};

inline std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
    if (k > n) return 0;
    long double r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
        if (r > static_cast<long double>(cap)) return cap + 1;
    }
    return static_cast<std::size_t>(r + 0.5L);
}

struct BudgetSplit {
    std::size_t lattice, random, adversarial;
};

inline BudgetSplit split_budget(std::size_t budget, bool with_lattice) {
    if (budget < 3) return {0, budget, 0};
    const std::size_t adv = std::max<std::size_t>(1, budget / 10);
    const std::size_t lat = with_lattice ? (budget * 2) / 5 : 0;
    return {lat, budget - adv - lat, adv};
}

inline bool separated(const std::vector<Scalar>& pts, double gap) {
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (!(pts[i - 1] < pts[i])) return false;
        if (gap > 0 && pts[i].approx() - pts[i - 1].approx() < gap) return false;
    }
    return true;
}

// Enumerates all k-subsets of [0, n) in lexicographic order.
template <class Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        fn(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

inline std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    std::vector<std::size_t> out;
    while (out.size() < k) {
        const std::size_t c = uniform_int(rng, 0, n - 1);
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

constexpr int max_attempts = 256;

} // namespace detail

/// Strictly increasing tuples in the domain: rational lattice, random, and
/// near-boundary/clustered tuples.
inline ConfigSet<SimplexTuple> sample_simplex_tuples(const Interval& domain, std::size_t arity,
                                                     const SamplingOptions& opt) {
    using namespace detail;
    if (arity == 0) throw std::invalid_argument("arity must be positive");
    PointSampler sampler(domain, opt.source);
    ConfigSet<SimplexTuple> out;
    std::uint64_t index = 0;

    std::vector<Scalar> lattice = sampler.discrete() ? sampler.discrete_points()
                                                     : farey_points(domain, lattice_q(opt.source));
    if (std::holds_alternative<ModuleSource>(opt.source)) lattice.clear();
    if (sampler.discrete() && lattice.size() < arity)
        throw std::invalid_argument("domain holds fewer admissible points than the tuple arity");
    BudgetSplit split = split_budget(opt.budget, lattice.size() >= arity);
    if (sampler.discrete()) split = {opt.budget, 0, 0};

    if (split.lattice > 0) {
        const std::size_t total = binomial_capped(lattice.size(), arity, split.lattice);
        if (total <= split.lattice) {
            for_each_combination(lattice.size(), arity, [&](const std::vector<std::size_t>& idx) {
                std::vector<Scalar> pts;
                for (auto i : idx) pts.push_back(lattice[i]);
                out.configs.emplace_back(std::move(pts));
            });
            out.lattice_exhaustive = true;
            split.random += split.lattice - total;
            ++index;
        } else {
            for (std::size_t s = 0; s < split.lattice; ++s) {
                auto rng = sample_rng(opt.seed, index++);
                std::vector<Scalar> pts;
                for (auto i : random_subset(lattice.size(), arity, rng)) pts.push_back(lattice[i]);
                out.configs.emplace_back(std::move(pts));
            }
        }
        out.lattice = out.configs.size();
    }

    const double gap = sampler.min_gap();
    for (std::size_t s = 0; s < split.random; ++s) {
        auto rng = sample_rng(opt.seed, index++);
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            std::vector<Scalar> pts;
            for (std::size_t k = 0; k < arity; ++k)
                if (auto p = sampler.point_in(domain.lo, domain.hi, rng)) pts.push_back(*p);
            std::sort(pts.begin(), pts.end());
            if (pts.size() == arity && separated(pts, gap) && SimplexTuple(pts).inside(domain)) {
                out.configs.emplace_back(std::move(pts));
                ++out.random;
                break;
            }
        }
    }

    for (std::size_t s = 0; s < split.adversarial; ++s) {
        auto rng = sample_rng(opt.seed, index++);
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            // a tight cluster next to an endpoint or at a random centre
            const int where = static_cast<int>(uniform_int(rng, 0, 2));
            std::vector<Scalar> pts;
            Scalar anchor = where == 0 ? domain.lo : where == 1 ? domain.hi : domain.lo;
            if (where == 2) {
                auto c = sampler.point_in(domain.lo, domain.hi, rng);
                if (!c) continue;
                anchor = *c;
            }
            Scalar cur = anchor;
            for (std::size_t k = 0; k < arity; ++k) {
                Scalar step = sampler.tiny_step(rng);
                if (gap > 0 && step.approx() < gap) step = Scalar::real(gap * 1.5);
                cur = where == 1 ? cur - step : cur + step;
                pts.push_back(cur);
            }
            std::sort(pts.begin(), pts.end());
            bool ok = separated(pts, gap);
            for (const auto& p : pts) ok = ok && sampler.admissible(p);
            if (ok) {
                out.configs.emplace_back(std::move(pts));
                ++out.adversarial;
                break;
            }
        }
    }
    return out;
}

/// Configurations (x, h) for fixed step ratios t with x + (sum t) h in the domain.
inline ConfigSet<StepConfig> sample_step_configs(const Interval& domain, const std::vector<Scalar>& steps,
                                                 const SamplingOptions& opt) {
    using namespace detail;
    if (steps.empty()) throw std::invalid_argument("step tuple must be nonempty");
    Scalar span(0);
    for (const auto& t : steps) {
        if (t.sign() <= 0) throw std::invalid_argument("steps must be positive");
        span = span + t;
    }
    PointSampler sampler(domain, opt.source);
    ConfigSet<StepConfig> out;
    std::uint64_t index = 0;
    const Scalar max_h = domain.width() / span;
    auto accept = [&](const StepConfig& c) {
        if (c.scale.sign() <= 0) return false;
        SimplexTuple t;
        try {
            t = c.tuple();
        } catch (const std::invalid_argument&) {
            return false;
        }
        if (!separated(t.points(), sampler.min_gap())) return false;
        for (const auto& p : t.points())
            if (!sampler.admissible(p)) return false;
        return true;
    };

    std::vector<Scalar> lattice = farey_points(domain, lattice_q(opt.source));
    BudgetSplit split = split_budget(opt.budget, !lattice.empty() && !sampler.discrete());
    if (split.lattice > 0) {
        std::vector<StepConfig> all;
        for (const auto& h : farey_points(Interval(Scalar(0), max_h, true, false), lattice_q(opt.source))) {
            for (const auto& x : lattice) {
                StepConfig c{x, steps, h};
                if (accept(c)) all.push_back(std::move(c));
                if (all.size() > 64 * split.lattice) break;
            }
        }
        if (all.size() <= split.lattice) {
            out.configs = all;
            out.lattice_exhaustive = true;
            split.random += split.lattice - all.size();
        } else {
            for (std::size_t s = 0; s < split.lattice; ++s) {
                auto rng = sample_rng(opt.seed, index++);
                out.configs.push_back(all[uniform_int(rng, 0, all.size() - 1)]);
            }
        }
        out.lattice = out.configs.size();
    }
    for (std::size_t s = 0; s < split.random; ++s) {
        auto rng = sample_rng(opt.seed, index++);
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            auto h = sampler.step_up_to(max_h, rng);
            if (!h) continue;
            auto x = sampler.point_in(domain.lo, domain.hi - span * *h, rng);
            if (!x) continue;
            StepConfig c{*x, steps, *h};
            if (accept(c)) {
                out.configs.push_back(std::move(c));
                ++out.random;
                break;
            }
        }
    }
    for (std::size_t s = 0; s < split.adversarial; ++s) {
        auto rng = sample_rng(opt.seed, index++);
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            const bool largest = uniform_int(rng, 0, 1) == 0;
            StepConfig c{domain.lo, steps, max_h};
            if (!largest) {
                const Scalar h = sampler.tiny_step(rng);
                const bool at_hi = uniform_int(rng, 0, 1) == 0;
                c = StepConfig{at_hi ? domain.hi - span * h : domain.lo, steps, h};
            }
            if (accept(c)) {
                out.configs.push_back(std::move(c));
                ++out.adversarial;
                break;
            }
        }
    }
    out.scale_kind = sampler.exact() ? "rational" : "rational+real";
    if (std::holds_alternative<ModuleSource>(opt.source)) out.scale_kind = "module";
    if (sampler.discrete()) out.scale_kind = "table";
    return out;
}

/// All equidistant configurations x = lo + k*spacing, t = (1, ..., 1), for each listed h.
inline ConfigSet<StepConfig> jensen_grid(const Interval& domain, std::size_t n, const std::vector<Scalar>& hs,
                                         const Scalar& spacing) {
    if (spacing.sign() <= 0) throw std::invalid_argument("grid spacing must be positive");
    ConfigSet<StepConfig> out;
    const std::vector<Scalar> ones(n, Scalar(1));
    for (const auto& h : hs) {
        if (h.sign() <= 0) throw std::invalid_argument("grid steps must be positive");
        for (Scalar x = domain.lo;; x = x + spacing) {
            const Scalar last = x + Scalar(static_cast<long>(n)) * h;
            if (domain.hi < last) break;
            if (domain.contains(x) && domain.contains(last)) out.configs.push_back({x, ones, h});
        }
    }
    out.lattice = out.configs.size();
    out.lattice_exhaustive = true;
    out.scale_kind = "grid";
    return out;
}

/// Configurations (x; h_1, ..., h_n) with x + sum h in the domain.
inline ConfigSet<WrightConfig> sample_wright_configs(const Interval& domain, std::size_t n,
                                                     const SamplingOptions& opt) {
    using namespace detail;
    if (n == 0) throw std::invalid_argument("Wright configurations need at least one increment");
    PointSampler sampler(domain, opt.source);
    ConfigSet<WrightConfig> out;
    std::uint64_t index = 0;
    const Scalar max_h = domain.width() / Scalar(static_cast<long>(n));
    auto accept = [&](const WrightConfig& c) {
        Scalar end = c.base;
        if (!sampler.admissible(c.base)) return false;
        for (const auto& h : c.increments) {
            if (h.sign() <= 0) return false;
            if (sampler.min_gap() > 0 && h.approx() < sampler.min_gap()) return false;
            end = end + h;
        }
        return sampler.admissible(end);
    };
    std::vector<Scalar> lattice = farey_points(domain, lattice_q(opt.source));
    std::vector<Scalar> lattice_h = farey_points(Interval(Scalar(0), max_h, true, false), lattice_q(opt.source));
    BudgetSplit split = split_budget(opt.budget, !lattice.empty() && !lattice_h.empty() && !sampler.discrete());
    for (std::size_t s = 0; s < split.lattice; ++s) {
        auto rng = sample_rng(opt.seed, index++);
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            WrightConfig c{lattice[uniform_int(rng, 0, lattice.size() - 1)], {}};
            for (std::size_t k = 0; k < n; ++k) c.increments.push_back(lattice_h[uniform_int(rng, 0, lattice_h.size() - 1)]);
            if (accept(c)) {
                out.configs.push_back(std::move(c));
                ++out.lattice;
                break;
            }
        }
    }
    for (std::size_t s = 0; s < split.random; ++s) {
        auto rng = sample_rng(opt.seed, index++);
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            WrightConfig c{domain.lo, {}};
            Scalar total(0);
            bool ok = true;
            for (std::size_t k = 0; k < n && ok; ++k) {
                auto h = sampler.step_up_to(max_h, rng);
                ok = h.has_value();
                if (ok) {
                    total = total + *h;
                    c.increments.push_back(*h);
                }
            }
            if (!ok) continue;
            auto x = sampler.point_in(domain.lo, domain.hi - total, rng);
            if (!x) continue;
            c.base = *x;
            if (accept(c)) {
                out.configs.push_back(std::move(c));
                ++out.random;
                break;
            }
        }
    }
    for (std::size_t s = 0; s < split.adversarial; ++s) {
        auto rng = sample_rng(opt.seed, index++);
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            // one large increment mixed with tiny ones
            WrightConfig c{domain.lo, {}};
            Scalar total(0);
            const std::size_t big = uniform_int(rng, 0, n - 1);
            bool ok = true;
            for (std::size_t k = 0; k < n && ok; ++k) {
                std::optional<Scalar> h = k == big ? sampler.step_up_to(max_h, rng) : sampler.tiny_step(rng);
                ok = h.has_value();
                if (ok) {
                    total = total + *h;
                    c.increments.push_back(*h);
                }
            }
            if (!ok) continue;
            auto x = sampler.point_in(domain.lo, domain.hi - total, rng);
            if (!x) continue;
            c.base = *x;
            if (accept(c)) {
                out.configs.push_back(std::move(c));
                ++out.adversarial;
                break;
            }
        }
    }
    out.scale_kind = sampler.exact() ? "rational" : "rational+real";
    if (std::holds_alternative<ModuleSource>(opt.source)) out.scale_kind = "module";
    return out;
}

} // namespace chebyconvex
