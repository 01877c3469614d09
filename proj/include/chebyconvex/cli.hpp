#pragma once

#include "certify.hpp"
#include "expr.hpp"
#include "identities.hpp"
#include "io.hpp"
#include "module_algebra.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace chebyconvex {

/// A malformed or inconsistent configuration (exit code 3).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Command-line overrides applied on top of the [run] section.
struct RunOverrides {
    std::optional<Mode> mode;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> budget;
    std::optional<unsigned> workers;
};

inline int exit_code(Verdict v) { return severity(v); }

namespace detail {

inline std::vector<std::string> split_list(const std::string& s, const char* seps = ",") {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, s, boost::algorithm::is_any_of(seps));
    for (auto& p : parts) boost::algorithm::trim(p);
    if (parts.size() == 1 && parts[0].empty()) parts.clear();
    return parts;
}

inline Interval parse_interval(const std::string& text) {
    const std::string s = boost::algorithm::trim_copy(text);
    if (s.size() < 5 || (s.front() != '[' && s.front() != '(') || (s.back() != ']' && s.back() != ')'))
        throw ParseError("interval must look like [a, b], (a, b], [a, b) or (a, b)");
    const auto parts = split_list(s.substr(1, s.size() - 2));
    if (parts.size() != 2) throw ParseError("interval needs exactly two endpoints");
    return Interval(parse_scalar(parts[0]), parse_scalar(parts[1]), s.front() == '(', s.back() == ')');
}

inline std::vector<Scalar> parse_scalars(const std::string& s) {
    std::vector<Scalar> out;
    for (const auto& p : split_list(s)) out.push_back(parse_scalar(p));
    return out;
}

inline std::vector<Surd> parse_exacts(const std::string& s, const char* seps = ",") {
    std::vector<Surd> out;
    for (const auto& p : split_list(s, seps)) out.push_back(parse_exact(p));
    return out;
}

/// Rows separated by '|' or ';', entries by ',' or whitespace.
inline Matrix<Surd> parse_matrix(const std::string& s) {
    std::vector<std::vector<Surd>> rows;
    for (const auto& r : split_list(s, "|;")) {
        std::vector<Surd> row;
        for (const auto& e : split_list(r, ", \t"))
            if (!e.empty()) row.push_back(parse_exact(e));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("empty matrix");
    Matrix<Surd> m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw ParseError("matrix rows have different lengths");
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

inline Mode parse_mode(const std::string& s) {
    const std::string v = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(s));
    if (v == "exact") return Mode::Exact;
    if (v == "float") return Mode::Float;
    throw ParseError("mode must be exact or float");
}

inline bool parse_bool(const std::string& s) {
    const std::string v = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(s));
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ParseError("expected true or false");
}

inline std::uint64_t parse_count(const std::string& s) {
    const std::string v = boost::algorithm::trim_copy(s);
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) throw ParseError("expected a nonnegative integer");
    return std::stoull(v);
}

// Aggregates one identity report per sampled configuration.
inline Certificate aggregate_reports(Property property, const std::vector<Certificate>& reports, Mode mode,
                                     std::optional<std::uint64_t> seed, bool keep_records) {
    Certificate c;
    c.property = property;
    c.mode = mode;
    c.seed = seed;
    c.samples = reports.size();
    std::size_t failures = 0, exact = 0;
    double max_rel = 0.0;
    for (const auto& r : reports) {
        if (r.coordinate_names.size() > c.coordinate_names.size()) c.coordinate_names = r.coordinate_names;
        if (r.both_sides && r.both_sides->first.is_exact() && r.both_sides->second.is_exact()) ++exact;
        max_rel = std::max(max_rel, std::stod(r.details.value("relative_error", std::string("0"))));
        if (keep_records)
            for (const auto& rec : r.records) c.records.push_back(rec);
        if (!passed(r.verdict)) {
            ++failures;
            if (c.witnesses.size() < 16)
                for (const auto& w : r.witnesses) c.witnesses.push_back(w);
            if (!c.both_sides) c.both_sides = r.both_sides;
        }
    }
    if (!c.both_sides && !reports.empty()) c.both_sides = reports.front().both_sides;
    if (exact != reports.size()) c.mode = Mode::Float;
    c.verdict = failures ? Verdict::Fail : (reports.size() == 1 ? reports.front().verdict : Verdict::PassSampled);
    c.details["failures"] = failures;
    c.details["exact_checks"] = exact;
    c.details["max_relative_error"] = format_double(max_rel);
    return c;
}

} // namespace detail

/// Executes a configuration file: declarations of a system, extension,
/// modules and functions, then tasks in order. Writes <out>/<task>.json and
/// <out>/summary.json and returns the exit code (0 pass, 1 refuted, 2
/// indeterminate, 3 configuration error).
class Runner {
  public:
    Runner(std::string config_path, RunOverrides overrides)
        : path_(std::move(config_path)), over_(std::move(overrides)) {}

    /// Parses and validates everything; throws ConfigError.
    void load();
    /// Runs the loaded tasks; returns the exit code.
    int execute();

    const std::filesystem::path& out_dir() const { return out_; }

  private:
    struct Task {
        std::string name, check, section;
        boost::property_tree::ptree keys;
    };

    std::string path_;
    RunOverrides over_;
    boost::property_tree::ptree tree_;
    std::map<std::string, std::size_t> lines_;
    std::filesystem::path base_;
    std::filesystem::path out_ = "reports";
    Mode mode_ = Mode::Exact;
    std::optional<std::uint64_t> seed_;
    std::size_t budget_ = 1000;
    unsigned workers_ = default_workers();

    std::optional<ChebSystem> system_;
    std::optional<ExtendedSystem> ext_;
    std::map<std::string, std::shared_ptr<const RationalModule>> modules_;
    std::map<std::string, Function> functions_;
    std::vector<Task> tasks_;

    [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const {
        std::size_t line = 0;
        if (auto it = lines_.find(section + "\x1f" + key); it != lines_.end())
            line = it->second;
        else if (auto jt = lines_.find(section + "\x1f"); jt != lines_.end())
            line = jt->second;
        std::string where = path_ + (line ? ":" + std::to_string(line) : "") + ": [" + section + "]";
        if (!key.empty()) where += " " + key;
        throw ConfigError(where + ": " + msg);
    }

    void index_lines() {
        std::ifstream in(path_);
        std::string line, section;
        for (std::size_t n = 1; std::getline(in, line); ++n) {
            boost::algorithm::trim(line);
            if (line.empty() || line[0] == ';' || line[0] == '#') continue;
            if (line.front() == '[' && line.back() == ']') {
                section = boost::algorithm::trim_copy(line.substr(1, line.size() - 2));
                lines_[section + "\x1f"] = n;
            } else if (auto eq = line.find('='); eq != std::string::npos) {
                lines_[section + "\x1f" + boost::algorithm::trim_copy(line.substr(0, eq))] = n;
            }
        }
    }

    template <class Fn>
    auto guarded(const std::string& section, const std::string& key, Fn&& fn) const -> decltype(fn()) {
        try {
            return fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail(section, key, e.what());
        }
    }

    void check_keys(const std::string& section, const boost::property_tree::ptree& keys,
                    const std::set<std::string>& allowed) const {
        for (const auto& [k, v] : keys)
            if (!allowed.count(k)) fail(section, k, "unknown key");
    }

    static std::optional<std::string> find(const boost::property_tree::ptree& keys, const std::string& key) {
        auto it = keys.find(key);
        if (it == keys.not_found()) return std::nullopt;
        return it->second.data();
    }
    std::string get(const std::string& section, const boost::property_tree::ptree& keys, const std::string& key) const {
        auto v = find(keys, key);
        if (!v) fail(section, key, "missing required key");
        return *v;
    }

    std::string resolve(const std::string& file) const {
        std::filesystem::path p(file);
        return (p.is_absolute() ? p : base_ / p).string();
    }

    void load_run(const boost::property_tree::ptree& keys);
    void load_system(const boost::property_tree::ptree& keys);
    void load_extension(const boost::property_tree::ptree& keys);
    void load_module(const std::string& section, const std::string& name, const boost::property_tree::ptree& keys);
    void load_function(const std::string& section, const std::string& name, const boost::property_tree::ptree& keys);
    GenPolynomial load_genpoly(const std::string& section, const boost::property_tree::ptree& keys) const;
    void validate_task(const Task& t) const;
    Certificate run_task(const Task& t) const;

    const ChebSystem& system(const Task& t) const {
        if (!system_) fail(t.section, "check", "task needs a [system] section");
        return *system_;
    }
    const ExtendedSystem& extension(const Task& t) const {
        if (!ext_) fail(t.section, "check", "task needs an extension (a factorized system or an [extension] section)");
        return *ext_;
    }
    const Function& function(const Task& t, const std::string& key = "function") const {
        const std::string name = boost::algorithm::trim_copy(get(t.section, t.keys, key));
        auto it = functions_.find(name);
        if (it == functions_.end()) fail(t.section, key, "undeclared function '" + name + "'");
        return it->second;
    }
};

inline void Runner::load() {
    namespace pt = boost::property_tree;
    base_ = std::filesystem::path(path_).parent_path();
    out_ = base_ / "reports";
    {
        std::ifstream in(path_);
        if (!in) throw ConfigError(path_ + ": cannot open configuration");
        try {
            pt::read_ini(in, tree_);
        } catch (const pt::ini_parser_error& e) {
            throw ConfigError(path_ + ":" + std::to_string(e.line()) + ": " + e.message());
        }
    }
    index_lines();
    for (const auto& [section, keys] : tree_) {
        if (!keys.data().empty()) fail("", section, "key outside any section");
        std::vector<std::string> words;
        boost::algorithm::split(words, section, boost::algorithm::is_space(), boost::algorithm::token_compress_on);
        const std::string kind = words[0];
        const std::string name = words.size() > 1 ? words[1] : "";
        if (words.size() > 2) fail(section, "", "section names are '<kind>' or '<kind> <name>'");
        if (kind == "run" && name.empty())
            guarded(section, "", [&] { load_run(keys); });
        else if (kind == "system" && name.empty())
            guarded(section, "", [&] { load_system(keys); });
        else if (kind == "extension" && name.empty())
            guarded(section, "", [&] { load_extension(keys); });
        else if (kind == "module" && !name.empty())
            load_module(section, name, keys);
        else if (kind == "function" && !name.empty())
            load_function(section, name, keys);
        else if (kind == "task" && !name.empty()) {
            for (const auto& t : tasks_)
                if (t.name == name) fail(section, "", "duplicate task name");
            tasks_.push_back({name, boost::algorithm::trim_copy(get(section, keys, "check")), section, keys});
        } else
            fail(section, "", "unknown section");
    }
    if (over_.mode) mode_ = *over_.mode;
    if (over_.seed) seed_ = *over_.seed;
    if (over_.budget) budget_ = *over_.budget;
    if (over_.out) out_ = *over_.out;
    if (over_.workers) workers_ = *over_.workers;
    if (!ext_ && system_ && system_->factorized()) ext_ = extend_with_power(*system_);
    for (const auto& t : tasks_) validate_task(t);
}

inline void Runner::load_run(const boost::property_tree::ptree& keys) {
    check_keys("run", keys, {"mode", "seed", "budget", "out"});
    if (auto v = find(keys, "mode")) guarded("run", "mode", [&] { mode_ = detail::parse_mode(*v); });
    if (auto v = find(keys, "seed")) guarded("run", "seed", [&] { seed_ = detail::parse_count(*v); });
    if (auto v = find(keys, "budget")) guarded("run", "budget", [&] { budget_ = detail::parse_count(*v); });
    if (auto v = find(keys, "out")) out_ = resolve(boost::algorithm::trim_copy(*v));
}

inline void Runner::load_system(const boost::property_tree::ptree& keys) {
    const std::string s = "system";
    const std::string kind = boost::algorithm::trim_copy(get(s, keys, "kind"));
    auto domain = [&] { return guarded(s, "domain", [&] { return detail::parse_interval(get(s, keys, "domain")); }); };
    if (kind == "polynomial") {
        check_keys(s, keys, {"kind", "n", "domain"});
        const auto n = guarded(s, "n", [&] { return detail::parse_count(get(s, keys, "n")); });
        system_ = guarded(s, "n", [&] { return make_polynomial_system(n, domain()); });
    } else if (kind == "weighted") {
        check_keys(s, keys, {"kind", "weight", "matrix", "domain"});
        const Function w = guarded(s, "weight", [&] { return parse_function(get(s, keys, "weight")); });
        const Matrix<Surd> m = guarded(s, "matrix", [&] { return detail::parse_matrix(get(s, keys, "matrix")); });
        const Interval d = domain();
        system_ = guarded(s, "matrix", [&] { return make_weighted_system(w, m, d); });
    } else if (kind == "functions") {
        check_keys(s, keys, {"kind", "components", "domain"});
        std::vector<Function> comps;
        for (const auto& e : detail::split_list(get(s, keys, "components"), ";"))
            comps.push_back(guarded(s, "components", [&] { return parse_function(e); }));
        system_ = guarded(s, "components", [&] { return ChebSystem(comps, domain()); });
    } else if (kind == "tabulated") {
        check_keys(s, keys, {"kind", "files", "domain"});
        std::vector<Function> comps;
        std::optional<Scalar> lo, hi;
        for (const auto& f : detail::split_list(get(s, keys, "files"))) {
            const CsvData data = guarded(s, "files", [&] { return ingest_csv(resolve(f)); });
            comps.push_back(data.table());
            if (!lo || *lo < data.rows.front().first) lo = data.rows.front().first;
            if (!hi || data.rows.back().first < *hi) hi = data.rows.back().first;
        }
        if (comps.empty()) fail(s, "files", "no component files");
        const Interval d = find(keys, "domain") ? domain() : guarded(s, "files", [&] { return Interval(*lo, *hi); });
        system_ = ChebSystem(comps, d);
    } else {
        fail(s, "kind", "unknown system kind '" + kind + "' (polynomial, weighted, functions, tabulated)");
    }
}

inline void Runner::load_extension(const boost::property_tree::ptree& keys) {
    const std::string s = "extension";
    check_keys(s, keys, {"kind", "function"});
    if (!system_) fail(s, "", "declare [system] before [extension]");
    const std::string kind = boost::algorithm::trim_copy(find(keys, "kind").value_or("power"));
    if (kind == "power") {
        ext_ = guarded(s, "kind", [&] { return extend_with_power(*system_); });
    } else if (kind == "function") {
        ext_ = ExtendedSystem(*system_, guarded(s, "function", [&] { return parse_function(get(s, keys, "function")); }));
    } else {
        fail(s, "kind", "unknown extension kind '" + kind + "' (power, function)");
    }
}

inline void Runner::load_module(const std::string& section, const std::string& name,
                                const boost::property_tree::ptree& keys) {
    check_keys(section, keys, {"generators", "domain"});
    if (modules_.count(name)) fail(section, "", "duplicate module name");
    const auto gens = guarded(section, "generators", [&] { return detail::parse_exacts(get(section, keys, "generators")); });
    std::optional<Interval> d;
    if (find(keys, "domain"))
        d = guarded(section, "domain", [&] { return detail::parse_interval(get(section, keys, "domain")); });
    else if (system_)
        d = system_->domain();
    else
        fail(section, "domain", "module needs a domain (or a preceding [system])");
    modules_[name] = guarded(section, "generators", [&] { return std::make_shared<const RationalModule>(gens, *d); });
}

inline GenPolynomial Runner::load_genpoly(const std::string& section, const boost::property_tree::ptree& keys) const {
    const std::string mname = boost::algorithm::trim_copy(get(section, keys, "module"));
    auto it = modules_.find(mname);
    if (it == modules_.end()) fail(section, "module", "undeclared module '" + mname + "'");
    GenPolynomial g(it->second);
    const std::size_t m = it->second->rank();
    if (auto v = find(keys, "constant")) guarded(section, "constant", [&] { g.set_constant(parse_exact(*v)); });
    if (auto v = find(keys, "additive"))
        guarded(section, "additive", [&] {
            auto vals = detail::parse_exacts(*v);
            if (vals.size() != m) throw ParseError("additive needs one value per generator");
            g.set_tensor(1, vals);
        });
    for (std::size_t k = 2; k <= 8; ++k) {
        const std::string key = "tensor" + std::to_string(k);
        if (auto v = find(keys, key)) guarded(section, key, [&] { g.set_tensor(k, detail::parse_exacts(*v, ", \t|;")); });
    }
    return g;
}

inline void Runner::load_function(const std::string& section, const std::string& name,
                                  const boost::property_tree::ptree& keys) {
    if (functions_.count(name)) fail(section, "", "duplicate function name");
    if (name == "x" || name == "t") fail(section, "", "'" + name + "' is reserved for the variable");
    std::string kind = find(keys, "kind") ? boost::algorithm::trim_copy(*find(keys, "kind")) : "";
    if (kind.empty()) kind = find(keys, "file") ? "table" : "expr";
    const std::set<std::string> gp_keys{"kind", "module", "constant", "additive", "tensor2", "tensor3", "tensor4",
                                        "tensor5", "tensor6", "tensor7", "tensor8"};
    if (kind == "expr") {
        check_keys(section, keys, {"kind", "expr"});
        functions_[name] = guarded(section, "expr", [&] { return parse_function(get(section, keys, "expr"), functions_); });
    } else if (kind == "table") {
        check_keys(section, keys, {"kind", "file"});
        functions_[name] = guarded(section, "file", [&] { return ingest_csv(resolve(get(section, keys, "file"))).table(); });
    } else if (kind == "genpoly") {
        check_keys(section, keys, gp_keys);
        functions_[name] = module_function(load_genpoly(section, keys));
    } else if (kind == "jensen_affine") {
        check_keys(section, keys, gp_keys);
        if (!system_) fail(section, "kind", "jensen_affine needs a preceding [system]");
        const GenPolynomial g = load_genpoly(section, keys);
        functions_[name] = guarded(section, "module", [&] { return build_jensen_affine(*system_, g); });
    } else if (kind == "wright") {
        auto allowed = gp_keys;
        allowed.insert("convex");
        check_keys(section, keys, allowed);
        if (!system_) fail(section, "kind", "wright needs a preceding [system]");
        const std::string fname = boost::algorithm::trim_copy(get(section, keys, "convex"));
        auto it = functions_.find(fname);
        if (it == functions_.end()) fail(section, "convex", "undeclared function '" + fname + "'");
        const GenPolynomial g = load_genpoly(section, keys);
        const ExtendedSystem ext = ext_ ? *ext_ : guarded(section, "kind", [&] { return extend_with_power(*system_); });
        // the convex part is certified on the fly; its sampling follows [run]
        const std::uint64_t seed = over_.seed ? *over_.seed : seed_.value_or(0);
        const Mode mode = over_.mode.value_or(mode_);
        CheckOptions opt;
        opt.mode = mode;
        opt.workers = over_.workers.value_or(workers_);
        SamplingOptions sampling{std::min<std::size_t>(over_.budget.value_or(budget_), 2000), seed,
                                 default_source(*system_, mode, &it->second)};
        functions_[name] =
            guarded(section, "convex", [&] { return synthesize_wright(ext, it->second, g, sampling, opt).f; });
    } else {
        fail(section, "kind", "unknown function kind '" + kind + "' (expr, table, genpoly, jensen_affine, wright)");
    }
}

namespace detail {

inline const std::map<std::string, std::set<std::string>>& task_keys() {
    static const std::set<std::string> common{"check", "mode", "budget", "seed", "plot"};
    static const std::map<std::string, std::set<std::string>> extra{
        {"omega_convex", {"function", "affine", "points", "tuple"}},
        {"omega_jensen", {"function", "affine", "points", "h", "spacing"}},
        {"t_omega_convex", {"function", "affine", "points", "steps"}},
        {"wright", {"function", "points", "x", "h"}},
        {"positive_chebyshev", {"target", "points"}},
        {"factorization", {"function", "tuple", "points"}},
        {"chwc_ratio", {"function", "tuple", "points"}},
        {"chwc_perm_sum", {"function", "x", "h", "points"}},
        {"fit_omega_affine", {"function", "nodes"}},
        {"qp_equation", {"function", "triple", "domain", "points"}},
        {"extend_grid", {"grid", "function", "step", "range", "refine", "tolerance"}},
        {"divided_difference", {"function", "nodes"}},
        {"finite_difference", {"function", "x", "h"}},
    };
    static const std::map<std::string, std::set<std::string>> all = [&] {
        std::map<std::string, std::set<std::string>> m;
        for (const auto& [k, v] : extra) {
            m[k] = common;
            m[k].insert(v.begin(), v.end());
        }
        return m;
    }();
    return all;
}

// Tasks whose outcome depends on random sampling.
inline bool sampled(const std::string& check, const boost::property_tree::ptree& keys) {
    auto has = [&](const char* k) { return keys.find(k) != keys.not_found(); };
    if (check == "omega_convex") return !has("tuple");
    if (check == "omega_jensen") return !has("h");
    if (check == "wright" || check == "chwc_perm_sum") return !(has("x") && has("h"));
    if (check == "factorization" || check == "chwc_ratio") return !has("tuple");
    if (check == "qp_equation") return !has("triple");
    return check == "t_omega_convex" || check == "positive_chebyshev" || check == "extend_grid";
}

} // namespace detail

inline void Runner::validate_task(const Task& t) const {
    const auto& all = detail::task_keys();
    auto it = all.find(t.check);
    if (it == all.end()) fail(t.section, "check", "unknown check '" + t.check + "'");
    check_keys(t.section, t.keys, it->second);
    if (detail::sampled(t.check, t.keys) && !over_.seed && !seed_ && !find(t.keys, "seed"))
        fail(t.section, "seed", "sampled tasks need a seed (task seed, [run] seed or --seed)");
    for (const char* key : {"function"})
        if (auto v = find(t.keys, key); v && !functions_.count(boost::algorithm::trim_copy(*v)))
            fail(t.section, key, "undeclared function '" + boost::algorithm::trim_copy(*v) + "'");
    if (it->second.count("function") && t.check != "extend_grid" && !find(t.keys, "function") &&
        t.check != "factorization")
        fail(t.section, "function", "missing required key");
    if (auto v = find(t.keys, "points")) {
        const std::string p = boost::algorithm::trim_copy(*v);
        if (p.rfind("module:", 0) == 0 && !modules_.count(p.substr(7)))
            fail(t.section, "points", "undeclared module '" + p.substr(7) + "'");
        if (p != "auto" && p != "rational" && p != "real" && p != "table" && p.rfind("module:", 0) != 0)
            fail(t.section, "points", "points must be auto, rational, real, table or module:<name>");
    }
    if (auto v = find(t.keys, "mode")) guarded(t.section, "mode", [&] { detail::parse_mode(*v); });
    for (const char* key : {"budget", "seed", "refine"})
        if (auto v = find(t.keys, key)) guarded(t.section, key, [&] { detail::parse_count(*v); });
    if (auto v = find(t.keys, "affine")) guarded(t.section, "affine", [&] { detail::parse_bool(*v); });
}

inline Certificate Runner::run_task(const Task& t) const {
    const std::string& sec = t.section;
    const auto& k = t.keys;
    const Mode mode = over_.mode ? *over_.mode : find(k, "mode") ? detail::parse_mode(*find(k, "mode")) : mode_;
    const std::size_t budget = over_.budget ? *over_.budget : find(k, "budget") ? detail::parse_count(*find(k, "budget")) : budget_;
    const std::optional<std::uint64_t> seed =
        over_.seed ? over_.seed : find(k, "seed") ? std::optional<std::uint64_t>(detail::parse_count(*find(k, "seed"))) : seed_;
    CheckOptions opt;
    opt.mode = mode;
    opt.workers = workers_;
    opt.keep_records = find(k, "plot").has_value();
    opt.affine = find(k, "affine") ? detail::parse_bool(*find(k, "affine")) : false;
    opt.seed = seed;

    auto scalars = [&](const char* key) { return guarded(sec, key, [&] { return detail::parse_scalars(get(sec, k, key)); }); };
    auto scalar = [&](const char* key) { return guarded(sec, key, [&] { return parse_scalar(get(sec, k, key)); }); };
    auto tuple = [&](const char* key) { return guarded(sec, key, [&] { return SimplexTuple(detail::parse_scalars(get(sec, k, key))); }); };
    auto source = [&](const ChebSystem& sys, const Function* f) -> PointSource {
        const std::string p = boost::algorithm::trim_copy(find(k, "points").value_or("auto"));
        if (p == "auto") return default_source(sys, mode, f);
        if (p == "rational") return RationalSource{};
        if (p == "real") return RealSource{};
        if (p == "table") {
            auto s = finite_support(sys, f);
            if (!s) fail(sec, "points", "no tabulated component to take points from");
            return DiscreteSource{*s};
        }
        return ModuleSource{modules_.at(p.substr(7))};
    };
    auto sampling = [&](const ChebSystem& sys, const Function* f) {
        return SamplingOptions{budget, seed.value_or(0), source(sys, f)};
    };
    auto with_source = [&](const SamplingOptions& s) {
        CheckOptions o = opt;
        o.source = s.source;
        return o;
    };

    const std::string& c = t.check;
    return guarded(sec, "check", [&]() -> Certificate {
        if (c == "omega_convex") {
            const auto& sys = system(t);
            const Function& f = function(t);
            if (find(k, "tuple")) {
                ConfigSet<SimplexTuple> one;
                one.configs.push_back(tuple("tuple"));
                return check_omega_convex(sys, f, one, opt);
            }
            return check_omega_convex(sys, f, sampling(sys, &f), opt);
        }
        if (c == "omega_jensen") {
            const auto& sys = system(t);
            const Function& f = function(t);
            if (find(k, "h")) {
                const auto hs = scalars("h");
                if (hs.empty()) fail(sec, "h", "empty step list");
                const Scalar spacing = find(k, "spacing") ? scalar("spacing") : *std::min_element(hs.begin(), hs.end());
                CheckOptions o = opt;
                o.source = DiscreteSource{};
                return check_omega_jensen(sys, f, jensen_grid(sys.domain(), sys.dim(), hs, spacing), o);
            }
            return check_omega_jensen(sys, f, sampling(sys, &f), opt);
        }
        if (c == "t_omega_convex") {
            const auto& sys = system(t);
            const Function& f = function(t);
            return check_t_omega_convex(sys, f, scalars("steps"), sampling(sys, &f), opt);
        }
        if (c == "wright") {
            const auto& ext = extension(t);
            const Function& f = function(t);
            if (find(k, "x") && find(k, "h")) {
                ConfigSet<WrightConfig> one;
                one.configs.push_back({scalar("x"), scalars("h")});
                return check_wright(ext, f, one, opt);
            }
            return check_wright(ext, f, sampling(ext.base(), &f), opt);
        }
        if (c == "positive_chebyshev") {
            const std::string target = boost::algorithm::trim_copy(find(k, "target").value_or("system"));
            if (target != "system" && target != "extension") fail(sec, "target", "target must be system or extension");
            const ChebSystem sys = target == "system" ? system(t) : extension(t).as_system();
            return is_positive_chebyshev(sys, sampling(sys, nullptr), opt);
        }
        if (c == "factorization" || c == "chwc_ratio") {
            const bool fact = c == "factorization";
            const auto& sys = fact ? system(t) : extension(t).base();
            std::optional<Function> f;
            if (find(k, "function")) f = function(t);
            if (!fact && !f) fail(sec, "function", "missing required key");
            const std::size_t arity = sys.dim() + (f ? 1 : 0);
            auto one = [&](const SimplexTuple& tp) {
                return fact ? factorization_check(sys, f, tp, mode) : chwc_ratio_check(extension(t), *f, tp, mode);
            };
            if (find(k, "tuple")) return one(tuple("tuple"));
            const auto s = sampling(sys, f ? &*f : nullptr);
            const auto tuples = sample_simplex_tuples(sys.domain(), arity, s);
            std::vector<Certificate> reps(tuples.configs.size());
            parallel_for(reps.size(), workers_, [&](std::size_t i) { reps[i] = one(tuples.configs[i]); });
            return detail::aggregate_reports(fact ? Property::Factorization : Property::ChwcRatio, reps, mode, seed,
                                             opt.keep_records);
        }
        if (c == "chwc_perm_sum") {
            const auto& ext = extension(t);
            const Function& f = function(t);
            if (find(k, "x") && find(k, "h")) return chwc_perm_sum_check(ext, f, scalar("x"), scalars("h"), mode);
            const auto s = sampling(ext.base(), &f);
            const auto cfgs = sample_wright_configs(ext.base().domain(), ext.base().dim(), s);
            std::vector<Certificate> reps(cfgs.configs.size());
            parallel_for(reps.size(), workers_, [&](std::size_t i) {
                reps[i] = chwc_perm_sum_check(ext, f, cfgs.configs[i].base, cfgs.configs[i].increments, mode);
            });
            return detail::aggregate_reports(Property::ChwcPermSum, reps, mode, seed, opt.keep_records);
        }
        if (c == "fit_omega_affine") {
            return fit_omega_affine(system(t), function(t), tuple("nodes"), mode).report;
        }
        if (c == "qp_equation") {
            const Function& rho = function(t);
            if (find(k, "triple")) {
                const auto v = scalars("triple");
                if (v.size() != 3) fail(sec, "triple", "expected u, y, z");
                return qp_equation_check(rho, std::vector<QpTriple>{{v[0], v[1], v[2]}}, opt);
            }
            const Interval d = find(k, "domain") ? guarded(sec, "domain", [&] { return detail::parse_interval(*find(k, "domain")); })
                               : system_      ? system_->domain()
                                              : (fail(sec, "domain", "needs a domain or a [system]"), system_->domain());
            const std::string p = boost::algorithm::trim_copy(find(k, "points").value_or("auto"));
            PointSource src = mode == Mode::Exact ? PointSource(RationalSource{}) : PointSource(RealSource{});
            if (p == "real") src = RealSource{};
            if (p == "rational") src = RationalSource{};
            if (p.rfind("module:", 0) == 0) src = ModuleSource{modules_.at(p.substr(7))};
            return qp_equation_check(rho, d, SamplingOptions{budget, seed.value_or(0), src}, opt);
        }
        if (c == "extend_grid") {
            const auto& sys = system(t);
            GridFunction grid;
            if (find(k, "grid")) {
                const CsvData data = guarded(sec, "grid", [&] { return ingest_csv(resolve(get(sec, k, "grid"))); });
                if (!data.grid) fail(sec, "grid", "samples are not equally spaced");
                grid = *data.grid;
            } else {
                const Function& f = function(t);
                const Scalar step = scalar("step");
                const Interval r = guarded(sec, "range", [&] { return detail::parse_interval(get(sec, k, "range")); });
                grid.offset = r.lo;
                grid.step = step;
                for (Scalar x = r.lo; x <= r.hi; x = x + step)
                    grid.values.push_back(mode == Mode::Exact ? [&] {
                        try {
                            return Scalar(f.eval_exact(x).algebraic());
                        } catch (const NotExact&) {
                            return Scalar::real(f.eval_float(x));
                        }
                    }()
                                                              : Scalar::real(f.eval_float(x)));
            }
            const std::size_t refine = find(k, "refine") ? detail::parse_count(*find(k, "refine")) : budget;
            const double tol = find(k, "tolerance") ? scalar("tolerance").approx() : 1e-10;
            auto r = extend_from_dense_grid(sys, grid, refine, seed.value_or(0), mode, tol, opt);
            r.report.details["jensen"] = to_json(r.jensen);
            return r.report;
        }
        if (c == "divided_difference") {
            const Function& g = function(t);
            const auto nodes = scalars("nodes");
            const DetValue recursive = divided_difference(g, nodes, mode);
            // cross-check: Phi_(pi_k, g) / Phi_(pi_{k+1}) on the sorted nodes
            std::vector<Scalar> sorted = nodes;
            std::sort(sorted.begin(), sorted.end());
            const Interval d(sorted.front() - Scalar(1), sorted.back() + Scalar(1));
            const SimplexTuple tp(sorted);
            const DetValue ratio = sorted.size() == 1 ? DetValue::from_float(g.eval_float(sorted[0]), 0.0)
                                                      : divide(phi_bordered(make_polynomial_system(sorted.size() - 1, d), g, tp, mode),
                                                               phi_system(make_polynomial_system(sorted.size(), d), tp, mode));
            std::vector<std::string> names;
            for (std::size_t i = 0; i < nodes.size(); ++i) names.push_back("x" + std::to_string(i));
            Certificate rep = detail::identity_report(Property::DividedDifference, mode, recursive, ratio,
                                                      identity_rel_tol, names, nodes);
            rep.details["value"] = recursive.to_string();
            return rep;
        }
        if (c == "finite_difference") {
            const Function& g = function(t);
            const Scalar x = scalar("x");
            const auto hs = scalars("h");
            const DetValue v = finite_difference(g, x, hs, mode, system_ ? &system_->domain() : nullptr);
            Certificate rep;
            rep.property = Property::FiniteDifference;
            rep.mode = v.is_exact() ? Mode::Exact : Mode::Float;
            rep.samples = 1;
            rep.verdict = Verdict::Pass;
            rep.coordinate_names = {"x"};
            for (std::size_t i = 1; i <= hs.size(); ++i) rep.coordinate_names.push_back("h" + std::to_string(i));
            std::vector<Scalar> cfg{x};
            cfg.insert(cfg.end(), hs.begin(), hs.end());
            rep.records.push_back({cfg, v, RecordStatus::Ok});
            rep.details["value"] = v.to_string();
            rep.details["approx"] = detail::format_double(v.value);
            if (!v.is_exact()) rep.details["abs_error_bound"] = detail::format_double(v.abs_error_bound);
            return rep;
        }
        fail(sec, "check", "unknown check '" + c + "'");
    });
}

inline int Runner::execute() {
    std::filesystem::create_directories(out_);
    nlohmann::json summary;
    nlohmann::json tasks = nlohmann::json::array();
    int worst = 0;
    for (const auto& t : tasks_) {
        nlohmann::json entry{{"task", t.name}, {"check", t.check}};
        try {
            Certificate cert = run_task(t);
            nlohmann::json j = to_json(cert);
            j["task"] = t.name;
            j["check"] = t.check;
            if (auto f = find(t.keys, "function")) j["function"] = boost::algorithm::trim_copy(*f);
            std::ofstream(out_ / (t.name + ".json")) << j.dump(2) << '\n';
            if (auto p = find(t.keys, "plot")) emit_plot_data(cert, (out_ / boost::algorithm::trim_copy(*p)).string());
            const int code = exit_code(cert.verdict);
            worst = std::max(worst, code);
            entry["property"] = to_string(cert.property);
            entry["verdict"] = to_string(cert.verdict);
            entry["exit_code"] = code;
        } catch (const std::exception& e) {
            entry["error"] = e.what();
            entry["exit_code"] = 3;
            worst = 3;
        }
        tasks.push_back(std::move(entry));
    }
    summary["tasks"] = std::move(tasks);
    summary["exit_code"] = worst;
    summary["mode"] = to_string(mode_);
    summary["seed"] = seed_ ? nlohmann::json(*seed_) : nlohmann::json(nullptr);
    summary["budget"] = budget_;
    std::ofstream(out_ / "summary.json") << summary.dump(2) << '\n';
    return worst;
}

/// Loads and runs a configuration; configuration errors print a diagnostic and give 3.
inline int run(const std::string& config_path, const RunOverrides& overrides, std::ostream& err) {
    try {
        Runner r(config_path, overrides);
        r.load();
        return r.execute();
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace chebyconvex
