#pragma once

#include "certificate.hpp"
#include "identities.hpp"

#include <boost/algorithm/string.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace chebyconvex {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Samples read from a two-column CSV file.
struct CsvData {
    std::vector<std::pair<Scalar, Scalar>> rows;
    /// False when some literal was a decimal; then every value is a double.
    bool exact = true;
    /// Set when the abscissae are equally spaced.
    std::optional<GridFunction> grid;

    Function table() const { return Function::tabulated(rows); }
};

namespace detail {

/// "p", "p/q" (exact) or a decimal (inexact). Returns nothing for non-numbers.
inline std::optional<Scalar> parse_csv_number(const std::string& cell, bool& exact) {
    const std::string s = boost::algorithm::trim_copy(cell);
    if (s.empty()) return std::nullopt;
    auto integer = [](const std::string& t) {
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const std::string p = s.substr(0, slash), q = s.substr(slash + 1);
        if (!integer(p) || !integer(q) || q[0] == '-' || q[0] == '+') return std::nullopt;
        mpq_class v{mpz_class(p[0] == '+' ? p.substr(1) : p), mpz_class(q)};
        if (v.get_den() == 0) return std::nullopt;
        v.canonicalize();
        return Scalar(v);
    }
    if (integer(s)) return Scalar(mpq_class(mpz_class(s[0] == '+' ? s.substr(1) : s)));
    std::size_t used = 0;
    double d;
    try {
        d = std::stod(s, &used);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (used != s.size() || !std::isfinite(d)) return std::nullopt;
    exact = false;
    return Scalar::real(d);
}

} // namespace detail

/// Reads x,value rows. An optional first non-numeric row is a header; blank
/// lines and lines starting with '#' are skipped. Abscissae must be strictly
/// increasing. Any decimal literal makes the whole file inexact.
inline CsvData ingest_csv(std::istream& in, const std::string& name = "csv") {
    CsvData out;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    std::vector<std::pair<std::size_t, std::pair<Scalar, Scalar>>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        boost::algorithm::trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        boost::algorithm::split(cells, line, boost::algorithm::is_any_of(","));
        if (cells.size() != 2)
            throw CsvError(name + ":" + std::to_string(lineno) + ": expected 2 columns (x,value), found " +
                           std::to_string(cells.size()));
        auto x = detail::parse_csv_number(cells[0], out.exact);
        auto v = detail::parse_csv_number(cells[1], out.exact);
        if (!x || !v) {
            if (first) {
                first = false;
                continue;
            }
            throw CsvError(name + ":" + std::to_string(lineno) + ": not a number");
        }
        first = false;
        rows.push_back({lineno, {*x, *v}});
    }
    if (rows.empty()) throw CsvError(name + ": no data rows");
    for (auto& [ln, r] : rows) {
        if (!out.exact) r = {Scalar::real(r.first.approx()), Scalar::real(r.second.approx())};
        if (!out.rows.empty()) {
            if (out.rows.back().first == r.first)
                throw CsvError(name + ":" + std::to_string(ln) + ": duplicate abscissa " + r.first.to_string());
            if (r.first < out.rows.back().first)
                throw CsvError(name + ":" + std::to_string(ln) + ": abscissae are not increasing");
        }
        out.rows.push_back(r);
    }
    if (out.rows.size() >= 2) {
        const Scalar step = out.rows[1].first - out.rows[0].first;
        bool equal = true;
        for (std::size_t k = 2; k < out.rows.size() && equal; ++k) {
            const Scalar d = out.rows[k].first - out.rows[k - 1].first;
            equal = out.exact ? d == step
                              : std::abs(d.approx() - step.approx()) <= 1e-12 * std::abs(step.approx());
        }
        if (equal) {
            GridFunction g{out.rows[0].first, step, {}};
            for (const auto& r : out.rows) g.values.push_back(r.second);
            out.grid = std::move(g);
        }
    }
    return out;
}

inline CsvData ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path);
    return ingest_csv(in, path);
}

/// CSV rows: configuration coordinates, value, whether it is exact, status.
/// Row order is the certificate's record order, which is deterministic.
inline void emit_plot_data(const Certificate& c, std::ostream& out) {
    for (const auto& n : c.coordinate_names) out << n << ',';
    out << "value,exact,status\n";
    for (const auto& r : c.records) {
        for (const auto& x : r.configuration) out << x.to_string() << ',';
        out << detail::format_double(r.value.value) << ',' << (r.value.is_exact() ? 1 : 0) << ','
            << (r.status == RecordStatus::Ok          ? "ok"
                : r.status == RecordStatus::Violation ? "violation"
                                                      : "indeterminate")
            << '\n';
    }
}

inline void emit_plot_data(const Certificate& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    emit_plot_data(c, out);
    if (!out) throw std::runtime_error("write failed for " + path);
}

} // namespace chebyconvex
