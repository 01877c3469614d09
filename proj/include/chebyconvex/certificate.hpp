#pragma once

#include "matrix.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chebyconvex {

enum class Property {
    TOmegaConvex,
    OmegaJensen,
    OmegaConvex,
    Wright,
    OmegaAffine,
    JensenAffine,
    ChebyshevPositive,
    Factorization,
    ChwcRatio,
    ChwcPermSum,
    AffineFit,
    QpEquation,
    GridExtension,
    DividedDifference,
    FiniteDifference,
};

inline const char* to_string(Property p) {
    switch (p) {
    case Property::TOmegaConvex: return "T_OMEGA_CONVEX";
    case Property::OmegaJensen: return "OMEGA_JENSEN";
    case Property::OmegaConvex: return "OMEGA_CONVEX";
    case Property::Wright: return "WRIGHT";
    case Property::OmegaAffine: return "OMEGA_AFFINE";
    case Property::JensenAffine: return "JENSEN_AFFINE";
    case Property::ChebyshevPositive: return "CHEBYSHEV_POSITIVE";
    case Property::Factorization: return "FACTORIZATION";
    case Property::ChwcRatio: return "CHWC_RATIO";
    case Property::ChwcPermSum: return "CHWC_PERM_SUM";
    case Property::AffineFit: return "AFFINE_FIT";
    case Property::QpEquation: return "QP_EQUATION";
    case Property::GridExtension: return "GRID_EXTENSION";
    case Property::DividedDifference: return "DIVIDED_DIFFERENCE";
    case Property::FiniteDifference: return "FINITE_DIFFERENCE";
    }
    return "?";
}

enum class Verdict {
    PassSampled,
    PositiveSampled,
    SatisfiedSampled,
    Pass,
    Refuted,
    Violated,
    Fail,
    Indeterminate,
};

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::PassSampled: return "PASS_SAMPLED";
    case Verdict::PositiveSampled: return "POSITIVE_SAMPLED";
    case Verdict::SatisfiedSampled: return "SATISFIED_SAMPLED";
    case Verdict::Pass: return "PASS";
    case Verdict::Refuted: return "REFUTED";
    case Verdict::Violated: return "VIOLATED";
    case Verdict::Fail: return "FAIL";
    case Verdict::Indeterminate: return "INDETERMINATE";
    }
    return "?";
}

/// 0 for passing verdicts, 1 for refutations, 2 for indeterminate.
inline int severity(Verdict v) {
    switch (v) {
    case Verdict::Refuted:
    case Verdict::Violated:
    case Verdict::Fail: return 1;
    case Verdict::Indeterminate: return 2;
    default: return 0;
    }
}

inline bool passed(Verdict v) { return severity(v) == 0; }

enum class RecordStatus { Ok, Violation, Indeterminate };

/// One evaluated configuration, kept for plot export.
struct Record {
    std::vector<Scalar> configuration;
    DetValue value;
    RecordStatus status = RecordStatus::Ok;
};

struct Witness {
    std::vector<Scalar> configuration;
    std::vector<Scalar> points;
    DetValue value;
    std::optional<std::vector<Scalar>> shrunk_from;
};

/// Outcome of a property check or identity verification.
struct Certificate {
    Property property = Property::OmegaConvex;
    Verdict verdict = Verdict::PassSampled;
    Mode mode = Mode::Exact;
    std::size_t samples = 0;
    std::optional<std::uint64_t> seed;
    bool affine = false;
    bool exhaustive = false;
    std::vector<std::string> coordinate_names;
    std::vector<Witness> witnesses;
    std::vector<Record> records;
    std::optional<std::pair<DetValue, DetValue>> both_sides;
    nlohmann::json details = nlohmann::json::object();
};

namespace detail {

inline nlohmann::json scalars_json(const std::vector<Scalar>& xs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : xs) a.push_back(x.to_string());
    return a;
}

inline nlohmann::json value_json(const DetValue& v) {
    nlohmann::json j;
    j["value"] = v.to_string();
    j["approx"] = format_double(v.value);
    j["mode"] = to_string(v.is_exact() ? Mode::Exact : Mode::Float);
    if (!v.is_exact()) j["abs_error_bound"] = format_double(v.abs_error_bound);
    return j;
}

} // namespace detail

inline nlohmann::json to_json(const Certificate& c) {
    nlohmann::json j;
    j["property"] = to_string(c.property);
    j["verdict"] = to_string(c.verdict);
    j["mode"] = to_string(c.mode);
    j["samples"] = c.samples;
    j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
    j["affine"] = c.affine;
    j["exhaustive"] = c.exhaustive;
    j["coordinates"] = c.coordinate_names;
    nlohmann::json ws = nlohmann::json::array();
    for (const auto& w : c.witnesses) {
        nlohmann::json wj;
        wj["configuration"] = detail::scalars_json(w.configuration);
        wj["points"] = detail::scalars_json(w.points);
        wj["determinant"] = detail::value_json(w.value);
        if (w.shrunk_from) wj["shrunk_from"] = detail::scalars_json(*w.shrunk_from);
        ws.push_back(std::move(wj));
    }
    j["witnesses"] = std::move(ws);
    if (c.both_sides)
        j["both_sides"] = {detail::value_json(c.both_sides->first), detail::value_json(c.both_sides->second)};
    if (!c.details.empty()) j["details"] = c.details;
    return j;
}

} // namespace chebyconvex
