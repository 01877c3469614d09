#pragma once

#include "certify.hpp"
#include "module.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace chebyconvex {

/// f = (A_{n-1}(x,...,x) + ... + A_1(x) + A_0) * omega_0(x).
///
/// Jensen-affine with respect to the system on every equidistant tuple whose
/// points lie in the module of g.
inline Function build_jensen_affine(const ChebSystem& system, const GenPolynomial& g) {
    const auto& fac = system.factorization();
    if (g.degree() + 1 > system.dim())
        throw std::invalid_argument("generalized polynomial degree " + std::to_string(g.degree()) +
                                    " exceeds n - 1 = " + std::to_string(system.dim() - 1));
    Function a = module_function(g);
    return detail::is_constant_one(fac.weight) ? a : a * fac.weight;
}

struct WrightSynthesis {
    Function f;
    /// Sampled omega-convexity certificate of the convex part F.
    Certificate convex_part;
};

/// f = F + g * omega_0 for an omega-convex F: Wright convex with respect to the
/// power extension on module configurations.
inline WrightSynthesis synthesize_wright(const ExtendedSystem& ext, const Function& convex_part, const GenPolynomial& g,
                                         const SamplingOptions& sampling, CheckOptions opt = {}) {
    if (!ext.is_power_extension()) throw std::invalid_argument("synthesis needs the power extension t^n * omega_0");
    Certificate c = check_omega_convex(ext.base(), convex_part, sampling, opt);
    if (c.verdict == Verdict::Refuted) throw std::invalid_argument("F is refuted as omega-convex");
    return {convex_part + build_jensen_affine(ext.base(), g), std::move(c)};
}

/// Two module points closer than `gap` whose additive images differ by more than `jump`.
struct DiscontinuityWitness {
    ModulePoint p, q;
    Surd distance;
    Surd jump;
    mpz_class convergent_p, convergent_q;
};

/// Builds a discontinuity witness for an additive map from continued-fraction
/// convergents p/q of b_2/b_1: the module element delta = q b_2 - p b_1 is tiny
/// while A(delta) = q A(b_2) - p A(b_1) grows linearly in q unless A is a
/// multiple of the identity on span(b_1, b_2).
inline DiscontinuityWitness discontinuity_witness(const AdditiveMap& a, const ModulePoint& base, const Surd& gap,
                                                  const Surd& jump, int max_terms = 200) {
    const auto& m = a.module();
    if (m.rank() < 2) throw std::invalid_argument("a rank-1 module carries only continuous additive maps");
    const auto& b = m.generators();
    const auto& v = a.gen_values();
    if (v[0] * b[1] == v[1] * b[0])
        throw std::invalid_argument("additive map is proportional to the identity on the first two generators");
    const Surd ratio = b[1] / b[0];
    if (ratio.is_rational()) throw std::invalid_argument("generator ratio is rational");

    // convergents h_k / k_k of the continued fraction of ratio
    Surd x = ratio;
    mpz_class h_prev = 1, h = 0, k_prev = 0, k = 1;
    for (int term = 0; term < max_terms; ++term) {
        const mpz_class digit = x.floor();
        const mpz_class h_next = digit * h_prev + h, k_next = digit * k_prev + k;
        h = h_prev;
        k = k_prev;
        h_prev = h_next;
        k_prev = k_next;
        // delta = q b_2 - p b_1 with p/q = h_prev/k_prev
        std::vector<mpq_class> d(m.rank(), 0);
        d[0] = -mpq_class(h_prev);
        d[1] = mpq_class(k_prev);
        const ModulePoint delta = m.point(d);
        const Surd image = eval_additive(a, delta);
        if (abs(delta.value) < gap && abs(image) > jump) {
            std::vector<mpq_class> qc = base.coords;
            for (std::size_t i = 0; i < qc.size(); ++i) qc[i] += d[i];
            ModulePoint q = m.point(std::move(qc));
            return {base, q, abs(delta.value), abs(eval_additive(a, q) - eval_additive(a, base)), h_prev, k_prev};
        }
        const Surd frac = x - Surd(mpq_class(digit));
        if (frac.is_zero()) break;
        x = frac.inverse();
    }
    throw std::runtime_error("no discontinuity witness within the convergent limit");
}

} // namespace chebyconvex
