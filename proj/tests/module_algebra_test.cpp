#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace chebyconvex;
using oracle::q;
using oracle::Q;

namespace {

Interval closed(long lo, long hi) { return Interval(Scalar(lo), Scalar(hi)); }

std::shared_ptr<const RationalModule> sqrt2_module(long lo = 0, long hi = 4) {
    return std::make_shared<const RationalModule>(RationalModule::sqrt2(closed(lo, hi)));
}

std::vector<Q> random_coords(std::mt19937_64& rng, std::size_t m) {
    std::vector<Q> c;
    for (std::size_t i = 0; i < m; ++i) c.push_back(oracle::random_rational(rng, 3, 9));
    return c;
}

// Full multilinear sum over [m]^k of a dense row-major symmetric tensor.
Q multilinear(const std::vector<Q>& dense, std::size_t k, const std::vector<Q>& c) {
    const std::size_t m = c.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < k; ++i) total *= m;
    Q acc = 0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        Q prod = dense[flat];
        std::size_t f = flat;
        for (std::size_t i = 0; i < k; ++i) {
            prod *= c[f % m];
            f /= m;
        }
        acc += prod;
    }
    return acc;
}

std::vector<Q> random_symmetric(std::mt19937_64& rng, std::size_t m, std::size_t k) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < k; ++i) total *= m;
    std::vector<Q> dense(total);
    std::map<std::vector<std::size_t>, Q> by_sorted;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::vector<std::size_t> idx(k);
        std::size_t f = flat;
        for (std::size_t i = k; i-- > 0;) {
            idx[i] = f % m;
            f /= m;
        }
        std::sort(idx.begin(), idx.end());
        auto it = by_sorted.find(idx);
        if (it == by_sorted.end()) it = by_sorted.emplace(idx, oracle::random_rational(rng, 2, 5)).first;
        dense[flat] = it->second;
    }
    return dense;
}

std::vector<Surd> surds(const std::vector<Q>& v) {
    std::vector<Surd> out;
    for (const auto& x : v) out.emplace_back(x);
    return out;
}

ModulePoint point(const RationalModule& m, const std::vector<Q>& c) { return m.point(c); }

} // namespace

TEST(Additive, Examples) {
    const auto m = sqrt2_module();
    const AdditiveMap a(m, {Surd(0), Surd(1)});
    EXPECT_EQ(eval_additive(a, point(*m, {3, 2})), Surd(2));
    EXPECT_EQ(point(*m, {3, 2}).value, Surd(3) + Surd(2) * Surd::sqrt(2));
    EXPECT_EQ(eval_additive(AdditiveMap(m, {Surd(1), Surd(0)}), point(*m, {5, 0})), Surd(5));
    EXPECT_EQ(eval_additive(a, point(*m, {0, q(1, 2)})), Surd(q(1, 2)));
}

TEST(Additive, IsExactlyAdditive) {
    std::mt19937_64 rng(21);
    const auto m = std::make_shared<const RationalModule>(RationalModule::sqrt2_sqrt3(closed(-10, 10)));
    for (int trial = 0; trial < 300; ++trial) {
        const AdditiveMap a(m, surds(random_coords(rng, 3)));
        const auto cp = random_coords(rng, 3), cq = random_coords(rng, 3);
        std::vector<Q> cs(3);
        for (int i = 0; i < 3; ++i) cs[i] = cp[i] + cq[i];
        EXPECT_EQ(eval_additive(a, point(*m, cs)), eval_additive(a, point(*m, cp)) + eval_additive(a, point(*m, cq)));
        // rational homogeneity
        const Q r = oracle::random_rational(rng, 4, 7);
        std::vector<Q> cr(3);
        for (int i = 0; i < 3; ++i) cr[i] = r * cp[i];
        EXPECT_EQ(eval_additive(a, point(*m, cr)), Surd(r) * eval_additive(a, point(*m, cp)));
    }
}

TEST(Additive, DimensionMismatch) {
    const auto m = sqrt2_module();
    EXPECT_THROW(AdditiveMap(m, {Surd(1)}), std::invalid_argument);
    EXPECT_THROW(m->point({1}), std::invalid_argument);
}

TEST(Module, CoordinatesAreRecoveredExactly) {
    std::mt19937_64 rng(22);
    const auto m = std::make_shared<const RationalModule>(RationalModule::sqrt2_sqrt3(closed(-10, 10)));
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = random_coords(rng, 3);
        const auto back = m->coordinates(point(*m, c).value);
        ASSERT_TRUE(back);
        for (int i = 0; i < 3; ++i) EXPECT_EQ((*back)[i], c[i]);
    }
    EXPECT_FALSE(m->coordinates(Surd::sqrt(5)));
    EXPECT_FALSE(sqrt2_module()->coordinates(Surd::sqrt(3)));
}

TEST(Module, RejectsDependentGenerators) {
    EXPECT_THROW(RationalModule({Surd(1), Surd(q(3, 2))}, closed(0, 1)), std::invalid_argument);
    EXPECT_THROW(RationalModule({Surd::sqrt(2), Surd::sqrt(8)}, closed(0, 1)), std::invalid_argument);
    EXPECT_NO_THROW(RationalModule({Surd::sqrt(2), Surd(1) + Surd::sqrt(2)}, closed(0, 1)));
}

TEST(GenPoly, Examples) {
    const auto m = sqrt2_module();
    const ModulePoint p = point(*m, {1, 1});
    GenPolynomial diag(m);
    diag.set_tensor(2, {Surd(1), Surd(0), Surd(0), Surd(1)});
    EXPECT_EQ(eval_genpoly(diag, p), Surd(2));
    GenPolynomial seven(m);
    seven.set_constant(Surd(7));
    EXPECT_EQ(eval_genpoly(seven, p), Surd(7));
    EXPECT_EQ(eval_genpoly(seven, point(*m, {q(-3, 4), 5})), Surd(7));
    GenPolynomial cross(m);
    cross.set_tensor(2, {Surd(0), Surd(q(1, 2)), Surd(q(1, 2)), Surd(0)});
    EXPECT_EQ(eval_genpoly(cross, p), Surd(1));
    EXPECT_EQ(cross.degree(), 2u);
}

TEST(GenPoly, RejectsAsymmetricTensors) {
    GenPolynomial g(sqrt2_module());
    EXPECT_THROW(g.set_tensor(2, {Surd(0), Surd(1), Surd(0), Surd(0)}), std::invalid_argument);
    EXPECT_THROW(g.set_tensor(2, {Surd(0), Surd(1)}), std::invalid_argument);
}

TEST(GenPoly, DiagonalMatchesMultilinearExpansion) {
    std::mt19937_64 rng(23);
    const auto m = std::make_shared<const RationalModule>(RationalModule::sqrt2_sqrt3(closed(-10, 10)));
    for (int trial = 0; trial < 60; ++trial) {
        GenPolynomial g(m);
        const Q a0 = oracle::random_rational(rng, 3, 4);
        g.set_constant(Surd(a0));
        std::vector<std::vector<Q>> tensors;
        for (std::size_t k = 1; k <= 3; ++k) {
            tensors.push_back(random_symmetric(rng, 3, k));
            g.set_tensor(k, surds(tensors.back()));
        }
        const auto c = random_coords(rng, 3);
        Q expected = a0;
        for (std::size_t k = 1; k <= 3; ++k) expected += multilinear(tensors[k - 1], k, c);
        EXPECT_EQ(eval_genpoly(g, point(*m, c)), Surd(expected));
    }
}

TEST(ModuleFunctionTest, OffModuleEvaluationIsRejected) {
    const auto m = sqrt2_module();
    const Function a = module_function(GenPolynomial::additive(AdditiveMap(m, {Surd(0), Surd(1)})));
    EXPECT_EQ(a.eval_exact(Scalar(Surd(1) + Surd::sqrt(2))).algebraic(), Surd(1));
    EXPECT_THROW(a.eval_exact(Scalar(Surd::sqrt(3))), EvaluationError);
    EXPECT_THROW(a.eval_float(Scalar::real(0.5)), EvaluationError);
}

TEST(JensenAffine, AdditiveOnPolynomialSystem) {
    const auto d = closed(0, 4);
    const auto m = sqrt2_module();
    const Function f = build_jensen_affine(make_polynomial_system(2, d), GenPolynomial::additive(AdditiveMap(m, {Surd(0), Surd(1)})));
    std::mt19937_64 rng(24);
    const auto pi2 = make_polynomial_system(2, d);
    for (int trial = 0; trial < 200; ++trial) {
        // x and h in the module, x + 2h inside [0, 4]
        const Surd x = point(*m, {q(static_cast<long>(rng() % 8), 8), q(static_cast<long>(rng() % 8), 8)}).value;
        const Surd h = point(*m, {q(1 + static_cast<long>(rng() % 4), 16), q(static_cast<long>(rng() % 4), 16)}).value;
        const SimplexTuple t({Scalar(x), Scalar(x + h), Scalar(x + h + h)});
        const DetValue v = phi_bordered(pi2, f, t);
        ASSERT_TRUE(v.is_exact());
        EXPECT_TRUE(v.exact->is_zero());
    }
}

TEST(JensenAffine, QuadraticFormOnCubicSystem) {
    const auto d = closed(-2, 6);
    const auto m = sqrt2_module(-2, 6);
    GenPolynomial g(m);
    g.set_tensor(2, {Surd(3), Surd(0), Surd(0), Surd(-1)});
    g.set_tensor(1, {Surd(2), Surd(q(1, 3))});
    const Function f = build_jensen_affine(make_polynomial_system(3, d), g);
    const auto pi3 = make_polynomial_system(3, d);
    // brute force over a coordinate lattice: the third difference of the form vanishes
    auto form = [](const std::vector<Q>& c) -> Q { return 3 * c[0] * c[0] - c[1] * c[1] + 2 * c[0] + c[1] / 3; };
    for (long a = 0; a < 3; ++a)
        for (long b = 0; b < 3; ++b)
            for (long ha = 1; ha <= 2; ++ha)
                for (long hb = 0; hb <= 1; ++hb) {
                    std::vector<Q> cx{q(a, 2), q(b, 3)}, ch{q(ha, 4), q(hb, 5)};
                    Q third = 0;
                    const long binom[4] = {-1, 3, -3, 1};
                    std::vector<Scalar> pts;
                    for (int k = 0; k <= 3; ++k) {
                        std::vector<Q> ck{cx[0] + k * ch[0], cx[1] + k * ch[1]};
                        third += binom[k] * form(ck);
                        pts.emplace_back(point(*m, ck).value);
                    }
                    EXPECT_EQ(third, 0);
                    const DetValue v = phi_bordered(pi3, f, SimplexTuple(pts));
                    ASSERT_TRUE(v.is_exact());
                    EXPECT_TRUE(v.exact->is_zero());
                }
}

TEST(JensenAffine, ExponentialWeight) {
    const auto d = closed(0, 4);
    const auto m = sqrt2_module();
    const auto s = make_weighted_system(Function::exponential(Surd(1)), Matrix<Surd>::identity(2), d);
    const Function f = build_jensen_affine(s, GenPolynomial::additive(AdditiveMap(m, {Surd(1), Surd(-2)})));
    CheckOptions opt;
    opt.affine = true;
    opt.keep_records = true;
    const auto c = check_omega_jensen(s, f, SamplingOptions{300, 25, ModuleSource{m}}, opt);
    EXPECT_EQ(c.verdict, Verdict::PassSampled);
    for (const auto& r : c.records) EXPECT_TRUE(r.value.is_exact() && r.value.exact->is_zero());
}

TEST(JensenAffine, DegreeTooHigh) {
    GenPolynomial g(sqrt2_module());
    g.set_tensor(2, {Surd(1), Surd(0), Surd(0), Surd(0)});
    EXPECT_THROW(build_jensen_affine(make_polynomial_system(2, closed(0, 4)), g), std::invalid_argument);
}

TEST(WrightSynthesisTest, SquarePlusAdditive) {
    const auto d = closed(0, 4);
    const auto m = sqrt2_module();
    const auto ext = extend_with_power(make_polynomial_system(2, d));
    const auto syn = synthesize_wright(ext, Function::monomial(2), GenPolynomial::additive(AdditiveMap(m, {Surd(0), Surd(1)})),
                                       SamplingOptions{200, 26});
    EXPECT_EQ(syn.convex_part.verdict, Verdict::PassSampled);
    const auto configs = sample_wright_configs(d, 2, SamplingOptions{200, 27, ModuleSource{m}});
    const auto bar = ext.as_system();
    for (const auto& c : configs.configs) {
        const DetValue with = wright_sum(ext, bar, syn.f, c, Mode::Exact);
        ASSERT_TRUE(with.is_exact());
        // oracle: Delta_{h1} Delta_{h2} x^2 (x) / (h1 h2) = 2
        EXPECT_EQ(with.exact->algebraic(), Surd(2));
    }
    CheckOptions opt;
    opt.source = ModuleSource{m};
    EXPECT_EQ(check_wright(ext, syn.f, configs, opt).verdict, Verdict::PassSampled);
}

TEST(WrightSynthesisTest, ZeroAndComponentParts) {
    const auto d = closed(0, 4);
    const auto m = sqrt2_module();
    const auto ext = extend_with_power(make_polynomial_system(2, d));
    const auto plain = synthesize_wright(ext, Function::monomial(4), GenPolynomial(m), SamplingOptions{100, 28});
    EXPECT_EQ(check_wright(ext, plain.f, SamplingOptions{200, 29}).verdict, Verdict::PassSampled);

    GenPolynomial g(m);
    g.set_constant(Surd(3));
    g.set_tensor(1, {Surd(-1), Surd(5)});
    const auto comp = synthesize_wright(ext, ext.base().component(0), g, SamplingOptions{100, 30});
    const auto bar = ext.as_system();
    for (const auto& c : sample_wright_configs(d, 2, SamplingOptions{100, 31, ModuleSource{m}}).configs) {
        const DetValue v = wright_sum(ext, bar, comp.f, c, Mode::Exact);
        ASSERT_TRUE(v.is_exact());
        EXPECT_TRUE(v.exact->is_zero());
    }
}

TEST(WrightSynthesisTest, Errors) {
    const auto d = closed(0, 4);
    const auto m = sqrt2_module();
    const auto pi2 = make_polynomial_system(2, d);
    const auto ext = extend_with_power(pi2);
    EXPECT_THROW(synthesize_wright(ext, -Function::monomial(2), GenPolynomial(m), SamplingOptions{100, 32}),
                 std::invalid_argument);
    const ExtendedSystem other(pi2, Function::monomial(3));
    EXPECT_THROW(synthesize_wright(other, Function::monomial(2), GenPolynomial(m), SamplingOptions{100, 32}),
                 std::invalid_argument);
}

TEST(Discontinuity, WitnessFromConvergents) {
    const auto m = sqrt2_module();
    const AdditiveMap a(m, {Surd(0), Surd(1)});
    const Surd gap(q(1, 1000000)), jump(1000);
    const auto w = discontinuity_witness(a, point(*m, {1, 0}), gap, jump);
    EXPECT_TRUE(abs(w.p.value - w.q.value) < gap);
    EXPECT_TRUE(abs(eval_additive(a, w.p) - eval_additive(a, w.q)) > jump);
    EXPECT_EQ(w.distance, abs(w.p.value - w.q.value));
    // convergents of sqrt2 solve the Pell equation p^2 - 2 q^2 = +-1
    const mpz_class pell = w.convergent_p * w.convergent_p - 2 * w.convergent_q * w.convergent_q;
    EXPECT_TRUE(pell == 1 || pell == -1);
}

TEST(Discontinuity, Errors) {
    const auto rank1 = std::make_shared<const RationalModule>(std::vector<Surd>{Surd(1)}, closed(0, 1));
    EXPECT_THROW(discontinuity_witness(AdditiveMap(rank1, {Surd(2)}), rank1->point({0}), Surd(1), Surd(1)),
                 std::invalid_argument);
    const auto m = sqrt2_module();
    // A = 3 * identity on the module: continuous
    EXPECT_THROW(discontinuity_witness(AdditiveMap(m, {Surd(3), Surd(3) * Surd::sqrt(2)}), point(*m, {0, 0}), Surd(1), Surd(1)),
                 std::invalid_argument);
}
