#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace chebyconvex;
using oracle::q;
using oracle::Q;

namespace {

Interval closed(long lo, long hi) { return Interval(Scalar(lo), Scalar(hi)); }

Q exact_eval(const Function& f, const Q& x) { return f.eval_exact(Scalar(x)).algebraic().rational(); }

} // namespace

TEST(PolynomialSystem, ComponentsArePowers) {
    const auto s = make_polynomial_system(2, closed(0, 10));
    ASSERT_EQ(s.dim(), 2u);
    for (long x : {0L, 3L, 7L}) {
        EXPECT_EQ(exact_eval(s.component(0), x), 1);
        EXPECT_EQ(exact_eval(s.component(1), x), x);
    }
    ASSERT_TRUE(s.factorized());
    EXPECT_EQ(det_exact(s.factorization().coeff).rational(), 1);
}

TEST(PolynomialSystem, ThreeDimensionalPhiAtZeroOneTwo) {
    const auto s = make_polynomial_system(3, closed(0, 4));
    const Q expected = oracle::laplace({{1, 1, 1}, {0, 1, 2}, {0, 1, 4}});
    EXPECT_EQ(oracle::rational(phi_system(s, oracle::tuple({0, 1, 2}))), expected);
    EXPECT_EQ(expected, 2);
}

TEST(PolynomialSystem, OneDimensionalPhiIsOne) {
    const auto s = make_polynomial_system(1, closed(-5, 5));
    for (long x : {-5L, 0L, 4L}) EXPECT_EQ(oracle::rational(phi_system(s, oracle::tuple({x}))), 1);
}

TEST(PolynomialSystem, RejectsDimensionZero) {
    EXPECT_THROW(make_polynomial_system(0, closed(0, 1)), std::invalid_argument);
}

TEST(IntervalTest, RejectsEmptyAndHonoursOpenEnds) {
    EXPECT_THROW(Interval(Scalar(1), Scalar(1)), std::invalid_argument);
    const Interval open(Scalar(0), Scalar(1), true, false);
    EXPECT_FALSE(open.contains(Scalar(0)));
    EXPECT_TRUE(open.contains(Scalar(1)));
    EXPECT_TRUE(open.contains(Scalar(q(1, 2))));
}

TEST(WeightedSystem, ExponentialWeightWithIdentity) {
    const auto s = make_weighted_system(Function::exponential(Surd(1)), Matrix<Surd>::identity(2), closed(0, 2));
    EXPECT_NEAR(s.component(0).eval_float(Scalar(1)), std::exp(1.0), 1e-14);
    EXPECT_NEAR(s.component(1).eval_float(Scalar(2)), 2 * std::exp(2.0), 1e-13);
    const ExactValue v = s.component(1).eval_exact(Scalar(3));
    EXPECT_EQ(v.coef().rational(), 3);
    EXPECT_EQ(v.exponent().rational(), 3);
}

TEST(WeightedSystem, UnitWeightIdentityGivesPolynomialSystem) {
    const auto s = make_weighted_system(Function::constant(Scalar(1)), Matrix<Surd>::identity(3), closed(0, 3));
    const auto p = make_polynomial_system(3, closed(0, 3));
    for (long x : {0L, 1L, 2L, 3L})
        for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(exact_eval(s.component(i), x), exact_eval(p.component(i), x));
}

TEST(WeightedSystem, RejectsSwapMatrix) {
    const Matrix<Surd> swap{{Surd(0), Surd(1)}, {Surd(1), Surd(0)}};
    EXPECT_EQ(det_exact(swap).rational(), -1);
    EXPECT_THROW(make_weighted_system(Function::constant(Scalar(1)), swap, closed(0, 1)), std::invalid_argument);
}

TEST(WeightedSystem, RejectsNonSquareMatrixAndNonPositiveWeight) {
    const Matrix<Surd> wide{{Surd(1), Surd(0), Surd(0)}, {Surd(0), Surd(1), Surd(0)}};
    EXPECT_THROW(make_weighted_system(Function::constant(Scalar(1)), wide, closed(0, 1)), std::invalid_argument);
    EXPECT_THROW(make_weighted_system(Function::identity(), Matrix<Surd>::identity(2), closed(-1, 1)),
                 std::invalid_argument);
}

TEST(WeightedSystem, RowsFollowTheCoefficientMatrix) {
    // omega_1 = (2 + 3t) e^{t/2}, omega_2 = (-1 + t) e^{t/2}
    const Matrix<Surd> m{{Surd(2), Surd(3)}, {Surd(-1), Surd(1)}};
    const auto s = make_weighted_system(Function::exponential(Surd(q(1, 2))), m, closed(0, 4));
    const ExactValue v0 = s.component(0).eval_exact(Scalar(2));
    const ExactValue v1 = s.component(1).eval_exact(Scalar(2));
    EXPECT_EQ(v0.coef().rational(), 8);
    EXPECT_EQ(v0.exponent().rational(), 1);
    EXPECT_EQ(v1.coef().rational(), 1);
}

TEST(Extension, PowerExtensionOfPolynomialSystem) {
    const auto ext = extend_with_power(make_polynomial_system(2, closed(0, 4)));
    EXPECT_TRUE(ext.is_power_extension());
    const auto bar = ext.as_system();
    ASSERT_EQ(bar.dim(), 3u);
    for (long x : {0L, 2L, 3L}) EXPECT_EQ(exact_eval(bar.component(2), x), x * x);
}

TEST(Extension, PowerExtensionOfExponentialSystem) {
    const auto s = make_weighted_system(Function::exponential(Surd(1)), Matrix<Surd>::identity(2), closed(0, 2));
    const auto bar = extend_with_power(s).as_system();
    const ExactValue v = bar.component(2).eval_exact(Scalar(3));
    EXPECT_EQ(v.coef().rational(), 9);
    EXPECT_EQ(v.exponent().rational(), 3);
    EXPECT_EQ(det_exact(bar.factorization().coeff).rational(), 1);
}

TEST(Extension, FourDimensionalVandermonde) {
    const auto bar = extend_with_power(make_polynomial_system(3, closed(0, 3))).as_system();
    EXPECT_EQ(oracle::rational(phi_system(bar, oracle::tuple({0, 1, 2, 3}))), oracle::vandermonde({0, 1, 2, 3}));
    EXPECT_EQ(oracle::vandermonde({0, 1, 2, 3}), 12);
}

TEST(Extension, RequiresFactorizedSystem) {
    const ChebSystem plain({Function::constant(Scalar(1)), Function::identity()}, closed(0, 1));
    EXPECT_THROW(extend_with_power(plain), std::invalid_argument);
}

TEST(Positivity, CubicPolynomialSystemIsPositive) {
    const auto c = is_positive_chebyshev(make_polynomial_system(3, closed(0, 4)), SamplingOptions{1000, 11});
    EXPECT_EQ(c.verdict, Verdict::PositiveSampled);
    EXPECT_EQ(c.samples, 1000u);
    EXPECT_TRUE(c.witnesses.empty());
    EXPECT_EQ(c.seed, std::optional<std::uint64_t>(11));
}

TEST(Positivity, SwappedRowsAreRefuted) {
    const ChebSystem swapped({Function::identity(), Function::constant(Scalar(1))}, closed(0, 1));
    const auto c = is_positive_chebyshev(swapped, SamplingOptions{200, 3});
    ASSERT_EQ(c.verdict, Verdict::Refuted);
    ASSERT_FALSE(c.witnesses.empty());
    for (const auto& w : c.witnesses) {
        const Q x1 = w.points[0].exact().rational(), x2 = w.points[1].exact().rational();
        EXPECT_EQ(oracle::rational(w.value), x1 - x2);
        EXPECT_LT(oracle::rational(w.value), 0);
    }
}

TEST(Positivity, ConstantOneDimensionalSystem) {
    const ChebSystem one({Function::constant(Scalar(1))}, closed(0, 1));
    EXPECT_EQ(is_positive_chebyshev(one, SamplingOptions{50, 1}).verdict, Verdict::PositiveSampled);
}

TEST(Positivity, PowerExtensionsArePositive) {
    const std::vector<ChebSystem> bases{
        make_polynomial_system(2, closed(-2, 3)),
        make_weighted_system(Function::exponential(Surd(1)), Matrix<Surd>::identity(2), closed(0, 2)),
        make_weighted_system(Function::exponential(Surd(-2)),
                             Matrix<Surd>{{Surd(1), Surd(1), Surd(0)}, {Surd(0), Surd(2), Surd(1)}, {Surd(0), Surd(0), Surd(3)}},
                             closed(-1, 1)),
    };
    for (const auto& b : bases)
        for (Mode mode : {Mode::Exact, Mode::Float}) {
            CheckOptions opt;
            opt.mode = mode;
            const auto src = mode == Mode::Exact ? PointSource(RationalSource{}) : PointSource(RealSource{});
            const auto c = is_positive_chebyshev(extend_with_power(b).as_system(), SamplingOptions{300, 5, src}, opt);
            EXPECT_EQ(c.verdict, Verdict::PositiveSampled);
        }
}

TEST(Positivity, TooFewTabulatedPointsIsAnError) {
    const ChebSystem s({Function::constant(Scalar(1)), Function::identity()}, closed(0, 1));
    EXPECT_THROW(is_positive_chebyshev(s, SamplingOptions{10, 0, DiscreteSource{{Scalar(0)}}}), std::invalid_argument);
    EXPECT_THROW(is_positive_chebyshev(s, SamplingOptions{0, 0}), std::invalid_argument);
}

TEST(Positivity, TabulatedSystemUsesItsAbscissae) {
    std::vector<std::pair<Scalar, Scalar>> ones, xs;
    for (long k = 0; k <= 4; ++k) {
        ones.emplace_back(Scalar(k), Scalar(1));
        xs.emplace_back(Scalar(k), Scalar(k * k));
    }
    const ChebSystem s({Function::tabulated(ones), Function::tabulated(xs)}, closed(0, 4));
    const auto src = finite_support(s, nullptr);
    ASSERT_TRUE(src);
    EXPECT_EQ(src->size(), 5u);
    const auto c = is_positive_chebyshev(s, SamplingOptions{100, 2, DiscreteSource{*src}});
    EXPECT_EQ(c.verdict, Verdict::PositiveSampled);
    EXPECT_THROW(s.component(0).eval_float(Scalar(q(1, 2))), EvaluationError);
}
