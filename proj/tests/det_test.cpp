#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace chebyconvex;
using oracle::q;
using oracle::Q;

namespace {

Interval closed(long lo, long hi) { return Interval(Scalar(lo), Scalar(hi)); }

Matrix<Surd> to_matrix(const std::vector<std::vector<Q>>& a) {
    Matrix<Surd> m(a.size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) m(i, j) = Surd(a[i][j]);
    return m;
}

std::vector<std::vector<Q>> random_matrix(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::vector<Q>> a(n, std::vector<Q>(n));
    for (auto& row : a)
        for (auto& v : row) v = oracle::random_rational(rng, 5, 7);
    return a;
}

} // namespace

TEST(PhiSystem, PolynomialExamples) {
    EXPECT_EQ(oracle::rational(phi_system(make_polynomial_system(2, closed(0, 4)), oracle::tuple({0, 1}))), 1);
    EXPECT_EQ(oracle::rational(phi_system(make_polynomial_system(3, closed(0, 4)), oracle::tuple({0, 1, 2}))), 2);
}

TEST(PhiSystem, ExponentialSystemAtZeroOne) {
    const auto s = make_weighted_system(Function::exponential(Surd(1)), Matrix<Surd>::identity(2), closed(0, 2));
    const DetValue exact = phi_system(s, oracle::tuple({0, 1}));
    ASSERT_TRUE(exact.is_exact());
    EXPECT_EQ(exact.exact->coef().rational(), 1);
    EXPECT_EQ(exact.exact->exponent().rational(), 1);
    EXPECT_NEAR(exact.value, std::exp(1.0), 1e-15);
    const DetValue fl = phi_system(s, oracle::tuple({0, 1}), Mode::Float);
    EXPECT_FALSE(fl.is_exact());
    EXPECT_NEAR(fl.value, 2.718281828, 1e-9);
    EXPECT_LE(std::abs(fl.value - std::exp(1.0)), fl.abs_error_bound + 1e-15);
}

TEST(PhiBordered, Examples) {
    const auto pi2 = make_polynomial_system(2, closed(-1, 4));
    EXPECT_EQ(oracle::rational(phi_bordered(pi2, Function::monomial(2), oracle::tuple({0, 1, 2}))), 2);
    EXPECT_EQ(oracle::rational(phi_bordered(pi2, abs(Function::identity()), oracle::tuple({-1, 0, 1}))),
              oracle::laplace({{1, 1, 1}, {-1, 0, 1}, {1, 0, 1}}));
    EXPECT_EQ(oracle::rational(phi_bordered(pi2, abs(Function::identity()), oracle::tuple({-1, 0, 1}))), 2);
}

TEST(PhiBordered, FirstComponentGivesZero) {
    std::mt19937_64 rng(1);
    const auto e = make_weighted_system(Function::exponential(Surd(2)),
                                        Matrix<Surd>{{Surd(1), Surd(2)}, {Surd(0), Surd(3)}}, closed(-3, 3));
    for (int k = 0; k < 50; ++k) {
        const auto t = oracle::tuple(oracle::random_tuple(rng, 3, -3, 3, 11));
        EXPECT_TRUE(phi_bordered(e, e.component(0), t).zero());
        const DetValue fl = phi_bordered(e, e.component(0), t, Mode::Float);
        EXPECT_TRUE(fl.zero()) << fl.value << " bound " << fl.abs_error_bound;
    }
}

TEST(PhiBordered, ArityAndOrderErrors) {
    const auto pi2 = make_polynomial_system(2, closed(0, 4));
    EXPECT_THROW(phi_system(pi2, oracle::tuple({0, 1, 2})), std::invalid_argument);
    EXPECT_THROW(phi_bordered(pi2, Function::identity(), oracle::tuple({0, 1})), std::invalid_argument);
    EXPECT_THROW(SimplexTuple({Scalar(1), Scalar(0)}), std::invalid_argument);
    EXPECT_THROW(SimplexTuple({Scalar(1), Scalar(1)}), std::invalid_argument);
}

TEST(PhiBordered, TabulatedOffGridFails) {
    const auto pi1 = make_polynomial_system(1, closed(0, 2));
    const Function t = Function::tabulated({{Scalar(0), Scalar(0)}, {Scalar(1), Scalar(1)}, {Scalar(2), Scalar(4)}});
    EXPECT_EQ(oracle::rational(phi_bordered(pi1, t, oracle::tuple({0, 2}))), 4);
    EXPECT_THROW(phi_bordered(pi1, t, oracle::tuple({0, q(1, 2)})), EvaluationError);
}

TEST(DetExact, SmallExamples) {
    EXPECT_EQ(det_exact(Matrix<Surd>::identity(3)).rational(), 1);
    EXPECT_EQ(det_exact(Matrix<Surd>{{Surd(0), Surd(1)}, {Surd(1), Surd(0)}}).rational(), -1);
    std::vector<std::vector<Q>> v(4, std::vector<Q>(4));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v[i][j] = oracle::power(j, i);
    EXPECT_EQ(det_exact(to_matrix(v)).rational(), 12);
}

TEST(DetExact, MatchesCofactorExpansion) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_matrix(rng, 1 + trial % 5);
        EXPECT_EQ(det_exact(to_matrix(a)).rational(), oracle::laplace(a));
    }
}

TEST(DetExact, SurdEntries) {
    // det [[1, sqrt2], [sqrt2, 3]] = 1
    const Matrix<Surd> m{{Surd(1), Surd::sqrt(2)}, {Surd::sqrt(2), Surd(3)}};
    EXPECT_EQ(det_exact(m), Surd(1));
    const Matrix<Surd> n{{Surd::sqrt(2), Surd::sqrt(3)}, {Surd(1), Surd(1)}};
    EXPECT_EQ(det_exact(n), Surd::sqrt(2) - Surd::sqrt(3));
}

TEST(DetExact, ColumnSwapNegates) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 4;
        auto m = to_matrix(random_matrix(rng, n));
        const Surd before = det_exact(m);
        std::uniform_int_distribution<std::size_t> col(0, n - 1);
        std::size_t a = col(rng), b = col(rng);
        if (a == b) b = (a + 1) % n;
        m.swap_cols(a, b);
        EXPECT_EQ(det_exact(m), -before);
    }
}

TEST(DetFloat, SmallExamples) {
    const DetValue id = det_float(Matrix<double>::identity(2));
    EXPECT_EQ(id.value, 1.0);
    EXPECT_LT(id.abs_error_bound, 1e-14);
    Matrix<double> h(3, 3);
    std::vector<std::vector<Q>> hq(3, std::vector<Q>(3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            hq[i][j] = q(1, i + j + 1);
            h(i, j) = hq[i][j].get_d();
        }
    const Q exact = oracle::laplace(hq);
    EXPECT_EQ(exact, q(1, 2160));
    const DetValue hv = det_float(h);
    EXPECT_NEAR(hv.value, 4.6296e-4, 1e-8);
    EXPECT_LE(std::abs(hv.value - exact.get_d()), hv.abs_error_bound);
    EXPECT_TRUE(hv.positive());
    const DetValue singular = det_float(Matrix<double>{{1.0, 1.0}, {1.0, 1.0}});
    EXPECT_TRUE(singular.zero());
    EXPECT_FALSE(singular.sign_definite());
}

TEST(DetFloat, RejectsNonFinite) {
    EXPECT_THROW(det_float(Matrix<double>{{1.0, NAN}, {0.0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(det_float(Matrix<double>{{1.0, INFINITY}, {0.0, 1.0}}), std::invalid_argument);
}

TEST(DetFloat, AgreesWithExactEngineWithinBound) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const auto a = random_matrix(rng, n);
        Matrix<double> m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = a[i][j].get_d();
        const DetValue f = det_float(m);
        const Q e = det_exact(to_matrix(a)).rational();
        EXPECT_LE(std::abs(f.value - e.get_d()), f.abs_error_bound) << "n=" << n;
        if (f.sign_definite()) EXPECT_EQ(f.value > 0, e > 0);
    }
}

TEST(DetFloat, NearlySingularVandermondeIsNotMisjudged) {
    // points 1e-9 apart: the float sign must be either right or indeterminate
    const auto pi3 = make_polynomial_system(3, closed(0, 1));
    const SimplexTuple t({Scalar::real(0.5), Scalar::real(0.5 + 1e-9), Scalar::real(0.5 + 2e-9)});
    const DetValue v = phi_system(pi3, t, Mode::Float);
    EXPECT_FALSE(v.negative());
}

TEST(PhiProperties, VandermondeProduct) {
    std::mt19937_64 rng(5);
    for (std::size_t n = 1; n <= 5; ++n) {
        const auto s = make_polynomial_system(n, closed(-4, 4));
        for (int k = 0; k < 40; ++k) {
            const auto x = oracle::random_tuple(rng, n, -4, 4, 9);
            EXPECT_EQ(oracle::rational(phi_system(s, oracle::tuple(x))), oracle::vandermonde(x));
        }
    }
}

TEST(PhiProperties, LinearInTheBorderRow) {
    std::mt19937_64 rng(6);
    const auto s = make_polynomial_system(3, closed(-2, 2));
    const Function f = Function::monomial(4) - Function::monomial(3);
    const Function g = abs(Function::identity()) * Function::monomial(2);
    for (int k = 0; k < 100; ++k) {
        const Q a = oracle::random_rational(rng, 3, 5), b = oracle::random_rational(rng, 3, 5);
        const auto t = oracle::tuple(oracle::random_tuple(rng, 4, -2, 2, 13));
        const Function h = Scalar(a) * f + Scalar(b) * g;
        EXPECT_EQ(oracle::rational(phi_bordered(s, h, t)),
                  a * oracle::rational(phi_bordered(s, f, t)) + b * oracle::rational(phi_bordered(s, g, t)));
    }
}

TEST(PhiProperties, SpanMembersGiveZero) {
    std::mt19937_64 rng(7);
    const auto s = make_weighted_system(Function::exponential(Surd(q(1, 3))),
                                        Matrix<Surd>{{Surd(1), Surd(1)}, {Surd(-1), Surd(2)}}, closed(-2, 2));
    for (int k = 0; k < 100; ++k) {
        const Q a = oracle::random_rational(rng, 4, 6), b = oracle::random_rational(rng, 4, 6);
        const Function f = Scalar(a) * s.component(0) + Scalar(b) * s.component(1);
        const auto t = oracle::tuple(oracle::random_tuple(rng, 3, -2, 2, 17));
        const DetValue v = phi_bordered(s, f, t);
        ASSERT_TRUE(v.is_exact());
        EXPECT_TRUE(v.exact->is_zero());
    }
}

TEST(PhiProperties, IrrationalPointsStayExact) {
    // pi_2 at (0, sqrt2, 1 + sqrt2) bordered by x^2: (x1-x0)(x2-x0)(x2-x1)
    const auto pi2 = make_polynomial_system(2, closed(0, 3));
    const Surd r2 = Surd::sqrt(2);
    const SimplexTuple t({Scalar(0), Scalar(r2), Scalar(Surd(1) + r2)});
    const DetValue v = phi_bordered(pi2, Function::monomial(2), t);
    ASSERT_TRUE(v.is_exact());
    EXPECT_EQ(v.exact->algebraic(), r2 * (Surd(1) + r2) * Surd(1));
}
