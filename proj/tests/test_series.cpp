#include <random>

#include <gtest/gtest.h>

#include <equideform/series.hpp>

using namespace equideform;

namespace {

Series S(u64 p, std::vector<i64> c, int n) { return Series(p, c, n); }

Series random_series(std::mt19937_64& rng, u64 p, int n, int min_val = 0) {
    std::vector<i64> c(static_cast<std::size_t>(n), 0);
    std::uniform_int_distribution<i64> d(0, static_cast<i64>(p) - 1);
    for (int i = min_val; i < n; ++i) c[static_cast<std::size_t>(i)] = d(rng);
    return Series(p, c, n);
}

} // namespace

TEST(Fp, ScalarArithmetic) {
    FpScalar a(2, 3), b(2, 3);
    EXPECT_EQ((a + b).value(), 1u);
    EXPECT_EQ((a * b).value(), 1u);
    EXPECT_EQ((a / b).value(), 1u);
    EXPECT_THROW(FpScalar(1, 4), HypothesisError);
    EXPECT_THROW(FpScalar(0, 5).inverse(), HypothesisError);
    EXPECT_THROW(FpScalar(1, 3) + FpScalar(1, 5), ModulusMismatch);
    EXPECT_NO_THROW(FpScalar(1, 2147483647));
}

TEST(Fp, Roots) {
    EXPECT_EQ(fp::root(2, 2, 3), std::nullopt);
    EXPECT_EQ(fp::root(1, 2, 3), std::optional<u64>(1));
    EXPECT_EQ(fp::root(4, 2, 5), std::optional<u64>(2));
    EXPECT_EQ(fp::root(3, 3, 5), std::optional<u64>(2));
}

TEST(Series, AddExamples) {
    EXPECT_EQ(add(S(3, {1, 1}, 2), S(3, {1, 2}, 2)).to_ints(), (std::vector<i64>{2, 0}));
    const Series s = S(3, {1, 2, 0, 1}, 4);
    EXPECT_TRUE(agree(add(s, Series::zero(3, 4)), s));
    EXPECT_TRUE(add(S(3, {0, 0, 1}, 4), S(3, {0, 0, 2}, 4)).is_zero_to_precision());
    EXPECT_EQ(add(S(3, {1}, 5), S(3, {1}, 3)).precision(), 3);
    EXPECT_THROW(add(S(3, {1}, 2), S(5, {1}, 2)), ModulusMismatch);
}

TEST(Series, InverseAndProduct) {
    EXPECT_EQ(inverse(S(3, {1, 1}, 4)).to_ints(), (std::vector<i64>{1, 2, 1, 2}));
    EXPECT_EQ(mul(S(3, {0, 1}, 5), S(3, {0, 1}, 5)).to_ints()[2], 1);
    EXPECT_THROW(inverse(S(3, {0, 1}, 4)), HypothesisError);
    const Series a = S(5, {3, 1, 4, 1, 0, 2}, 6);
    EXPECT_TRUE(agree(mul(a, inverse(a)), Series::constant(5, 1, 6)));
}

TEST(Series, MulPrecisionRule) {
    // x^2 known to 4, times (1 + x) known to 3: meaningful to min(4+0, 3+2) = 4.
    EXPECT_EQ(mul(S(3, {0, 0, 1}, 4), S(3, {1, 1}, 3)).precision(), 4);
    EXPECT_EQ(mul(S(3, {0, 0, 1}, 10), S(3, {1, 1}, 3)).precision(), 5);
}

TEST(Series, ComposeExamples) {
    EXPECT_EQ(compose(S(3, {0, 0, 1}, 4), S(3, {0, 1, 1}, 4)).to_ints(), (std::vector<i64>{0, 0, 1, 2}));
    const Series f = S(3, {2, 1, 0, 2}, 4);
    const Series g = S(3, {0, 1, 2, 1}, 4);
    EXPECT_TRUE(agree(compose(f, Series::variable(3, 4)), f));
    EXPECT_TRUE(agree(compose(Series::variable(3, 4), g), g));
    EXPECT_THROW(compose(f, S(3, {1, 1}, 4)), HypothesisError);
}

TEST(Series, ComposePrecisionWithHighValuation) {
    // f known to 3, g of valuation 2 known to 10: f(g) known to 6.
    EXPECT_EQ(compose(S(3, {1, 1, 1}, 3), S(3, {0, 0, 1}, 10)).precision(), 6);
}

TEST(Series, DerivativeAndValuation) {
    EXPECT_TRUE(derivative(S(3, {0, 0, 0, 1}, 5)).is_zero_to_precision());
    EXPECT_EQ(derivative(S(3, {0, 0, 0, 1}, 5)).precision(), 4);
    EXPECT_EQ(S(3, {0, 0, 1, 0, 0, 1}, 6).valuation(), Valuation::finite(2));
    const Valuation z = Series::zero(3, 10).valuation();
    EXPECT_TRUE(z.is_zero_to_precision());
    EXPECT_EQ(z.precision(), 10);
    EXPECT_THROW((void)z.value(), PrecisionError);
    EXPECT_EQ(z.to_string(), "zero-at-precision-10");
}

TEST(Series, NthRoot) {
    EXPECT_EQ(nth_root(S(3, {1, 1}, 3), 2).to_ints(), (std::vector<i64>{1, 2, 1}));
    const Series u = S(5, {1, 3, 0, 2}, 6);
    EXPECT_TRUE(agree(nth_root(u, 1), u));
    EXPECT_TRUE(agree(nth_root(mul(S(3, {1, 1}, 6), S(3, {1, 1}, 6)), 2), S(3, {1, 1}, 6)));
    EXPECT_THROW(nth_root(S(3, {1, 1}, 3), 3), HypothesisError);
    EXPECT_THROW(nth_root(S(3, {2, 1}, 3), 2), HypothesisError);
}

TEST(Series, RationalPower) {
    EXPECT_TRUE(agree(rational_power(S(3, {1, 1}, 5), 1, 2), nth_root(S(3, {1, 1}, 5), 2)));
    EXPECT_EQ(rational_power(S(3, {1, 1}, 3), 2, 1).to_ints(), (std::vector<i64>{1, 2, 1}));
    EXPECT_THROW(rational_power(S(3, {-1, 0, 1}, 5), 1, 2), HypothesisError);
    // 4 = 2^2 in F_5: result^2 = u.
    const Series u = S(5, {4, 1, 3}, 6);
    const Series r = rational_power(u, 1, 2);
    EXPECT_TRUE(agree(mul(r, r), u));
    const Series r3 = rational_power(u, -3, 2);
    EXPECT_TRUE(agree(power(r3, 2), power(u, -3)));
}

TEST(Series, Reversion) {
    EXPECT_TRUE(agree(reversion(Series::variable(3, 6)), Series::variable(3, 6)));
    EXPECT_EQ(reversion(S(3, {0, 1, 1}, 4)).to_ints(), (std::vector<i64>{0, 1, 2, 2}));
    const Series s = S(7, {0, 3, 5, 1, 0, 6, 2}, 7);
    EXPECT_TRUE(agree(compose(s, reversion(s)), Series::variable(7, 7)));
    EXPECT_THROW(reversion(S(3, {0, 0, 1}, 4)), HypothesisError);
}

TEST(Series, ExpandInParameter) {
    // F = w^2 + 2 w^3 with w = x^2 + x^3.
    const u64 p = 5;
    const Series w = S(p, {0, 0, 1, 1}, 20);
    const Series F = add(power(w, 2), scale(power(w, 3), 2));
    const Series R = expand_in_parameter(F, w);
    EXPECT_EQ(R.precision(), 10);
    EXPECT_EQ(R.to_ints(), (std::vector<i64>{0, 0, 1, 2, 0, 0, 0, 0, 0, 0}));
    EXPECT_THROW(expand_in_parameter(S(p, {0, 1}, 20), w), InternalError);
}

TEST(SeriesProperties, RingAxioms) {
    std::mt19937_64 rng(20241);
    for (u64 p : {2u, 3u, 5u, 7u, 2147483647u}) {
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 12;
            const Series a = random_series(rng, p, n), b = random_series(rng, p, n), c = random_series(rng, p, n);
            EXPECT_TRUE(agree(mul(mul(a, b), c), mul(a, mul(b, c))));
            EXPECT_TRUE(agree(mul(a, add(b, c)), add(mul(a, b), mul(a, c))));
            EXPECT_TRUE(agree(mul(a, b), mul(b, a)));
            EXPECT_TRUE(agree(add(a, negate(a)), Series::zero(p, n)));
        }
    }
}

TEST(SeriesProperties, ComposeAssociative) {
    std::mt19937_64 rng(7);
    for (u64 p : {2u, 3u, 5u}) {
        for (int trial = 0; trial < 20; ++trial) {
            const Series f = random_series(rng, p, 10);
            const Series g = random_series(rng, p, 10, 1);
            const Series h = random_series(rng, p, 10, 1);
            EXPECT_TRUE(agree(compose(compose(f, g), h), compose(f, compose(g, h))));
        }
    }
}

TEST(SeriesProperties, RootsAndReversionRoundTrip) {
    std::mt19937_64 rng(99);
    for (u64 p : {3u, 5u, 7u}) {
        for (int trial = 0; trial < 20; ++trial) {
            Series u = random_series(rng, p, 15, 1);
            u = add(u, Series::constant(p, 1, 15));
            for (i64 m : {1, 2, 4}) {
                if (static_cast<u64>(m) % p == 0) continue;
                EXPECT_TRUE(agree(power(nth_root(u, m), m), u));
            }
            Series s = random_series(rng, p, 15, 2);
            s = add(s, Series::monomial(p, 1 + static_cast<i64>(trial % (p - 1)), 1, 15));
            const Series r = reversion(s);
            EXPECT_TRUE(agree(compose(s, r), Series::variable(p, 15)));
            EXPECT_TRUE(agree(compose(r, s), Series::variable(p, 15)));
        }
    }
}

TEST(SeriesProperties, DerivativeIsDerivation) {
    std::mt19937_64 rng(3);
    for (u64 p : {2u, 3u, 5u}) {
        for (int trial = 0; trial < 20; ++trial) {
            const Series f = random_series(rng, p, 12), g = random_series(rng, p, 12);
            const Series lhs = derivative(mul(f, g));
            const Series rhs = add(mul(derivative(f), g), mul(f, derivative(g)));
            EXPECT_TRUE(agree(lhs, rhs));
            EXPECT_GE(lhs.precision(), 11);
        }
        EXPECT_TRUE(derivative(Series::monomial(p, 1, static_cast<int>(p), 20)).is_zero_to_precision());
    }
}
