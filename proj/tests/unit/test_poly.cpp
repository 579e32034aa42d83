#include <gtest/gtest.h>

#include "avdiv/poly.hpp"

using namespace avdiv;

TEST(PolyQTest, ArithmeticAndDivision) {
    PolyQ f{-9, 8, 1};  // x^2 + 8x - 9
    PolyQ g{0, 1};
    PolyQ h = f * g;
    EXPECT_EQ(h, (PolyQ{0, -9, 8, 1}));
    auto [q, r] = divmod(h, f);
    EXPECT_EQ(q, g);
    EXPECT_TRUE(r.is_zero());
    EXPECT_EQ(exact_div(h, g), f);
    EXPECT_THROW(exact_div(h, PolyQ{1, 1}), Error);
    EXPECT_EQ(gcd(h, PolyQ{0, 0, 1}), PolyQ::x());
    EXPECT_EQ(h(Rational(1)), 0);
    EXPECT_EQ(h.derivative(), (PolyQ{-9, 16, 3}));
}

TEST(PolyQTest, RationalRoots) {
    PolyQ f = PolyQ::from_roots({Rational(0), Rational(1), Rational(-9), Rational(25, 16), Rational(-3, 7)});
    auto roots = rational_roots(f * PolyQ{1, 0, 1} * f);
    std::vector<Rational> expect{Rational(-9), Rational(-3, 7), Rational(0), Rational(1), Rational(25, 16)};
    EXPECT_EQ(roots, expect);
    EXPECT_TRUE(rational_roots(PolyQ{2, 0, 1}).empty());
    EXPECT_TRUE(rational_roots(PolyQ{5}).empty());
}

TEST(PolyQTest, TracesOverRoots) {
    PolyQ d = PolyQ::from_roots({Rational(2), Rational(3), Rational(-7)});
    // sum of theta^2 + 1
    EXPECT_EQ(trace_over_roots(PolyQ{1, 0, 1}, d), Rational(4 + 9 + 49 + 3));
    // sum of 1 / (5 - theta)
    PolyQ inv = inverse_of_shift(Rational(5), d);
    EXPECT_EQ(trace_over_roots(inv, d), Rational(1, 3) + Rational(1, 2) + Rational(1, 12));
    // irreducible modulus: x^2 + 9, roots +-3i; sum 1/(1 - theta) = 2/10
    EXPECT_EQ(trace_over_roots(inverse_of_shift(Rational(1), PolyQ{9, 0, 1}), PolyQ{9, 0, 1}), Rational(1, 5));
}

TEST(PolyQTest, RationalReconstruction) {
    Integer m("1000000007");
    Rational v(-22, 7);
    Integer inv7;
    Integer seven(7);
    mpz_invert(inv7.get_mpz_t(), seven.get_mpz_t(), m.get_mpz_t());
    Integer r = (Integer(-22) * inv7) % m;
    if (r < 0) r += m;
    auto back = rational_reconstruct(r, m);
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, v);
}

TEST(PolyModPTest, RootsAndGcd) {
    PolyQ f = PolyQ::from_roots({Rational(0), Rational(1), Rational(-9)});
    auto roots = roots_mod(reduce_mod(f, 7), 7);
    EXPECT_EQ(roots, (std::vector<std::uint64_t>{0, 1, 5}));
    EXPECT_EQ(gcd_degree_mod(reduce_mod(f, 7), reduce_mod(PolyQ{-1, 1}, 7), 7), 1);
}
