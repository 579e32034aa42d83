#include <gtest/gtest.h>

#include <random>

#include "avdiv/curve_q.hpp"

using namespace avdiv;

namespace {

CurveQ ex31_curve() { return CurveQ(0, 8, 0, -9, 0); }      // y^2 = x(x-1)(x+9)
CurveQ ex35_curve() { return CurveQ(0, 0, 0, -21, -20); }   // y^2 = x^3 - 21x - 20
CurveQ e0_curve() { return CurveQ(0, 8, 0, 36, 288); }      // y^2 = x^3 + 8x^2 + 36x + 288
CurveQ long_curve() { return CurveQ(1, -1, 1, 0, 0); }      // y^2 + xy + y = x^3 - x^2, rank one at (0,0)

PointQ pt(long x, long y) { return PointQ::affine(x, y); }

}  // namespace

TEST(CurveQTest, RejectsSingular) { EXPECT_THROW(CurveQ(0, 0, 0, 0, 0), Error); }

TEST(CurveQTest, Discriminants) {
    EXPECT_EQ(ex31_curve().discriminant(), 129600);
    EXPECT_EQ(ex35_curve().discriminant(), 419904);
    EXPECT_EQ(e0_curve().discriminant(), -23040000);
}

TEST(GroupLaw, Examples) {
    const CurveQ E = ex31_curve();
    const PointQ Q1 = pt(9, -36);
    EXPECT_EQ(add(E, Q1, PointQ::infinity()), Q1);
    EXPECT_EQ(add(E, Q1, Q1), PointQ::affine(Rational(25, 16), Rational(-195, 64)));
    EXPECT_EQ(scalar_mul(E, 2, Q1), PointQ::affine(Rational(25, 16), Rational(-195, 64)));
    const CurveQ F = ex35_curve();
    EXPECT_EQ(add(F, pt(-1, 0), pt(5, 0)), pt(-4, 0));
    EXPECT_THROW(add(F, pt(1, 1), pt(-1, 0)), Error);
    EXPECT_EQ(scalar_mul(E, 1, Q1), Q1);
    EXPECT_EQ(scalar_mul(E, 0, Q1), PointQ::infinity());
}

TEST(GroupLaw, AssociativityAndCommutativityFuzz) {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> k(-6, 6);
    struct Seed {
        CurveQ E;
        std::vector<PointQ> gens;
    };
    std::vector<Seed> seeds{{ex31_curve(), {pt(9, -36), pt(0, 0)}},
                            {ex35_curve(), {pt(-3, 4), pt(-1, 0), pt(5, 0)}},
                            {long_curve(), {}}};
    // find a point on the long curve by search
    for (long x = -10; x <= 10 && seeds[2].gens.empty(); ++x)
        for (const auto& P : points_with_x(seeds[2].E, x)) seeds[2].gens.push_back(P);
    ASSERT_FALSE(seeds[2].gens.empty());
    int triples = 0;
    for (int i = 0; triples < 200; ++i) {
        const Seed& s = seeds[i % seeds.size()];
        auto random_point = [&] {
            PointQ acc = PointQ::infinity();
            for (const auto& g : s.gens) acc = add(s.E, acc, scalar_mul(s.E, k(rng), g));
            return acc;
        };
        PointQ A = random_point(), B = random_point(), C = random_point();
        ASSERT_EQ(add(s.E, add(s.E, A, B), C), add(s.E, A, add(s.E, B, C)));
        ASSERT_EQ(add(s.E, A, B), add(s.E, B, A));
        ++triples;
    }
}

TEST(GroupLaw, ScalarLinearity) {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> k(-20, 20);
    const CurveQ E = ex35_curve();
    const PointQ P = pt(-3, 4);
    for (int i = 0; i < 25; ++i) {
        int m = k(rng), n = k(rng);
        ASSERT_EQ(scalar_mul(E, m + n, P), add(E, scalar_mul(E, m, P), scalar_mul(E, n, P)));
    }
    EXPECT_EQ(scalar_mul(E, 6, P), add(E, scalar_mul(E, 2, P), scalar_mul(E, 4, P)));
    EXPECT_EQ(scalar_mul(E, -3, P), negate(E, scalar_mul(E, 3, P)));
}

TEST(BadPrimes, Examples) {
    EXPECT_EQ(bad_primes(ex35_curve()), (PrimeSet{2, 3}));
    EXPECT_EQ(bad_primes(ex31_curve()), (PrimeSet{2, 3, 5}));
    EXPECT_TRUE((PrimeSet{2, 3}).is_subset_of(bad_primes(e0_curve())));
    EXPECT_THROW(bad_primes(CurveQ(0, 0, 0, Rational(1, 2), 1)), Error);
}

TEST(TwoTorsion, Examples) {
    auto t = two_torsion(ex35_curve());
    std::vector<PointQ> expect{PointQ::infinity(), pt(-4, 0), pt(-1, 0), pt(5, 0)};
    EXPECT_EQ(t, expect);
    EXPECT_EQ(two_torsion(ex31_curve()).size(), 4u);
    EXPECT_EQ(two_torsion(CurveQ(0, 0, 0, 0, 2)).size(), 1u);
    const CurveQ E = ex31_curve();
    auto t31 = two_torsion(E);
    for (const auto& A : t31)
        for (const auto& B : t31) EXPECT_NE(std::find(t31.begin(), t31.end(), add(E, A, B)), t31.end());
}

TEST(DivisionPolynomials, Basics) {
    const CurveQ E = ex35_curve();
    EXPECT_EQ(division_polynomial(E, 1).reduced, PolyQ::constant(1));
    EXPECT_EQ(division_polynomial(E, 2).squared(), (PolyQ{-80, -84, 0, 4}));
    // the 2-torsion x-polynomial is the defining cubic
    EXPECT_EQ(division_polynomial(E, 2).torsion_x_polynomial(), (PolyQ{-20, -21, 0, 1}));
}

TEST(DivisionPolynomials, MultiplicationMapMatchesGroupLaw) {
    for (const CurveQ& E : {ex31_curve(), ex35_curve(), long_curve()}) {
        PointQ P;
        if (E == ex31_curve()) P = pt(9, -36);
        else if (E == ex35_curve()) P = pt(-3, 4);
        else {
            for (long x = -10; x <= 10 && P.infinite; ++x)
                for (const auto& R : points_with_x(E, x)) P = R;
        }
        for (int n = 1; n <= 10; ++n) {
            MultiplicationMap mm = multiplication_x_map(E, n);
            PointQ nP = scalar_mul(E, n, P);
            ASSERT_FALSE(nP.infinite);
            ASSERT_EQ(mm.numerator(P.x) / mm.denominator(P.x), nP.x) << "n=" << n;
        }
    }
}

TEST(Denominators, Examples) {
    const CurveQ E0 = e0_curve();
    const PointQ Q0 = pt(8, -40);
    EXPECT_EQ(denominator_ideal(E0, Q0, 1), 1);
    EXPECT_EQ(radical(denominator_ideal(E0, Q0, 3), PrimeSet{2}), 4879);
    EXPECT_EQ(denominator_ideal(E0, Q0, 4) % denominator_ideal(E0, Q0, 2), 0);
    EXPECT_THROW(denominator_ideal(ex31_curve(), pt(0, 0), 2), Error);
}

TEST(Denominators, DivisibilityOnThreeCurves) {
    std::vector<std::pair<CurveQ, PointQ>> cases{{e0_curve(), pt(8, -40)}, {ex35_curve(), pt(-3, 4)},
                                                 {ex31_curve(), pt(9, -36)}};
    for (const auto& [E, P] : cases) {
        std::vector<Integer> B(31);
        for (int n = 1; n <= 30; ++n) B[n] = denominator_ideal(E, P, n);
        for (int m = 1; m <= 30; ++m)
            for (int n = m; n <= 30; n += m) ASSERT_EQ(B[n] % B[m], 0) << m << " " << n;
    }
}

TEST(Preimages, Examples) {
    const CurveQ E = ex31_curve();
    EXPECT_EQ(preimage_points(E, 1, pt(0, 0)), std::vector<PointQ>{pt(0, 0)});
    auto pre = preimage_points(E, 2, PointQ::affine(Rational(25, 16), Rational(-195, 64)));
    EXPECT_NE(std::find(pre.begin(), pre.end(), pt(9, -36)), pre.end());
    for (const auto& R : pre) EXPECT_EQ(scalar_mul(E, 2, R), PointQ::affine(Rational(25, 16), Rational(-195, 64)));
    EXPECT_TRUE(preimage_points(E, 2, pt(0, 0)).empty());
    EXPECT_EQ(preimage_points(E, 2, PointQ::infinity()).size(), 4u);
}
