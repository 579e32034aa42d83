#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "avdiv/curve_fp.hpp"
#include "avdiv/torsion.hpp"

using namespace avdiv;

namespace {

CurveQ ex31_curve() { return CurveQ(0, 8, 0, -9, 0); }
CurveQ ex35_curve() { return CurveQ(0, 0, 0, -21, -20); }
CurveQ e0_curve() { return CurveQ(0, 8, 0, 36, 288); }

PointQ pt(long x, long y) { return PointQ::affine(x, y); }

}  // namespace

TEST(Reduction, Examples) {
    const CurveQ E = ex35_curve();
    EXPECT_EQ(reduce_point(E, pt(-3, 4), 5), PointFp::affine(2, 4));
    EXPECT_TRUE(reduce_point(E, PointQ::infinity(), 5).infinite);
    const CurveQ E0 = e0_curve();
    EXPECT_TRUE(reduce_point(E0, scalar_mul(E0, 3, pt(8, -40)), 7).infinite);
    EXPECT_THROW(reduce_point(E, pt(-3, 4), 3), Error);
    EXPECT_THROW(CurveFp(E, 2), Error);
}

TEST(Reduction, IsZeroMod) {
    const CurveQ E = ex35_curve();
    const PointQ P2 = scalar_mul(E, 2, pt(-3, 4));
    EXPECT_TRUE(is_zero_mod(E, P2, 2, 5));
    EXPECT_FALSE(is_zero_mod(E, pt(-3, 4), 1, 7));
    for (std::uint64_t p : {5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97}) {
        for (int n = 1; n <= 8; ++n) {
            PointQ nP = scalar_mul(E, n, pt(-3, 4));
            ASSERT_EQ(is_zero_mod(E, pt(-3, 4), n, p), reduce_point(E, nP, p).infinite) << n << " " << p;
        }
    }
}

TEST(Reduction, Homomorphism) {
    const CurveQ E = ex35_curve();
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> k(-8, 8);
    const std::vector<PointQ> gens{pt(-3, 4), pt(-1, 0), pt(5, 0)};
    const std::vector<std::uint64_t> primes{5, 7, 11, 13, 101, 1009};
    for (int i = 0; i < 100; ++i) {
        PointQ A = add(E, scalar_mul(E, k(rng), gens[0]), gens[1 + i % 2]);
        PointQ B = scalar_mul(E, k(rng), gens[0]);
        std::uint64_t p = primes[i % primes.size()];
        CurveFp Ep(E, p);
        ASSERT_EQ(reduce_point(Ep, add(E, A, B)), Ep.add(reduce_point(Ep, A), reduce_point(Ep, B)));
    }
}

TEST(GroupOrder, SmallCurveAndHasse) {
    EXPECT_EQ(group_order(CurveFp(CurveQ(0, 0, 0, 1, 0), 5)), 4u);
    std::mt19937 rng(17);
    std::uniform_int_distribution<long> coeff(-50, 50);
    const auto primes = primes_up_to(2000);
    int curves = 0;
    while (curves < 50) {
        long a = coeff(rng), b = coeff(rng);
        if (4 * a * a * a + 27 * b * b == 0) continue;
        std::uint64_t p = primes[100 + rng() % (primes.size() - 100)];
        CurveQ E = CurveQ::short_form(a, b);
        std::optional<CurveFp> Ep;
        try {
            Ep.emplace(E, p);
        } catch (const Error&) {
            continue;
        }
        std::uint64_t n = group_order(*Ep);
        ASSERT_LE(std::fabs(double(n) - double(p) - 1), 2 * std::sqrt(double(p)));
        ASSERT_EQ(all_points(*Ep).size(), n);
        if (curves < 20) {
            auto pts = Ep->points_with_x(rng() % p);
            for (const auto& P : pts) ASSERT_TRUE(Ep->mul(n, P).infinite);
        }
        ++curves;
    }
    EXPECT_THROW(group_order(CurveFp(ex35_curve(), 1000003)), Error);
}

TEST(TorsionFp, Enumeration) {
    CurveFp E7(ex31_curve(), 7);
    EXPECT_EQ(torsion_points(E7, 1), std::vector<PointFp>{PointFp::infinity()});
    auto t2 = torsion_points(E7, 2);
    EXPECT_EQ(t2.size(), 4u);
    std::set<PointFp> s(t2.begin(), t2.end());
    for (const auto& A : t2) {
        EXPECT_TRUE(s.count(E7.negate(A)));
        for (const auto& B : t2) EXPECT_TRUE(s.count(E7.add(A, B)));
    }
}

TEST(TorsionFp, FullTorsionPrimes) {
    EXPECT_EQ(find_full_torsion_prime(ex31_curve(), 1), 7u);
    std::uint64_t p2 = find_full_torsion_prime(ex31_curve(), 2);
    EXPECT_EQ(torsion_points(CurveFp(ex31_curve(), p2), 2).size(), 4u);
    for (std::uint64_t N : {3, 4, 6}) {
        auto ps = find_full_torsion_primes(ex35_curve(), N, 3);
        ASSERT_EQ(ps.size(), 3u);
        for (auto p : ps) {
            EXPECT_EQ(p % N, 1u);
            EXPECT_EQ(torsion_points(CurveFp(ex35_curve(), p), N).size(), N * N);
        }
    }
}

TEST(TorsionOrder, Examples) {
    EXPECT_EQ(torsion_order(ex35_curve(), pt(-1, 0)), 2u);
    EXPECT_FALSE(torsion_order(ex35_curve(), pt(-3, 4)).has_value());
    EXPECT_EQ(torsion_order(ex31_curve(), pt(0, 0)), 2u);
    EXPECT_EQ(torsion_order(ex31_curve(), PointQ::infinity()), 1u);
    // y^2 + y = x^3 - x^2 has (0,0) of order 5
    EXPECT_EQ(torsion_order(CurveQ(0, -1, 1, 0, 0), pt(0, 0)), 5u);
    EXPECT_FALSE(torsion_order(ex31_curve(), pt(9, -36)).has_value());
}

TEST(TorsionOrder, RationalTorsion) {
    EXPECT_EQ(rational_torsion_points(ex35_curve(), 2).size(), 4u);
    EXPECT_EQ(rational_torsion_points(ex35_curve(), 4).size(), 4u);
    EXPECT_EQ(rational_torsion_points(CurveQ(0, -1, 1, 0, 0), 5).size(), 5u);
    EXPECT_EQ(rational_torsion_points(e0_curve(), 6).size(), 2u);
}

TEST(Height, Estimates) {
    const CurveQ E = ex35_curve();
    const PointQ U = pt(-3, 4);
    double h1 = height_estimate(E, U).value;
    double h2 = height_estimate(E, scalar_mul(E, 2, U)).value;
    EXPECT_GT(h1, 0);
    EXPECT_GE(h2 / h1, 3.8);
    EXPECT_LE(h2 / h1, 4.2);
    EXPECT_THROW(height_estimate(E, pt(-1, 0)), Error);
}
