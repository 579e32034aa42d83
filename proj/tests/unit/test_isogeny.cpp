#include <gtest/gtest.h>

#include <random>

#include "avdiv/isogeny.hpp"

using namespace avdiv;

namespace {

CurveQ ex31_curve() { return CurveQ(0, 8, 0, -9, 0); }
CurveQ ex35_curve() { return CurveQ(0, 0, 0, -21, -20); }
CurveQ e0_curve() { return CurveQ(0, 8, 0, 36, 288); }

PointQ pt(long x, long y) { return PointQ::affine(x, y); }

// kernel of [2] composed with the quotient by (0,0): the points R with 2R in {O, (0,0)}
KernelSpec ex31_order_eight_kernel() {
    const CurveQ E = ex31_curve();
    SubgroupOracle oracle = [&](const CurveFp& Ep) -> std::optional<std::vector<PointFp>> {
        auto tors = torsion_points(Ep, 4);
        if (tors.size() != 16) return std::nullopt;
        std::vector<PointFp> out;
        for (const auto& V : tors) {
            PointFp W = Ep.add(V, V);
            if (W.infinite || (W.x == 0 && W.y == 0)) out.push_back(V);
        }
        return out;
    };
    return kernel_from_reductions(E, 4, oracle);
}

std::vector<PointQ> sample_points(const CurveQ& E, const PointQ& gen, const std::vector<PointQ>& torsion, int count) {
    std::vector<PointQ> out;
    for (int k = 1; static_cast<int>(out.size()) < count; ++k) {
        PointQ P = scalar_mul(E, (k % 2 ? k : -k), gen);
        out.push_back(add(E, P, torsion[k % torsion.size()]));
    }
    return out;
}

void expect_dual_composition(const Isogeny& iso, const std::vector<PointQ>& points) {
    Isogeny dual = dual_isogeny(iso);
    EXPECT_EQ(dual.codomain, iso.domain);
    for (const auto& P : points)
        ASSERT_EQ(evaluate(dual, evaluate(iso, P)), scalar_mul(iso.domain, static_cast<long long>(iso.degree), P))
            << P.to_string();
}

}  // namespace

TEST(Transforms, ComposeInvertApply) {
    const CurveQ E(1, -1, 1, 0, 0);
    WeierstrassTransform a{Rational(2), Rational(1, 3), Rational(-1), Rational(5, 2)};
    WeierstrassTransform b{Rational(-1, 3), Rational(4), Rational(1, 2), Rational(-7)};
    const PointQ P = pt(0, 0);
    EXPECT_EQ(b.apply(a.apply(E)), a.then(b).apply(E));
    EXPECT_EQ(b.apply(a.apply(P)), a.then(b).apply(P));
    EXPECT_TRUE(a.then(a.inverse()).is_identity());
    EXPECT_TRUE(on_curve(a.apply(E), a.apply(P)));
    EXPECT_EQ(negation_transform(E).apply(E), E);
    EXPECT_EQ(negation_transform(E).apply(P), negate(E, P));
}

TEST(Transforms, IsomorphismsOverQ) {
    auto id = isomorphic_over_q(ex35_curve(), ex35_curve());
    ASSERT_TRUE(id.has_value());
    EXPECT_EQ(id->apply(ex35_curve()), ex35_curve());
    const CurveQ velu_model(0, -16, 0, 100, 0);  // y^2 = x(x^2 - 16x + 100)
    auto shift = isomorphic_over_q(velu_model, e0_curve());
    ASSERT_TRUE(shift.has_value());
    EXPECT_EQ(shift->apply(velu_model), e0_curve());
    EXPECT_EQ(abs(shift->u), 1);
    EXPECT_FALSE(isomorphic_over_q(ex31_curve(), ex35_curve()).has_value());
    // quadratic twist: same j, not isomorphic over Q
    EXPECT_FALSE(isomorphic_over_q(CurveQ::short_form(-21, -20), CurveQ::short_form(-21 * 4, -20 * 8 * -1)).has_value());
    WeierstrassTransform w{Rational(3, 2), Rational(7), Rational(1), Rational(-2)};
    auto back = isomorphic_over_q(w.apply(ex31_curve()), ex31_curve());
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(back->apply(w.apply(ex31_curve())), ex31_curve());
}

TEST(Kernels, FromRationalSubgroups) {
    const CurveQ E = ex31_curve();
    KernelSpec trivial = kernel_from_subgroup(E, {});
    EXPECT_EQ(trivial.kernel_polynomial, PolyQ::constant(1));
    EXPECT_EQ(trivial.order, 1u);
    KernelSpec full = kernel_from_subgroup(E, {pt(0, 0), pt(1, 0)});
    EXPECT_EQ(full.kernel_polynomial, (PolyQ{0, -9, 8, 1}));
    EXPECT_EQ(full.order, 4u);
    EXPECT_THROW(kernel_from_subgroup(E, {pt(9, -36)}), Error);
}

TEST(Kernels, IrrationalOrderEightSubgroup) {
    KernelSpec k = ex31_order_eight_kernel();
    EXPECT_EQ(k.order, 8u);
    EXPECT_EQ(k.kernel_polynomial, (PolyQ{0, -81, 72, 0, 8, 1}));
    EXPECT_EQ(k.kernel_polynomial, PolyQ({0, -9, 8, 1}) * PolyQ({9, 0, 1}));
    EXPECT_TRUE(divides(k.kernel_polynomial, division_polynomial(k.curve, 4).torsion_x_polynomial()));
    Isogeny iso = velu_quotient(k);
    EXPECT_EQ(iso.degree, 8u);
    EXPECT_TRUE(isomorphic_over_q(iso.codomain, e0_curve()).has_value());
    expect_dual_composition(iso, sample_points(ex31_curve(), pt(9, -36), two_torsion(ex31_curve()), 20));
}

TEST(Velu, TrivialKernel) {
    Isogeny iso = velu_quotient(kernel_from_subgroup(ex35_curve(), {}));
    EXPECT_EQ(iso.degree, 1u);
    EXPECT_EQ(iso.codomain, ex35_curve());
    EXPECT_EQ(evaluate(iso, pt(-3, 4)), pt(-3, 4));
}

TEST(Velu, TwoIsogenyOfFirstExample) {
    const CurveQ E = ex31_curve();
    Isogeny iso = velu_quotient(kernel_from_subgroup(E, {pt(0, 0)}));
    EXPECT_EQ(iso.degree, 2u);
    EXPECT_EQ(iso.codomain, e0_curve());
    PointQ img = evaluate(iso, pt(9, -36));
    EXPECT_EQ(img.x, 8);
    EXPECT_EQ(abs(img.y), 40);
    EXPECT_TRUE(evaluate(iso, pt(0, 0)).infinite);
    EXPECT_FALSE(evaluate(iso, pt(1, 0)).infinite);
    EXPECT_TRUE(divides(iso.kernel.kernel_polynomial, division_polynomial(E, 2).torsion_x_polynomial()));
    expect_dual_composition(iso, sample_points(E, pt(9, -36), two_torsion(E), 20));
}

TEST(Velu, FullTwoTorsionOfSecondExample) {
    const CurveQ E = ex35_curve();
    Isogeny iso = velu_quotient(kernel_from_subgroup(E, {pt(-1, 0), pt(5, 0)}));
    EXPECT_EQ(iso.degree, 4u);
    EXPECT_NE(iso.codomain.discriminant(), 0);
    EXPECT_TRUE(isomorphic_over_q(iso.codomain, E).has_value());
    for (const auto& T : two_torsion(E)) EXPECT_TRUE(evaluate(iso, T).infinite);
    expect_dual_composition(iso, sample_points(E, pt(-3, 4), two_torsion(E), 20));
}

TEST(Velu, OddKernel) {
    // y^2 + y = x^3 - x^2 with the rational 5-torsion point (0,0)
    const CurveQ E(0, -1, 1, 0, 0);
    Isogeny iso = velu_quotient(kernel_from_subgroup(E, {pt(0, 0)}));
    EXPECT_EQ(iso.degree, 5u);
    EXPECT_TRUE(iso.codomain.is_integral());
    for (const auto& T : rational_subgroup(E, {pt(0, 0)})) EXPECT_TRUE(evaluate(iso, T).infinite);
    std::vector<PointQ> pts;
    for (long x = -20; x <= 200 && pts.size() < 6; ++x)
        for (const auto& R : points_with_x(E, Rational(x, 4))) pts.push_back(R);
    for (const auto& P : pts) EXPECT_TRUE(on_curve(iso.codomain, evaluate(iso, P)));
}

TEST(Velu, EvaluationIsAHomomorphism) {
    const CurveQ E = ex35_curve();
    Isogeny iso = velu_quotient(kernel_from_subgroup(E, {pt(-1, 0)}));
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> k(-5, 5);
    const auto tors = two_torsion(E);
    for (int i = 0; i < 15; ++i) {
        PointQ P = add(E, scalar_mul(E, k(rng), pt(-3, 4)), tors[rng() % 4]);
        PointQ Q = add(E, scalar_mul(E, k(rng), pt(-3, 4)), tors[rng() % 4]);
        ASSERT_EQ(evaluate(iso, add(E, P, Q)), add(iso.codomain, evaluate(iso, P), evaluate(iso, Q)));
    }
}

TEST(Velu, ModPEvaluationMatchesRational) {
    const CurveQ E = ex35_curve();
    Isogeny iso = velu_quotient(kernel_from_subgroup(E, {pt(-1, 0), pt(5, 0)}));
    for (std::uint64_t p : {7, 11, 13, 101}) {
        auto map = IsogenyModP::make(iso, p);
        ASSERT_TRUE(map.has_value());
        for (int n = 1; n <= 6; ++n) {
            PointQ P = scalar_mul(E, n, pt(-3, 4));
            ASSERT_EQ((*map)(reduce_point(map->domain(), P)), reduce_point(map->codomain(), evaluate(iso, P)));
        }
    }
}
