#pragma once

// Elliptic curves in long Weierstrass form over Q and their rational points.

#include <map>
#include <string>
#include <vector>

#include "avdiv/arith.hpp"
#include "avdiv/poly.hpp"

namespace avdiv {

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with rational coefficients.
class CurveQ {
public:
    CurveQ(Rational a1, Rational a2, Rational a3, Rational a4, Rational a6)
        : a1_(std::move(a1)), a2_(std::move(a2)), a3_(std::move(a3)), a4_(std::move(a4)), a6_(std::move(a6)) {
        for (Rational* v : {&a1_, &a2_, &a3_, &a4_, &a6_}) v->canonicalize();
        if (discriminant() == 0) throw input_error("SingularCurve", "discriminant vanishes for " + to_string());
    }
    /// Short form y^2 = x^3 + a x + b.
    static CurveQ short_form(const Rational& a, const Rational& b) { return CurveQ(0, 0, 0, a, b); }

    const Rational& a1() const { return a1_; }
    const Rational& a2() const { return a2_; }
    const Rational& a3() const { return a3_; }
    const Rational& a4() const { return a4_; }
    const Rational& a6() const { return a6_; }
    std::vector<Rational> ainvs() const { return {a1_, a2_, a3_, a4_, a6_}; }

    Rational b2() const { return a1_ * a1_ + 4 * a2_; }
    Rational b4() const { return 2 * a4_ + a1_ * a3_; }
    Rational b6() const { return a3_ * a3_ + 4 * a6_; }
    Rational b8() const {
        return a1_ * a1_ * a6_ + 4 * a2_ * a6_ - a1_ * a3_ * a4_ + a2_ * a3_ * a3_ - a4_ * a4_;
    }
    Rational c4() const { return b2() * b2() - 24 * b4(); }
    Rational c6() const { return -b2() * b2() * b2() + 36 * b2() * b4() - 216 * b6(); }
    Rational discriminant() const {
        const Rational b2v = b2(), b4v = b4(), b6v = b6(), b8v = b8();
        return -b2v * b2v * b8v - 8 * b4v * b4v * b4v - 27 * b6v * b6v + 9 * b2v * b4v * b6v;
    }
    Rational j_invariant() const {
        const Rational c = c4();
        return c * c * c / discriminant();
    }

    bool is_integral() const {
        for (const Rational* v : {&a1_, &a2_, &a3_, &a4_, &a6_})
            if (v->get_den() != 1) return false;
        return true;
    }

    /// x^3 + a2 x^2 + a4 x + a6
    PolyQ cubic() const { return PolyQ(std::vector<Rational>{a6_, a4_, a2_, Rational(1)}); }
    /// 4x^3 + b2 x^2 + 2 b4 x + b6 = (2y + a1 x + a3)^2 on the curve.
    PolyQ two_division() const {
        return PolyQ(std::vector<Rational>{b6(), 2 * b4(), b2(), Rational(4)});
    }

    bool operator==(const CurveQ& o) const { return ainvs() == o.ainvs(); }

    std::string to_string() const {
        return "[" + a1_.get_str() + "," + a2_.get_str() + "," + a3_.get_str() + "," + a4_.get_str() + "," +
               a6_.get_str() + "]";
    }

private:
    Rational a1_, a2_, a3_, a4_, a6_;
};

/// A rational point: the point at infinity or an affine pair.
struct PointQ {
    bool infinite = true;
    Rational x, y;

    static PointQ infinity() { return {}; }
    static PointQ affine(Rational px, Rational py) {
        px.canonicalize();
        py.canonicalize();
        return {false, std::move(px), std::move(py)};
    }
    bool is_infinity() const { return infinite; }

    bool operator==(const PointQ& o) const {
        if (infinite || o.infinite) return infinite == o.infinite;
        return x == o.x && y == o.y;
    }
    bool operator<(const PointQ& o) const {
        if (infinite != o.infinite) return infinite;
        if (infinite) return false;
        if (x != o.x) return x < o.x;
        return y < o.y;
    }
    std::string to_string() const { return infinite ? "O" : "(" + x.get_str() + "," + y.get_str() + ")"; }
};

inline bool on_curve(const CurveQ& E, const PointQ& P) {
    if (P.infinite) return true;
    const Rational& x = P.x;
    const Rational& y = P.y;
    return y * y + E.a1() * x * y + E.a3() * y == ((x + E.a2()) * x + E.a4()) * x + E.a6();
}

inline void require_on_curve(const CurveQ& E, const PointQ& P) {
    if (!on_curve(E, P)) throw input_error("OffCurve", P.to_string() + " is not on " + E.to_string());
}

namespace detail {

inline PointQ add_unchecked(const CurveQ& E, const PointQ& P, const PointQ& Q) {
    if (P.infinite) return Q;
    if (Q.infinite) return P;
    Rational lambda;
    if (P.x == Q.x) {
        if (P.y + Q.y + E.a1() * Q.x + E.a3() == 0) return PointQ::infinity();
        lambda = (3 * P.x * P.x + 2 * E.a2() * P.x + E.a4() - E.a1() * P.y) / (2 * P.y + E.a1() * P.x + E.a3());
    } else {
        lambda = (Q.y - P.y) / (Q.x - P.x);
    }
    Rational nu = P.y - lambda * P.x;
    Rational x3 = lambda * lambda + E.a1() * lambda - E.a2() - P.x - Q.x;
    Rational y3 = -(lambda + E.a1()) * x3 - nu - E.a3();
    return PointQ::affine(std::move(x3), std::move(y3));
}

inline PointQ negate_unchecked(const CurveQ& E, const PointQ& P) {
    if (P.infinite) return P;
    return PointQ::affine(P.x, -P.y - E.a1() * P.x - E.a3());
}

inline PointQ mul_unchecked(const CurveQ& E, long long n, PointQ P) {
    if (n < 0) {
        P = negate_unchecked(E, P);
        n = -n;
    }
    PointQ acc = PointQ::infinity();
    auto k = static_cast<unsigned long long>(n);
    while (k) {
        if (k & 1) acc = add_unchecked(E, acc, P);
        k >>= 1;
        if (k) P = add_unchecked(E, P, P);
    }
    return acc;
}

}  // namespace detail

inline PointQ negate(const CurveQ& E, const PointQ& P) {
    require_on_curve(E, P);
    return detail::negate_unchecked(E, P);
}

inline PointQ add(const CurveQ& E, const PointQ& P, const PointQ& Q) {
    require_on_curve(E, P);
    require_on_curve(E, Q);
    return detail::add_unchecked(E, P, Q);
}

inline PointQ subtract(const CurveQ& E, const PointQ& P, const PointQ& Q) {
    return add(E, P, negate(E, Q));
}

/// nP by double-and-add; 0P = O and (-n)P = -(nP).
inline PointQ scalar_mul(const CurveQ& E, long long n, const PointQ& P) {
    require_on_curve(E, P);
    return detail::mul_unchecked(E, n, P);
}

/// Bad primes of an integral model: the primes dividing its discriminant.
inline PrimeSet bad_primes(const CurveQ& E) {
    if (!E.is_integral()) throw input_error("NonIntegralModel", E.to_string() + " is not an integral model");
    Integer disc = abs(E.discriminant().get_num());
    return factor(disc).primes();
}

/// Rational points with the given x-coordinate (0, 1 or 2 of them).
inline std::vector<PointQ> points_with_x(const CurveQ& E, const Rational& x) {
    // (2y + a1 x + a3)^2 = F(x)
    Rational disc = E.two_division()(x);
    if (disc < 0) return {};
    Integer num = disc.get_num(), den = disc.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return {};
    Integer sn, sd;
    mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
    Rational root(sn, sd);
    const Rational shift = E.a1() * x + E.a3();
    std::vector<PointQ> out{PointQ::affine(x, (-shift - root) / 2)};
    if (root != 0) out.push_back(PointQ::affine(x, (-shift + root) / 2));
    return out;
}

/// Rational points of order dividing 2, the identity first.
inline std::vector<PointQ> two_torsion(const CurveQ& E) {
    std::vector<PointQ> out{PointQ::infinity()};
    for (const auto& x : rational_roots(E.two_division())) {
        out.push_back(PointQ::affine(x, -(E.a1() * x + E.a3()) / 2));
    }
    return out;
}

// ---------------------------------------------------------------------------
// division polynomials

/// psi_n written as f_n(x) for odd n and psi_2 * f_n(x) for even n, where
/// psi_2 = 2y + a1 x + a3 and psi_2^2 = F(x) = E.two_division().
struct DivisionPolynomial {
    int n = 1;
    PolyQ reduced;  ///< f_n
    PolyQ two_division;

    bool has_psi2_factor() const { return n % 2 == 0; }
    /// psi_n^2 as a polynomial in x.
    PolyQ squared() const { return has_psi2_factor() ? reduced * reduced * two_division : reduced * reduced; }
    /// Squarefree polynomial whose roots are the x-coordinates of E[n] \ {O}.
    PolyQ torsion_x_polynomial() const {
        PolyQ r = has_psi2_factor() ? reduced * two_division : reduced;
        return r.monic();
    }
};

namespace detail {

class DivisionPolynomialTable {
public:
    explicit DivisionPolynomialTable(const CurveQ& E) : F_(E.two_division()) {
        const Rational b2 = E.b2(), b4 = E.b4(), b6 = E.b6(), b8 = E.b8();
        f_[0] = PolyQ{};
        f_[1] = PolyQ::constant(1);
        f_[2] = PolyQ::constant(1);
        f_[3] = PolyQ(std::vector<Rational>{b8, 3 * b6, 3 * b4, b2, Rational(3)});
        f_[4] = PolyQ(std::vector<Rational>{b4 * b8 - b6 * b6, b2 * b8 - b4 * b6, 10 * b8, 10 * b6, 5 * b4, b2,
                                            Rational(2)});
        F2_ = F_ * F_;
    }

    const PolyQ& get(int n) {
        auto it = f_.find(n);
        if (it != f_.end()) return it->second;
        PolyQ r;
        int m = n / 2;
        if (n % 2) {
            PolyQ t1 = get(m + 2) * get(m).pow(3);
            PolyQ t2 = get(m - 1) * get(m + 1).pow(3);
            r = (m % 2 == 0) ? F2_ * t1 - t2 : t1 - F2_ * t2;
        } else {
            r = get(m) * (get(m + 2) * get(m - 1).pow(2) - get(m - 2) * get(m + 1).pow(2));
        }
        return f_[n] = std::move(r);
    }
    const PolyQ& F() const { return F_; }

private:
    PolyQ F_, F2_;
    std::map<int, PolyQ> f_;
};

}  // namespace detail

inline DivisionPolynomial division_polynomial(const CurveQ& E, int n) {
    if (n < 1) throw input_error("BadIndex", "division polynomial index must be >= 1");
    detail::DivisionPolynomialTable table(E);
    return {n, table.get(n), table.F()};
}

/// x(nP) = numerator(x) / denominator(x) with denominator = psi_n^2.
struct MultiplicationMap {
    PolyQ numerator, denominator;
};

inline MultiplicationMap multiplication_x_map(const CurveQ& E, int n) {
    if (n < 1) throw input_error("BadIndex", "multiplier must be >= 1");
    detail::DivisionPolynomialTable table(E);
    const PolyQ& F = table.F();
    PolyQ den = table.get(n) * table.get(n);
    if (n % 2 == 0) den = den * F;
    // psi_{n-1} psi_{n+1}: both even when n is odd
    PolyQ cross = table.get(n - 1) * table.get(n + 1);
    if (n % 2 == 1) cross = cross * F;
    if (n == 1) cross = PolyQ{};  // psi_0 = 0
    return {PolyQ::x() * den - cross, den};
}

// ---------------------------------------------------------------------------
// EDS denominators and division points

/// Denominator of x(nP) in lowest terms.
inline Integer denominator_ideal(const CurveQ& E, const PointQ& P, long long n) {
    if (n < 1) throw input_error("BadIndex", "n must be >= 1");
    PointQ nP = scalar_mul(E, n, P);
    if (nP.infinite) throw degeneracy_error("TorsionVanish", std::to_string(n) + "P is the identity");
    return nP.x.get_den();
}

/// All rational R with mR = P.
inline std::vector<PointQ> preimage_points(const CurveQ& E, int m, const PointQ& P) {
    require_on_curve(E, P);
    if (m < 1) throw input_error("BadIndex", "m must be >= 1");
    if (m == 1) return {P};
    std::vector<Rational> xs;
    if (P.infinite) {
        // rational m-torsion: roots of psi_m
        xs = rational_roots(division_polynomial(E, m).torsion_x_polynomial());
    } else {
        MultiplicationMap mm = multiplication_x_map(E, m);
        xs = rational_roots(mm.numerator - P.x * mm.denominator);
    }
    std::vector<PointQ> out;
    if (P.infinite) out.push_back(PointQ::infinity());
    for (const auto& x : xs) {
        for (const auto& R : points_with_x(E, x))
            if (detail::mul_unchecked(E, m, R) == P) out.push_back(R);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace avdiv
