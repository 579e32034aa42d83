#pragma once

// Dense univariate polynomials over Q (constant term first), with the few
// modular tools the curve code needs: rational roots, rational reconstruction
// and traces over the roots of a monic polynomial.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "avdiv/arith.hpp"

namespace avdiv {

class PolyQ {
public:
    PolyQ() = default;
    explicit PolyQ(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
    PolyQ(std::initializer_list<long> coeffs) {
        for (long v : coeffs) c_.emplace_back(v);
        trim();
    }
    static PolyQ constant(const Rational& v) { return PolyQ(std::vector<Rational>{v}); }
    static PolyQ x() { return PolyQ({0, 1}); }
    /// Monic polynomial with the given roots.
    static PolyQ from_roots(const std::vector<Rational>& roots) {
        PolyQ r = constant(1);
        for (const auto& z : roots) r = r * PolyQ(std::vector<Rational>{-z, Rational(1)});
        return r;
    }

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(int i) const { return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : Rational(0); }
    Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

    Rational operator()(const Rational& v) const {
        Rational acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * v + *it;
        return acc;
    }

    PolyQ monic() const {
        if (is_zero()) return *this;
        PolyQ r = *this;
        Rational lc = leading();
        for (auto& v : r.c_) v /= lc;
        return r;
    }

    PolyQ derivative() const {
        std::vector<Rational> d;
        for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<long>(i));
        return PolyQ(std::move(d));
    }

    friend PolyQ operator+(const PolyQ& a, const PolyQ& b) {
        std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(int(i)) + b.coeff(int(i));
        return PolyQ(std::move(r));
    }
    friend PolyQ operator-(const PolyQ& a, const PolyQ& b) {
        std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(int(i)) - b.coeff(int(i));
        return PolyQ(std::move(r));
    }
    friend PolyQ operator*(const PolyQ& a, const PolyQ& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> r(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        }
        return PolyQ(std::move(r));
    }
    friend PolyQ operator*(const Rational& s, const PolyQ& a) {
        std::vector<Rational> r = a.c_;
        for (auto& v : r) v *= s;
        return PolyQ(std::move(r));
    }
    friend bool operator==(const PolyQ& a, const PolyQ& b) { return a.c_ == b.c_; }

    /// Quotient and remainder; b must be nonzero.
    friend std::pair<PolyQ, PolyQ> divmod(const PolyQ& a, const PolyQ& b) {
        if (b.is_zero()) throw invariant_error("DivisionByZero", "polynomial division by zero");
        std::vector<Rational> rem = a.c_;
        int db = b.degree();
        if (a.degree() < db) return {PolyQ{}, a};
        std::vector<Rational> q(a.degree() - db + 1);
        const Rational lc = b.leading();
        for (int i = a.degree(); i >= db; --i) {
            if (rem[i] == 0) continue;
            Rational f = rem[i] / lc;
            q[i - db] = f;
            for (int j = 0; j <= db; ++j) rem[i - db + j] -= f * b.c_[j];
        }
        rem.resize(db);
        return {PolyQ(std::move(q)), PolyQ(std::move(rem))};
    }
    friend PolyQ operator%(const PolyQ& a, const PolyQ& b) { return divmod(a, b).second; }

    /// a / b, which must be exact.
    friend PolyQ exact_div(const PolyQ& a, const PolyQ& b) {
        auto [q, r] = divmod(a, b);
        if (!r.is_zero()) throw invariant_error("InexactDivision", "polynomial division leaves a remainder");
        return q;
    }

    friend bool divides(const PolyQ& b, const PolyQ& a) { return (a % b).is_zero(); }

    /// Monic gcd.
    friend PolyQ gcd(PolyQ a, PolyQ b) {
        while (!b.is_zero()) {
            PolyQ r = a % b;
            a = std::move(b);
            b = std::move(r);
        }
        return a.monic();
    }

    PolyQ pow(unsigned e) const {
        PolyQ r = constant(1), b = *this;
        while (e) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::string out;
        for (int i = degree(); i >= 0; --i) {
            if (c_[i] == 0) continue;
            if (!out.empty()) out += c_[i] > 0 ? " + " : " - ";
            else if (c_[i] < 0) out += "-";
            Rational a = abs(c_[i]);
            if (a != 1 || i == 0) out += a.get_str();
            if (i > 0) out += (a != 1 ? "*x" : "x");
            if (i > 1) out += "^" + std::to_string(i);
        }
        return out;
    }

private:
    void trim() {
        for (auto& v : c_) v.canonicalize();
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rational> c_;
};

/// Squarefree part of f (monic).
inline PolyQ squarefree_part(const PolyQ& f) {
    if (f.degree() <= 0) return f.monic();
    return exact_div(f, gcd(f, f.derivative())).monic();
}

/// Primitive integer polynomial with the same roots as f (positive leading coefficient).
inline std::vector<Integer> to_primitive_integer(const PolyQ& f) {
    Integer den = 1;
    for (const auto& v : f.coeffs()) den = lcm(den, Integer(v.get_den()));
    std::vector<Integer> out;
    Integer content = 0;
    for (const auto& v : f.coeffs()) {
        Integer z = Integer(v.get_num()) * (den / Integer(v.get_den()));
        content = gcd(content, z);
        out.push_back(z);
    }
    if (content != 0) {
        if (out.back() < 0) content = -content;
        for (auto& z : out) z /= content;
    }
    return out;
}

// ---------------------------------------------------------------------------
// modular polynomials (coefficients in [0, p), constant first)

using PolyModP = std::vector<std::uint64_t>;

inline PolyModP reduce_mod(const PolyQ& f, std::uint64_t p) {
    PolyModP r;
    for (const auto& v : f.coeffs()) r.push_back(modp::reduce(v, p));
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

inline PolyModP reduce_mod(const std::vector<Integer>& f, std::uint64_t p) {
    PolyModP r;
    for (const auto& v : f) r.push_back(modp::reduce(v, p));
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

inline std::uint64_t eval_mod(const PolyModP& f, std::uint64_t x, std::uint64_t p) {
    std::uint64_t acc = 0;
    for (auto it = f.rbegin(); it != f.rend(); ++it) acc = modp::add(modp::mul(acc, x, p), *it, p);
    return acc;
}

inline PolyModP derivative_mod(const PolyModP& f, std::uint64_t p) {
    PolyModP d;
    for (std::size_t i = 1; i < f.size(); ++i) d.push_back(modp::mul(f[i], i % p, p));
    while (!d.empty() && d.back() == 0) d.pop_back();
    return d;
}

inline PolyModP rem_mod(PolyModP a, const PolyModP& b, std::uint64_t p) {
    const std::uint64_t inv_lc = modp::inv(b.back(), p);
    while (a.size() >= b.size()) {
        std::uint64_t f = modp::mul(a.back(), inv_lc, p);
        std::size_t shift = a.size() - b.size();
        for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] = modp::sub(a[shift + j], modp::mul(f, b[j], p), p);
        while (!a.empty() && a.back() == 0) a.pop_back();
    }
    return a;
}

inline int gcd_degree_mod(PolyModP a, PolyModP b, std::uint64_t p) {
    while (!b.empty()) {
        PolyModP r = rem_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return static_cast<int>(a.size()) - 1;
}

/// All roots of f in F_p by exhaustive evaluation (small p).
inline std::vector<std::uint64_t> roots_mod(const PolyModP& f, std::uint64_t p) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = 0; x < p; ++x)
        if (eval_mod(f, x, p) == 0) out.push_back(x);
    return out;
}

// ---------------------------------------------------------------------------
// rational reconstruction

/// The unique a/b with |a| <= num_bound, 0 < b <= den_bound and a = b*r (mod m),
/// when 2*num_bound*den_bound < m.
inline std::optional<Rational> rational_reconstruct(const Integer& r, const Integer& m, const Integer& num_bound,
                                                    const Integer& den_bound) {
    Integer r0 = m, r1 = r % m;
    if (r1 < 0) r1 += m;
    Integer s0 = 0, s1 = 1;
    while (r1 > num_bound) {
        Integer q = r0 / r1;
        Integer t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    if (s1 == 0 || abs(s1) > den_bound || gcd(r1, s1) != 1) return std::nullopt;
    Rational out(r1, s1);
    out.canonicalize();
    return out;
}

/// Balanced variant: numerator and denominator both bounded by sqrt(m/2).
inline std::optional<Rational> rational_reconstruct(const Integer& r, const Integer& m) {
    Integer bound;
    Integer half = m / 2;
    mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
    return rational_reconstruct(r, m, bound, bound);
}

// ---------------------------------------------------------------------------
// rational roots

/// Distinct rational roots of f, ascending. Roots mod a small good prime are
/// Hensel-lifted far enough that rational reconstruction is unique, then
/// checked exactly.
inline std::vector<Rational> rational_roots(const PolyQ& f) {
    if (f.is_zero()) throw input_error("ZeroPolynomial", "rational_roots of the zero polynomial");
    std::vector<Rational> roots;
    PolyQ g = squarefree_part(f);
    if (g.degree() >= 1 && g.coeff(0) == 0) {
        roots.emplace_back(0);
        g = exact_div(g, PolyQ::x());
    }
    if (g.degree() >= 1) {
        std::vector<Integer> zi = to_primitive_integer(g);
        const Integer A = abs(zi.front());
        const Integer B = abs(zi.back());
        const Integer need = 2 * A * B + 1;

        std::uint64_t p = 0;
        for (std::uint32_t q : small_primes()) {
            if (q < 3) continue;
            if (mpz_divisible_ui_p(zi.back().get_mpz_t(), q)) continue;
            PolyModP gm = reduce_mod(zi, q);
            if (gcd_degree_mod(gm, derivative_mod(gm, q), q) != 0) continue;
            p = q;
            break;
        }
        if (p == 0) throw invariant_error("NoGoodPrime", "no prime keeps the polynomial squarefree");

        PolyQ gq(std::vector<Rational>(zi.begin(), zi.end()));
        PolyQ dg = gq.derivative();
        for (std::uint64_t r0 : roots_mod(reduce_mod(zi, p), p)) {
            Integer r = static_cast<unsigned long>(r0);
            Integer mod = static_cast<unsigned long>(p);
            while (mod < need) {
                mod *= mod;
                Rational fr = gq(Rational(r)), dr = dg(Rational(r));
                Integer fi = fr.get_num(), di = dr.get_num();
                Integer di_inv;
                mpz_invert(di_inv.get_mpz_t(), di.get_mpz_t(), mod.get_mpz_t());
                r = (r - fi * di_inv) % mod;
                if (r < 0) r += mod;
            }
            auto cand = rational_reconstruct(r, mod, A, B);
            if (cand && gq(*cand) == 0) roots.push_back(*cand);
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

// ---------------------------------------------------------------------------
// traces over roots

/// Power sums p_0..p_k of the roots of the monic polynomial d (Newton's identities).
inline std::vector<Rational> power_sums(const PolyQ& d, int k) {
    const int n = d.degree();
    std::vector<Rational> e(n + 1);  // elementary symmetric functions
    e[0] = 1;
    for (int i = 1; i <= n; ++i) e[i] = ((i % 2) ? -1 : 1) * d.coeff(n - i);
    std::vector<Rational> ps(k + 1);
    ps[0] = n;
    for (int j = 1; j <= k; ++j) {
        Rational acc = 0;
        for (int i = 1; i <= std::min(j - 1, n); ++i) acc += ((i % 2) ? 1 : -1) * e[i] * ps[j - i];
        if (j <= n) acc += ((j % 2) ? 1 : -1) * Rational(j) * e[j];
        ps[j] = acc;
    }
    return ps;
}

/// Sum of h(theta) over the roots theta of the monic squarefree polynomial d.
inline Rational trace_over_roots(const PolyQ& h, const PolyQ& d) {
    if (d.degree() <= 0) return 0;
    PolyQ r = h % d;
    std::vector<Rational> ps = power_sums(d, d.degree() - 1);
    Rational acc = 0;
    for (int i = 0; i <= r.degree(); ++i) acc += r.coeff(i) * ps[i];
    return acc;
}

/// Inverse of (x0 - t) in Q[t]/(d(t)); requires d(x0) != 0.
inline PolyQ inverse_of_shift(const Rational& x0, const PolyQ& d) {
    const Rational dx0 = d(x0);
    if (dx0 == 0) throw invariant_error("NotInvertible", "x0 is a root of the modulus");
    // (d(x0) - d(t)) / (x0 - t) is a polynomial g with (x0 - t) g = d(x0) mod d.
    PolyQ num = PolyQ::constant(dx0) - d;
    PolyQ g = exact_div(num, PolyQ(std::vector<Rational>{x0, Rational(-1)}));
    return (Rational(1) / dx0) * g;
}

}  // namespace avdiv
