#pragma once

// Elliptic curves over prime fields F_p, p odd and of good reduction.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "avdiv/arith.hpp"
#include "avdiv/curve_q.hpp"

namespace avdiv {

struct PointFp {
    bool infinite = true;
    std::uint64_t x = 0, y = 0;

    static PointFp infinity() { return {}; }
    static PointFp affine(std::uint64_t px, std::uint64_t py) { return {false, px, py}; }
    bool is_infinity() const { return infinite; }
    bool operator==(const PointFp& o) const {
        if (infinite || o.infinite) return infinite == o.infinite;
        return x == o.x && y == o.y;
    }
    bool operator<(const PointFp& o) const {
        if (infinite != o.infinite) return infinite;
        if (infinite) return false;
        return x != o.x ? x < o.x : y < o.y;
    }
    std::string to_string() const {
        return infinite ? "O" : "(" + std::to_string(x) + "," + std::to_string(y) + ")";
    }
};

/// Largest prime accepted by point counting and torsion enumeration.
inline constexpr std::uint64_t kMaxEnumerationPrime = 1'000'000;

class CurveFp {
public:
    /// Reduction of E at p. Coefficient denominators must be prime to p.
    CurveFp(const CurveQ& E, std::uint64_t p) : p_(p) {
        if (p < 3 || !is_prime(p))
            throw input_error("BadReductionPrime", std::to_string(p) + " is not an odd prime");
        try {
            a_ = {modp::reduce(E.a1(), p), modp::reduce(E.a2(), p), modp::reduce(E.a3(), p),
                  modp::reduce(E.a4(), p), modp::reduce(E.a6(), p)};
            if (modp::reduce(E.discriminant(), p) == 0)
                throw input_error("BadReductionPrime", "bad reduction at " + std::to_string(p));
        } catch (const Error& e) {
            if (e.code() == "BadReductionPrime") throw;
            throw input_error("BadReductionPrime", "coefficient denominator divisible by " + std::to_string(p));
        }
    }

    std::uint64_t p() const { return p_; }
    std::uint64_t a1() const { return a_[0]; }
    std::uint64_t a2() const { return a_[1]; }
    std::uint64_t a3() const { return a_[2]; }
    std::uint64_t a4() const { return a_[3]; }
    std::uint64_t a6() const { return a_[4]; }

    bool contains(const PointFp& P) const {
        if (P.infinite) return true;
        const std::uint64_t p = p_;
        std::uint64_t lhs = modp::add(modp::mul(P.y, P.y, p),
                                      modp::mul(modp::add(modp::mul(a1(), P.x, p), a3(), p), P.y, p), p);
        return lhs == rhs(P.x);
    }

    /// x^3 + a2 x^2 + a4 x + a6
    std::uint64_t rhs(std::uint64_t x) const {
        const std::uint64_t p = p_;
        std::uint64_t r = modp::add(x, a2(), p);
        r = modp::add(modp::mul(r, x, p), a4(), p);
        return modp::add(modp::mul(r, x, p), a6(), p);
    }

    PointFp negate(const PointFp& P) const {
        if (P.infinite) return P;
        const std::uint64_t p = p_;
        return PointFp::affine(P.x, modp::sub(modp::sub(0, P.y, p), modp::add(modp::mul(a1(), P.x, p), a3(), p), p));
    }

    PointFp add(const PointFp& P, const PointFp& Q) const {
        if (P.infinite) return Q;
        if (Q.infinite) return P;
        const std::uint64_t p = p_;
        std::uint64_t lambda;
        if (P.x == Q.x) {
            std::uint64_t den = modp::add(modp::add(modp::mul(2, P.y, p), modp::mul(a1(), P.x, p), p), a3(), p);
            if (P.y != Q.y || den == 0) return PointFp::infinity();
            std::uint64_t num = modp::mul(3, modp::mul(P.x, P.x, p), p);
            num = modp::add(num, modp::mul(modp::mul(2, a2(), p), P.x, p), p);
            num = modp::add(num, a4(), p);
            num = modp::sub(num, modp::mul(a1(), P.y, p), p);
            lambda = modp::mul(num, modp::inv(den, p), p);
        } else {
            lambda = modp::mul(modp::sub(Q.y, P.y, p), modp::inv(modp::sub(Q.x, P.x, p), p), p);
        }
        std::uint64_t nu = modp::sub(P.y, modp::mul(lambda, P.x, p), p);
        std::uint64_t x3 = modp::add(modp::mul(lambda, lambda, p), modp::mul(a1(), lambda, p), p);
        x3 = modp::sub(modp::sub(modp::sub(x3, a2(), p), P.x, p), Q.x, p);
        std::uint64_t y3 = modp::mul(modp::add(lambda, a1(), p), x3, p);
        y3 = modp::sub(modp::sub(modp::sub(0, y3, p), nu, p), a3(), p);
        return PointFp::affine(x3, y3);
    }

    PointFp mul(std::uint64_t n, PointFp P) const {
        PointFp acc = PointFp::infinity();
        while (n) {
            if (n & 1) acc = add(acc, P);
            n >>= 1;
            if (n) P = add(P, P);
        }
        return acc;
    }
    PointFp mul(long long n, const PointFp& P) const {
        return n < 0 ? negate(mul(static_cast<std::uint64_t>(-n), P)) : mul(static_cast<std::uint64_t>(n), P);
    }
    PointFp mul(int n, const PointFp& P) const { return mul(static_cast<long long>(n), P); }
    PointFp mul(const Integer& n, const PointFp& P) const {
        Integer k = abs(n);
        PointFp acc = PointFp::infinity(), base = P;
        const std::size_t bits = mpz_sizeinbase(k.get_mpz_t(), 2);
        for (std::size_t i = 0; i < bits; ++i) {
            if (mpz_tstbit(k.get_mpz_t(), i)) acc = add(acc, base);
            base = add(base, base);
        }
        return n < 0 ? negate(acc) : acc;
    }

    /// Points with the given x-coordinate.
    std::vector<PointFp> points_with_x(std::uint64_t x) const {
        const std::uint64_t p = p_;
        std::uint64_t shift = modp::add(modp::mul(a1(), x, p), a3(), p);
        // (2y + shift)^2 = shift^2 + 4 rhs(x)
        std::uint64_t disc = modp::add(modp::mul(shift, shift, p), modp::mul(4, rhs(x), p), p);
        int chi = modp::legendre(disc, p);
        if (chi < 0) return {};
        const std::uint64_t half = modp::inv(2, p);
        std::uint64_t s = modp::sqrt(disc, p);
        std::vector<PointFp> out{PointFp::affine(x, modp::mul(modp::sub(s, shift, p), half, p))};
        if (s != 0) out.push_back(PointFp::affine(x, modp::mul(modp::sub(p - s, shift, p), half, p)));
        return out;
    }

    std::string to_string() const {
        return "[" + std::to_string(a1()) + "," + std::to_string(a2()) + "," + std::to_string(a3()) + "," +
               std::to_string(a4()) + "," + std::to_string(a6()) + "] mod " + std::to_string(p_);
    }

private:
    std::uint64_t p_;
    std::array<std::uint64_t, 5> a_{};
};

/// Reduction of a rational point; the identity when p divides the denominators.
inline PointFp reduce_point(const CurveQ& E, const PointQ& P, std::uint64_t p) {
    CurveFp Ep(E, p);
    require_on_curve(E, P);
    if (P.infinite) return PointFp::infinity();
    if (mpz_divisible_ui_p(P.x.get_den_mpz_t(), p)) return PointFp::infinity();
    return PointFp::affine(modp::reduce(P.x, p), modp::reduce(P.y, p));
}

inline PointFp reduce_point(const CurveFp& Ep, const PointQ& P) {
    if (P.infinite) return PointFp::infinity();
    if (mpz_divisible_ui_p(P.x.get_den_mpz_t(), Ep.p())) return PointFp::infinity();
    return PointFp::affine(modp::reduce(P.x, Ep.p()), modp::reduce(P.y, Ep.p()));
}

/// Whether n * (P mod p) is the identity, by modular double-and-add.
inline bool is_zero_mod(const CurveQ& E, const PointQ& P, long long n, std::uint64_t p) {
    CurveFp Ep(E, p);
    return Ep.mul(n, reduce_point(E, P, p)).infinite;
}

/// #E(F_p) = p + 1 + sum over x of chi(F(x)), F the 2-division polynomial.
inline std::uint64_t group_order(const CurveFp& E, std::uint64_t max_p = kMaxEnumerationPrime) {
    const std::uint64_t p = E.p();
    if (p > max_p) throw input_error("PrimeTooLarge", std::to_string(p) + " exceeds the point counting range");
    // Legendre symbols from a table of squares
    std::vector<signed char> chi(p, -1);
    chi[0] = 0;
    for (std::uint64_t y = 1; y <= p / 2; ++y) chi[modp::mul(y, y, p)] = 1;
    const std::uint64_t b2 = modp::add(modp::mul(E.a1(), E.a1(), p), modp::mul(4, E.a2(), p), p);
    const std::uint64_t b4 = modp::add(modp::mul(2, E.a4(), p), modp::mul(E.a1(), E.a3(), p), p);
    const std::uint64_t b6 = modp::add(modp::mul(E.a3(), E.a3(), p), modp::mul(4, E.a6(), p), p);
    long long acc = static_cast<long long>(p) + 1;
    for (std::uint64_t x = 0; x < p; ++x) {
        std::uint64_t f = modp::add(modp::mul(4, x, p), b2, p);
        f = modp::add(modp::mul(f, x, p), modp::mul(2, b4, p), p);
        f = modp::add(modp::mul(f, x, p), b6, p);
        acc += chi[f];
    }
    return static_cast<std::uint64_t>(acc);
}

/// Every point of E(F_p).
inline std::vector<PointFp> all_points(const CurveFp& E, std::uint64_t max_p = kMaxEnumerationPrime) {
    if (E.p() > max_p) throw input_error("PrimeTooLarge", std::to_string(E.p()) + " exceeds the enumeration range");
    std::vector<PointFp> out{PointFp::infinity()};
    for (std::uint64_t x = 0; x < E.p(); ++x)
        for (const auto& P : E.points_with_x(x)) out.push_back(P);
    return out;
}

/// Order of a point of E(F_p), given the group order.
inline std::uint64_t point_order(const CurveFp& E, const PointFp& P, std::uint64_t group_size) {
    std::uint64_t n = group_size;
    for (const auto& pp : factor(Integer(static_cast<unsigned long>(group_size))).factors) {
        const std::uint64_t q = pp.prime.get_ui();
        for (unsigned i = 0; i < pp.exponent && n % q == 0 && E.mul(n / q, P).infinite; ++i) n /= q;
    }
    return n;
}

inline std::uint64_t point_order(const CurveFp& E, const PointFp& P) { return point_order(E, P, group_order(E)); }

/// E(F_p)[N], sorted.
inline std::vector<PointFp> torsion_points(const CurveFp& E, std::uint64_t N,
                                           std::uint64_t max_p = kMaxEnumerationPrime) {
    if (N == 0) throw input_error("BadIndex", "torsion level must be positive");
    if (N == 1) return {PointFp::infinity()};
    if (N % E.p() == 0) throw input_error("BadReductionPrime", "p divides the torsion level");
    std::vector<PointFp> out;
    for (const auto& P : all_points(E, max_p))
        if (E.mul(N, P).infinite) out.push_back(P);
    std::sort(out.begin(), out.end());
    return out;
}

/// Default search bound for auxiliary primes.
inline constexpr std::uint64_t kAuxPrimeBound = 100'000;

/// Odd good primes p <= bound with p prime to N and E(F_p) containing (Z/N)^2, in increasing order.
inline std::vector<std::uint64_t> find_full_torsion_primes(const CurveQ& E, std::uint64_t N, std::size_t count,
                                                           std::uint64_t bound = kAuxPrimeBound,
                                                           const PrimeSet& avoid = {}) {
    if (N == 0) throw input_error("BadIndex", "torsion level must be positive");
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 3; p <= bound && out.size() < count; p += 2) {
        if (!is_prime(p) || N % p == 0 || avoid.contains(Integer(static_cast<unsigned long>(p)))) continue;
        // the Weil pairing puts the N-th roots of unity in F_p
        if (N > 2 && p % N != 1) continue;
        std::optional<CurveFp> Ep;
        try {
            Ep.emplace(E, p);
        } catch (const Error&) {
            continue;
        }
        if (group_order(*Ep) % (N * N) != 0) continue;
        if (torsion_points(*Ep, N).size() != N * N) continue;
        out.push_back(p);
    }
    return out;
}

inline std::uint64_t find_full_torsion_prime(const CurveQ& E, std::uint64_t N, std::uint64_t bound = kAuxPrimeBound,
                                             const PrimeSet& avoid = {}) {
    auto ps = find_full_torsion_primes(E, N, 1, bound, avoid);
    if (ps.empty())
        throw degeneracy_error("NotFound", "no prime up to " + std::to_string(bound) + " has full " +
                                               std::to_string(N) + "-torsion");
    return ps.front();
}

}  // namespace avdiv
