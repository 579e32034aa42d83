#pragma once

// Divisibility sequences C_n: for a point on an elliptic curve, and for a point
// on A = E^m / H given by a lift to E^m.

#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "avdiv/arith.hpp"
#include "avdiv/curve_fp.hpp"
#include "avdiv/curve_q.hpp"
#include "avdiv/isogeny.hpp"
#include "avdiv/torsion.hpp"

namespace avdiv {

using PointTuple = std::vector<PointQ>;

/// A = E^m / H with a lift L in E^m of the point P in A.
struct QuotientAVSpec {
    CurveQ base;
    int m = 1;
    std::vector<PointTuple> H_generators;
    std::optional<std::uint64_t> N;  ///< exponent of H, derived when absent
    PointTuple L;
};

/// One term of a sequence.
struct DivSeqTerm {
    long n = 0;
    Integer radical_value = 1;
    Factorization factorization;  ///< of the radical, exponents 1
    PrimeSet primitive_primes;
};

// ---------------------------------------------------------------------------
// the subgroup H

inline PointTuple tuple_add(const CurveQ& E, const PointTuple& a, const PointTuple& b) {
    PointTuple out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = detail::add_unchecked(E, a[i], b[i]);
    return out;
}

inline PointTuple tuple_mul(const CurveQ& E, long long n, const PointTuple& a) {
    PointTuple out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = detail::mul_unchecked(E, n, a[i]);
    return out;
}

inline bool tuple_is_zero(const PointTuple& a) {
    return std::all_of(a.begin(), a.end(), [](const PointQ& P) { return P.infinite; });
}

inline std::string tuple_to_string(const PointTuple& a) {
    std::string out = "(";
    for (std::size_t i = 0; i < a.size(); ++i) out += (i ? ", " : "") + a[i].to_string();
    return out + ")";
}

/// Structural checks on a specification; throws on violations.
inline void validate(const QuotientAVSpec& spec) {
    if (spec.m < 1) throw input_error("BadSpec", "m must be positive");
    if (static_cast<int>(spec.L.size()) != spec.m) throw input_error("BadSpec", "lift has the wrong length");
    if (!spec.base.is_integral()) throw input_error("NonIntegralModel", "the base curve must be an integral model");
    for (const auto& P : spec.L) require_on_curve(spec.base, P);
    for (const auto& g : spec.H_generators) {
        if (static_cast<int>(g.size()) != spec.m) throw input_error("BadSpec", "generator has the wrong length");
        for (const auto& P : g) {
            require_on_curve(spec.base, P);
            if (!small_torsion_order(spec.base, P))
                throw input_error("NotTorsion", P.to_string() + " in a generator of H is not torsion");
        }
    }
}

/// Closure of the generators of H, sorted, identity first.
inline std::vector<PointTuple> enumerate_subgroup(const QuotientAVSpec& spec, std::size_t size_bound = 65536) {
    validate(spec);
    const PointTuple zero(spec.m, PointQ::infinity());
    std::set<PointTuple> group{zero};
    std::vector<PointTuple> frontier{zero};
    while (!frontier.empty()) {
        std::vector<PointTuple> next;
        for (const auto& h : frontier)
            for (const auto& g : spec.H_generators) {
                PointTuple s = tuple_add(spec.base, h, g);
                if (group.insert(s).second) next.push_back(std::move(s));
                if (group.size() > size_bound) throw input_error("NotClosed", "H exceeds the size bound");
            }
        frontier = std::move(next);
    }
    return {group.begin(), group.end()};
}

/// Smallest N with N h = 0 for every h in H.
inline std::uint64_t subgroup_exponent(const QuotientAVSpec& spec, const std::vector<PointTuple>& H) {
    std::uint64_t N = 1;
    for (const auto& h : H)
        for (const auto& P : h) N = std::lcm(N, *small_torsion_order(spec.base, P));
    if (spec.N) {
        for (const auto& h : H)
            if (!tuple_is_zero(tuple_mul(spec.base, static_cast<long long>(*spec.N), h)))
                throw input_error("BadSpec", "the supplied N does not kill H");
        return *spec.N;
    }
    return N;
}

inline std::uint64_t subgroup_exponent(const QuotientAVSpec& spec) {
    return subgroup_exponent(spec, enumerate_subgroup(spec));
}

/// Primes that must be excluded: bad primes of the base, primes dividing N, and 2.
inline PrimeSet forced_exclusions(const QuotientAVSpec& spec, std::uint64_t N) {
    PrimeSet S = bad_primes(spec.base);
    S.insert(Integer(2));
    S.merge(factor(Integer(static_cast<unsigned long>(N))).primes());
    return S;
}

// ---------------------------------------------------------------------------
// congruence primes

namespace detail {

/// Remove from g every prime that divides d.
inline Integer strip_common(Integer g, const Integer& d) {
    if (g == 0) return g;
    for (Integer h = gcd(g, d); h > 1; h = gcd(g, d)) g /= h;
    return g;
}

}  // namespace detail

/// An integer whose prime divisors outside `exclude` are exactly the primes p
/// with R = h mod p; 0 stands for "every prime" (R = h exactly).
inline Integer congruence_ideal(const CurveQ& /*E*/, const PointQ& R, const PointQ& h, const PrimeSet& exclude) {
    Integer g;
    if (R == h) return 0;
    if (h.infinite) {
        g = R.x.get_den();
    } else if (R.infinite) {
        g = h.x.get_den();
    } else {
        const Rational dx = R.x - h.x, dy = R.y - h.y;
        g = gcd(Integer(dx.get_num()), Integer(dy.get_num()));
        const Integer dR = R.x.get_den() * R.y.get_den(), dh = h.x.get_den() * h.y.get_den();
        g = detail::strip_common(g, dR * dh);
        // both reduce to the identity
        g *= gcd(Integer(R.x.get_den()), Integer(h.x.get_den()));
    }
    g = abs(g);
    return strip_primes(g, exclude);
}

/// The set of congruence primes, or nothing for "all primes".
struct CongruencePrimes {
    bool all = false;
    PrimeSet primes;
};

inline CongruencePrimes congruence_primes(const CurveQ& E, const PointQ& R, const PointQ& h, const PrimeSet& exclude,
                                          const FactorOptions& opts = {}) {
    if (!E.is_integral()) throw input_error("BadModel", "congruence primes need an integral model");
    require_on_curve(E, R);
    require_on_curve(E, h);
    Integer g = congruence_ideal(E, R, h, exclude);
    if (g == 0) return {true, {}};
    return {false, factor(g, opts).primes()};
}

// ---------------------------------------------------------------------------
// elliptic sequences

/// Support generator of C_n(E, Q, S): primes outside S dividing the denominator of x(nQ).
inline Integer elliptic_support(const CurveQ& E, const PointQ& Q, const PrimeSet& S, long n) {
    PointQ nQ = detail::mul_unchecked(E, n, Q);
    if (nQ.infinite) throw degeneracy_error("TorsionPoint", std::to_string(n) + "Q is the identity");
    return strip_primes(nQ.x.get_den(), S);
}

inline DivSeqTerm make_term(long n, const Integer& support, const FactorOptions& opts) {
    DivSeqTerm t;
    t.n = n;
    t.factorization = radical_factorization(support, {}, opts);
    t.radical_value = t.factorization.value;
    return t;
}

inline DivSeqTerm c_n_elliptic(const CurveQ& E, const PointQ& Q, const PrimeSet& S, long n,
                               const FactorOptions& opts = {}) {
    if (n < 1) throw input_error("BadIndex", "n must be positive");
    require_on_curve(E, Q);
    if (!E.is_integral()) throw input_error("NonIntegralModel", E.to_string() + " is not an integral model");
    if (Q.infinite || is_torsion(E, Q)) throw degeneracy_error("TorsionPoint", Q.to_string() + " is torsion");
    // reduction is only meaningful at good primes
    PrimeSet excluded = bad_primes(E);
    excluded.merge(S);
    return make_term(n, elliptic_support(E, Q, excluded, n), opts);
}

// ---------------------------------------------------------------------------
// quotient sequences

/// Everything needed to evaluate terms for one specification.
struct QuotientContext {
    QuotientAVSpec spec;
    std::vector<PointTuple> H;
    std::uint64_t N = 1;
    PrimeSet S;  ///< effective exclusion set

    QuotientContext(QuotientAVSpec s, const PrimeSet& extra)
        : spec(std::move(s)), H(enumerate_subgroup(spec)), N(subgroup_exponent(spec, H)) {
        S = forced_exclusions(spec, N);
        S.merge(extra);
    }
};

/// Support generator of C_n(A, P, S): the union over h in H of the primes where
/// nL = h componentwise.
inline Integer quotient_support(const QuotientContext& ctx, long n) {
    const CurveQ& E = ctx.spec.base;
    const PointTuple nL = tuple_mul(E, n, ctx.spec.L);
    Integer acc = 1;
    for (const auto& h : ctx.H) {
        Integer g = 0;
        for (int i = 0; i < ctx.spec.m; ++i) {
            g = gcd(g, congruence_ideal(E, nL[i], h[i], ctx.S));
            if (g == 1) break;
        }
        if (g == 0)
            throw degeneracy_error("TorsionLift", std::to_string(n) + "L lies in H, the sequence degenerates");
        acc = lcm(acc, g);
    }
    return acc;
}

/// Whether nL reduces into H modulo p, computed entirely in E(F_p).
inline bool quotient_member_mod_p(const QuotientContext& ctx, long n, std::uint64_t p) {
    CurveFp Ep(ctx.spec.base, p);
    std::vector<PointFp> nL;
    for (const auto& P : ctx.spec.L) nL.push_back(Ep.mul(static_cast<long long>(n), reduce_point(Ep, P)));
    for (const auto& h : ctx.H) {
        bool eq = true;
        for (int i = 0; i < ctx.spec.m && eq; ++i) eq = reduce_point(Ep, h[i]) == nL[i];
        if (eq) return true;
    }
    return false;
}

inline DivSeqTerm c_n_quotient(const QuotientContext& ctx, long n, const FactorOptions& opts = {}) {
    if (n < 1) throw input_error("BadIndex", "n must be positive");
    DivSeqTerm t = make_term(n, quotient_support(ctx, n), opts);
    for (const auto& pp : t.factorization.factors) {
        if (!mpz_fits_ulong_p(pp.prime.get_mpz_t()) || pp.prime > Integer("9223372036854775807")) continue;
        if (!quotient_member_mod_p(ctx, n, pp.prime.get_ui()))
            throw invariant_error("CongruenceCheck", "prime " + pp.prime.get_str() + " reported for n=" +
                                                         std::to_string(n) + " fails the reduction check");
    }
    return t;
}

inline DivSeqTerm c_n_quotient(const QuotientAVSpec& spec, const PrimeSet& S, long n, const FactorOptions& opts = {}) {
    return c_n_quotient(QuotientContext(spec, S), n, opts);
}

// ---------------------------------------------------------------------------
// primitive divisors

/// Fill in the primes of each term that divide no earlier term.
inline std::vector<DivSeqTerm> primitive_report(std::vector<DivSeqTerm> terms) {
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (terms[i].n != static_cast<long>(terms.front().n + i))
            throw input_error("BadIndex", "terms must be indexed contiguously");
    PrimeSet seen;
    for (auto& t : terms) {
        t.primitive_primes = PrimeSet{};
        for (const auto& pp : t.factorization.factors)
            if (!seen.contains(pp.prime)) t.primitive_primes.insert(pp.prime);
        seen.merge(t.factorization.primes());
    }
    return terms;
}

}  // namespace avdiv
