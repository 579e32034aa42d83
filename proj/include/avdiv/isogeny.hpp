#pragma once

// Rational isogenies: kernel polynomials, Velu quotients, point images,
// isomorphisms over Q and duals.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "avdiv/curve_fp.hpp"
#include "avdiv/curve_q.hpp"
#include "avdiv/poly.hpp"
#include "avdiv/torsion.hpp"

namespace avdiv {

// ---------------------------------------------------------------------------
// admissible changes of variables

/// x = u^2 x' + r, y = u^3 y' + s u^2 x' + t. Sends a curve E to the curve E' in (x', y').
struct WeierstrassTransform {
    Rational u = 1, r = 0, s = 0, t = 0;

    static WeierstrassTransform identity() { return {}; }
    bool is_identity() const { return u == 1 && r == 0 && s == 0 && t == 0; }
    bool operator==(const WeierstrassTransform&) const = default;

    CurveQ apply(const CurveQ& E) const {
        const Rational &a1 = E.a1(), &a2 = E.a2(), &a3 = E.a3(), &a4 = E.a4(), &a6 = E.a6();
        const Rational u2 = u * u, u3 = u2 * u, u4 = u2 * u2, u6 = u3 * u3;
        return CurveQ((a1 + 2 * s) / u, (a2 - s * a1 + 3 * r - s * s) / u2, (a3 + r * a1 + 2 * t) / u3,
                      (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u4,
                      (a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1) / u6);
    }

    PointQ apply(const PointQ& P) const {
        if (P.infinite) return P;
        const Rational xr = P.x - r;
        return PointQ::affine(xr / (u * u), (P.y - s * xr - t) / (u * u * u));
    }

    /// Apply this, then `next`.
    WeierstrassTransform then(const WeierstrassTransform& next) const {
        return {u * next.u, r + u * u * next.r, s + u * next.s, t + u * u * s * next.r + u * u * u * next.t};
    }

    WeierstrassTransform inverse() const {
        return {1 / u, -r / (u * u), -s / u, (r * s - t) / (u * u * u)};
    }

    std::string to_string() const {
        return "(u=" + u.get_str() + ", r=" + r.get_str() + ", s=" + s.get_str() + ", t=" + t.get_str() + ")";
    }
};

/// The same transform reduced modulo p; empty when p divides a denominator or u.
struct TransformModP {
    std::uint64_t p = 0, uinv = 1, r = 0, s = 0, t = 0;

    static std::optional<TransformModP> make(const WeierstrassTransform& w, std::uint64_t p) {
        try {
            std::uint64_t u = modp::reduce(w.u, p);
            if (u == 0) return std::nullopt;
            return TransformModP{p, modp::inv(u, p), modp::reduce(w.r, p), modp::reduce(w.s, p),
                                 modp::reduce(w.t, p)};
        } catch (const Error&) {
            return std::nullopt;
        }
    }

    PointFp apply(const PointFp& P) const {
        if (P.infinite) return P;
        const std::uint64_t u2 = modp::mul(uinv, uinv, p), u3 = modp::mul(u2, uinv, p);
        const std::uint64_t xr = modp::sub(P.x, r, p);
        const std::uint64_t y = modp::sub(modp::sub(P.y, modp::mul(s, xr, p), p), t, p);
        return PointFp::affine(modp::mul(xr, u2, p), modp::mul(y, u3, p));
    }
};

/// y -> y + (a1 x + a3)/2, giving a model with a1 = a3 = 0 and the same x.
inline WeierstrassTransform to_zero_a1a3(const CurveQ& E) {
    return {1, 0, -E.a1() / 2, -E.a3() / 2};
}

/// Scaling x = x'/k^2, y = y'/k^3 with the smallest k making every coefficient integral.
inline WeierstrassTransform integral_scaling(const CurveQ& E) {
    Integer den = 1;
    for (const auto& a : E.ainvs()) den = lcm(den, Integer(a.get_den()));
    if (den == 1) return {};
    Integer k = 1;
    const std::array<int, 5> weight{1, 2, 3, 4, 6};
    for (const auto& pp : factor(den).factors) {
        unsigned need = 0;
        const auto ainvs = E.ainvs();
        for (std::size_t i = 0; i < ainvs.size(); ++i) {
            Integer d = ainvs[i].get_den();
            unsigned v = static_cast<unsigned>(mpz_remove(d.get_mpz_t(), d.get_mpz_t(), pp.prime.get_mpz_t()));
            need = std::max<unsigned>(need, (v + weight[i] - 1) / weight[i]);
        }
        Integer pe;
        mpz_pow_ui(pe.get_mpz_t(), pp.prime.get_mpz_t(), need);
        k *= pe;
    }
    return {Rational(1) / Rational(k), 0, 0, 0};
}

/// Transform to y^2 = x^3 - 27 c4 x - 54 c6.
inline WeierstrassTransform to_short_weierstrass(const CurveQ& E) {
    const Rational r = -E.b2() / 12;
    const Rational s = -E.a1() / 2;
    const Rational t = -(E.a1() * r + E.a3()) / 2;
    return {Rational(1, 6), r, s, t};
}

namespace detail {

inline std::optional<Rational> rational_root_k(const Rational& q, unsigned k) {
    if (q <= 0 && k % 2 == 0) return std::nullopt;
    Integer n = q.get_num(), d = q.get_den();
    Integer rn, rd;
    bool neg = n < 0;
    if (neg) n = -n;
    if (!mpz_root(rn.get_mpz_t(), n.get_mpz_t(), k)) return std::nullopt;
    if (!mpz_root(rd.get_mpz_t(), d.get_mpz_t(), k)) return std::nullopt;
    Rational out(neg ? Integer(-rn) : rn, rd);
    out.canonicalize();
    return out;
}

}  // namespace detail

/// A transform sending E1 onto E2 exactly, when the curves are isomorphic over Q.
inline std::optional<WeierstrassTransform> isomorphic_over_q(const CurveQ& E1, const CurveQ& E2) {
    if (E1.j_invariant() != E2.j_invariant()) return std::nullopt;
    const WeierstrassTransform t1 = to_short_weierstrass(E1), t2 = to_short_weierstrass(E2);
    const CurveQ S1 = t1.apply(E1), S2 = t2.apply(E2);
    const Rational &A1 = S1.a4(), &B1 = S1.a6(), &A2 = S2.a4(), &B2 = S2.a6();
    // x = u^2 x', y = u^3 y' sends (A, B) to (A/u^4, B/u^6)
    std::optional<Rational> u;
    if (A1 == 0) {
        u = detail::rational_root_k(B1 / B2, 6);
    } else if (B1 == 0) {
        u = detail::rational_root_k(A1 / A2, 4);
    } else {
        Rational u2 = (B1 / B2) * (A2 / A1);
        u = detail::rational_root_k(u2, 2);
    }
    if (!u) return std::nullopt;
    WeierstrassTransform scale{*u, 0, 0, 0};
    if (!(scale.apply(S1) == S2)) return std::nullopt;
    WeierstrassTransform out = t1.then(scale).then(t2.inverse());
    if (!(out.apply(E1) == E2)) throw invariant_error("IsomorphismCheck", "composed transform does not match");
    return out;
}

/// The automorphism [-1] of E as a transform.
inline WeierstrassTransform negation_transform(const CurveQ& E) { return {-1, 0, -E.a1(), -E.a3()}; }

// ---------------------------------------------------------------------------
// kernels

/// A finite subgroup described by the monic polynomial whose roots are the
/// x-coordinates of its nonzero points.
struct KernelSpec {
    CurveQ curve;
    PolyQ kernel_polynomial;
    std::uint64_t order = 1;
};

/// Order of a rational torsion point by repeated addition (Mazur: at most 12).
inline std::optional<std::uint64_t> small_torsion_order(const CurveQ& E, const PointQ& P) {
    PointQ acc = P;
    for (std::uint64_t n = 1; n <= 12; ++n) {
        if (acc.infinite) return n;
        acc = detail::add_unchecked(E, acc, P);
    }
    return std::nullopt;
}

/// Closure of rational torsion generators under the group law, sorted.
inline std::vector<PointQ> rational_subgroup(const CurveQ& E, const std::vector<PointQ>& generators,
                                            std::size_t size_bound = 4096) {
    for (const auto& g : generators) {
        require_on_curve(E, g);
        if (!small_torsion_order(E, g)) throw input_error("NotTorsion", g.to_string() + " has infinite order");
    }
    std::set<PointQ> group{PointQ::infinity()};
    std::vector<PointQ> frontier{PointQ::infinity()};
    while (!frontier.empty()) {
        std::vector<PointQ> next;
        for (const auto& P : frontier)
            for (const auto& g : generators) {
                PointQ R = detail::add_unchecked(E, P, g);
                if (group.insert(R).second) next.push_back(R);
                if (group.size() > size_bound) throw input_error("NotClosed", "subgroup exceeds the size bound");
            }
        frontier = std::move(next);
    }
    return {group.begin(), group.end()};
}

/// Kernel polynomial of the subgroup generated by rational torsion points.
inline KernelSpec kernel_from_subgroup(const CurveQ& E, const std::vector<PointQ>& generators) {
    std::vector<PointQ> group = rational_subgroup(E, generators);
    std::set<Rational> xs;
    for (const auto& P : group)
        if (!P.infinite) xs.insert(P.x);
    return {E, PolyQ::from_roots({xs.begin(), xs.end()}), group.size()};
}

/// Produces the reduction of a Galois-stable subgroup on the given reduced curve,
/// or nothing when the prime is unsuitable.
using SubgroupOracle = std::function<std::optional<std::vector<PointFp>>(const CurveFp&)>;

struct ReconstructionOptions {
    std::uint64_t aux_bound = kAuxPrimeBound;
    std::size_t max_primes = 64;
    std::size_t confirm_primes = 2;
};

namespace detail {

inline std::vector<std::uint64_t> kernel_poly_mod(const std::vector<PointFp>& group, std::uint64_t p) {
    std::set<std::uint64_t> xs;
    for (const auto& P : group)
        if (!P.infinite) xs.insert(P.x);
    std::vector<std::uint64_t> f{1};
    for (std::uint64_t x : xs) {
        std::vector<std::uint64_t> g(f.size() + 1, 0);
        for (std::size_t i = 0; i < f.size(); ++i) {
            g[i + 1] = modp::add(g[i + 1], f[i], p);
            g[i] = modp::sub(g[i], modp::mul(f[i], x, p), p);
        }
        f = std::move(g);
    }
    return f;
}

}  // namespace detail

/// Kernel polynomial of a subgroup of C[level] known only through its reductions.
/// Coefficients are recovered by CRT and rational reconstruction, then checked
/// by exact division into the level-torsion polynomial and at fresh primes.
inline KernelSpec kernel_from_reductions(const CurveQ& C, std::uint64_t level, const SubgroupOracle& oracle,
                                         const ReconstructionOptions& opts = {}) {
    const PolyQ torsion_poly = division_polynomial(C, static_cast<int>(level)).torsion_x_polynomial();
    std::optional<std::uint64_t> order;
    std::vector<Integer> residues;
    Integer modulus = 1;
    std::optional<PolyQ> previous, candidate;
    std::size_t used = 0, confirmed = 0;
    for (std::uint64_t p = 3; p <= opts.aux_bound; p += 2) {
        if (!is_prime(p) || level % p == 0) continue;
        if (level > 2 && p % level != 1) continue;
        std::optional<CurveFp> Cp;
        try {
            Cp.emplace(C, p);
        } catch (const Error&) {
            continue;
        }
        auto group = oracle(*Cp);
        if (!group) continue;
        const std::vector<std::uint64_t> f = detail::kernel_poly_mod(*group, p);
        if (!order) order = group->size();
        if (*order != group->size())
            throw invariant_error("NotClosed", "subgroup order differs between auxiliary primes");
        if (candidate) {
            if (reduce_mod(*candidate, p) != f) {
                candidate.reset();
                confirmed = 0;
            } else if (++confirmed >= opts.confirm_primes) {
                return {C, *candidate, *order};
            }
            continue;
        }
        if (residues.empty()) residues.assign(f.size(), 0);
        if (residues.size() != f.size())
            throw invariant_error("NotClosed", "kernel degree differs between auxiliary primes");
        // CRT step
        Integer P(static_cast<unsigned long>(p));
        Integer minv;
        mpz_invert(minv.get_mpz_t(), modulus.get_mpz_t(), P.get_mpz_t());
        for (std::size_t i = 0; i < f.size(); ++i) {
            Integer diff = (Integer(static_cast<unsigned long>(f[i])) - residues[i]) % P;
            Integer k = (diff * minv) % P;
            if (k < 0) k += P;
            residues[i] += modulus * k;
        }
        modulus *= P;
        if (++used > opts.max_primes) break;
        std::vector<Rational> coeffs;
        for (const auto& r : residues) {
            auto q = rational_reconstruct(r, modulus);
            if (!q) break;
            coeffs.push_back(*q);
        }
        if (coeffs.size() != residues.size()) continue;
        PolyQ g(coeffs);
        if (previous && *previous == g && g.leading() == 1 && divides(g, torsion_poly)) {
            candidate = g;
            confirmed = 0;
        }
        previous = g;
    }
    throw degeneracy_error("NoAuxPrime", "kernel polynomial reconstruction did not stabilize below " +
                                             std::to_string(opts.aux_bound));
}

// ---------------------------------------------------------------------------
// Velu quotients

struct Isogeny {
    CurveQ domain;
    CurveQ codomain;
    KernelSpec kernel;
    std::uint64_t degree = 1;

    // evaluation data: domain -> working model (a1 = a3 = 0) -> Velu model -> codomain
    WeierstrassTransform to_working;
    CurveQ working;
    PolyQ two_part;  ///< kernel roots that are 2-torsion
    PolyQ odd_part;  ///< the remaining kernel roots, one per pair +-Q
    WeierstrassTransform to_codomain;
};

namespace detail {

inline PolyQ mul_mod(const PolyQ& a, const PolyQ& b, const PolyQ& m) { return (a * b) % m; }

}  // namespace detail

/// Codomain and evaluation data by Velu's formulas. The codomain is rescaled to an
/// integral model unless `post` is supplied, in which case `post` is applied to the Velu model.
inline Isogeny velu_quotient(const KernelSpec& kernel, std::optional<WeierstrassTransform> post = std::nullopt) {
    const CurveQ& E = kernel.curve;
    const PolyQ D = kernel.kernel_polynomial.is_zero() ? PolyQ::constant(1) : kernel.kernel_polynomial.monic();
    Isogeny iso{E, E, kernel, 1, to_zero_a1a3(E), to_zero_a1a3(E).apply(E), PolyQ::constant(1), PolyQ::constant(1),
                {}};
    const CurveQ& W = iso.working;
    const PolyQ c = W.cubic();
    const PolyQ dc = c.derivative();
    iso.two_part = gcd(D, c);
    iso.odd_part = exact_div(D, iso.two_part);
    if (!(squarefree_part(D) == D)) throw input_error("SingularResult", "kernel polynomial is not squarefree");
    iso.degree = 1 + static_cast<std::uint64_t>(std::max(0, iso.two_part.degree())) +
                 2 * static_cast<std::uint64_t>(std::max(0, iso.odd_part.degree()));
    if (kernel.order != iso.degree)
        throw input_error("SingularResult", "kernel polynomial degree does not match the subgroup order");
    const PolyQ t = PolyQ::x();
    const PolyQ& D2 = iso.two_part;
    const PolyQ& Dn = iso.odd_part;
    Rational v = trace_over_roots(dc, D2) + trace_over_roots(Rational(2) * dc, Dn);
    Rational w = trace_over_roots(t * dc, D2) + trace_over_roots(Rational(4) * c + Rational(2) * t * dc, Dn);
    const Rational b2 = 4 * W.a2();
    std::optional<CurveQ> velu;
    try {
        velu.emplace(0, W.a2(), 0, W.a4() - 5 * v, W.a6() - b2 * v - 7 * w);
    } catch (const Error&) {
        throw input_error("SingularResult", "Velu codomain is singular; the kernel is not a subgroup");
    }
    iso.to_codomain = post ? *post : integral_scaling(*velu);
    iso.codomain = iso.to_codomain.apply(*velu);
    return iso;
}

/// Image of a rational point.
inline PointQ evaluate(const Isogeny& iso, const PointQ& P) {
    require_on_curve(iso.domain, P);
    if (P.infinite) return P;
    const PointQ Pw = iso.to_working.apply(P);
    const PolyQ D = iso.two_part * iso.odd_part;
    if (D(Pw.x) == 0) return PointQ::infinity();
    const PolyQ c = iso.working.cubic();
    const PolyQ dc = c.derivative();
    const PolyQ t = PolyQ::x();
    Rational X = Pw.x, Yfac = 1;
    auto accumulate = [&](const PolyQ& d, const PolyQ& vq, const PolyQ& uq) {
        if (d.degree() <= 0) return;
        const PolyQ i1 = inverse_of_shift(Pw.x, d);
        const PolyQ i2 = detail::mul_mod(i1, i1, d);
        const PolyQ i3 = detail::mul_mod(i2, i1, d);
        X += trace_over_roots(detail::mul_mod(vq, i1, d), d) + trace_over_roots(detail::mul_mod(uq, i2, d), d);
        Yfac -= trace_over_roots(detail::mul_mod(vq, i2, d), d) +
                trace_over_roots(detail::mul_mod(Rational(2) * uq, i3, d), d);
    };
    accumulate(iso.two_part, dc, PolyQ{});
    accumulate(iso.odd_part, Rational(2) * dc, Rational(4) * c);
    return iso.to_codomain.apply(PointQ::affine(X, Pw.y * Yfac));
}

/// Isogeny evaluation modulo p, usable on points that are not rational.
class IsogenyModP {
public:
    /// Requires every kernel x-root to lie in F_p; empty otherwise.
    static std::optional<IsogenyModP> make(const Isogeny& iso, std::uint64_t p) {
        IsogenyModP out;
        out.p_ = p;
        try {
            out.domain_.emplace(iso.domain, p);
            out.codomain_.emplace(iso.codomain, p);
        } catch (const Error&) {
            return std::nullopt;
        }
        auto pre = TransformModP::make(iso.to_working, p);
        auto post = TransformModP::make(iso.to_codomain, p);
        if (!pre || !post) return std::nullopt;
        out.pre_ = *pre;
        out.post_ = *post;
        try {
            const PolyModP c = reduce_mod(iso.working.cubic(), p);
            const PolyModP dc = derivative_mod(c, p);
            auto r2 = roots_mod(reduce_mod(iso.two_part, p), p);
            auto rn = roots_mod(reduce_mod(iso.odd_part, p), p);
            if (static_cast<int>(r2.size()) != std::max(0, iso.two_part.degree()) ||
                static_cast<int>(rn.size()) != std::max(0, iso.odd_part.degree()))
                return std::nullopt;
            for (auto th : r2) out.roots_.push_back({th, eval_mod(dc, th, p), 0});
            for (auto th : rn)
                out.roots_.push_back({th, modp::mul(2, eval_mod(dc, th, p), p), modp::mul(4, eval_mod(c, th, p), p)});
        } catch (const Error&) {
            return std::nullopt;
        }
        return out;
    }

    std::uint64_t p() const { return p_; }
    const CurveFp& domain() const { return *domain_; }
    const CurveFp& codomain() const { return *codomain_; }

    PointFp operator()(const PointFp& P) const {
        if (P.infinite) return P;
        const std::uint64_t p = p_;
        const PointFp Pw = pre_.apply(P);
        std::uint64_t X = Pw.x, Yfac = 1;
        for (const auto& r : roots_) {
            const std::uint64_t diff = modp::sub(Pw.x, r.theta, p);
            if (diff == 0) return PointFp::infinity();
            const std::uint64_t i1 = modp::inv(diff, p), i2 = modp::mul(i1, i1, p), i3 = modp::mul(i2, i1, p);
            X = modp::add(X, modp::add(modp::mul(r.v, i1, p), modp::mul(r.u, i2, p), p), p);
            Yfac = modp::sub(Yfac, modp::add(modp::mul(r.v, i2, p), modp::mul(modp::mul(2, r.u, p), i3, p), p), p);
        }
        return post_.apply(PointFp::affine(X, modp::mul(Pw.y, Yfac, p)));
    }

private:
    struct Root {
        std::uint64_t theta, v, u;
    };
    std::uint64_t p_ = 0;
    std::optional<CurveFp> domain_, codomain_;
    TransformModP pre_, post_;
    std::vector<Root> roots_;
};

/// The isogeny in the other direction whose composite with `iso` is multiplication
/// by the degree. Built as the Velu quotient of the codomain by the image of E[deg]
/// and identified with the original domain over Q.
inline Isogeny dual_isogeny(const Isogeny& iso, const ReconstructionOptions& opts = {}) {
    const std::uint64_t n = iso.degree;
    if (n == 1) {
        auto back = isomorphic_over_q(iso.codomain, iso.domain);
        if (!back) throw invariant_error("DualIsogeny", "degree one isogeny is not an isomorphism");
        return velu_quotient(KernelSpec{iso.codomain, PolyQ::constant(1), 1}, back);
    }
    SubgroupOracle oracle = [&](const CurveFp& Cp) -> std::optional<std::vector<PointFp>> {
        auto map = IsogenyModP::make(iso, Cp.p());
        if (!map) return std::nullopt;
        if (group_order(map->domain()) % (n * n) != 0) return std::nullopt;
        auto tors = torsion_points(map->domain(), n);
        if (tors.size() != n * n) return std::nullopt;
        std::set<PointFp> image;
        for (const auto& V : tors) image.insert((*map)(V));
        return std::vector<PointFp>(image.begin(), image.end());
    };
    KernelSpec k = kernel_from_reductions(iso.codomain, n, oracle, opts);
    Isogeny raw = velu_quotient(k);
    auto back = isomorphic_over_q(raw.codomain, iso.domain);
    if (!back) throw invariant_error("DualIsogeny", "quotient of the codomain is not isomorphic to the domain");
    // fix the sign on one point of infinite order, or on torsion points otherwise
    Isogeny dual = velu_quotient(k, raw.to_codomain.then(*back));
    auto check = [&](const Isogeny& cand) {
        for (long x = -50; x <= 50; ++x)
            for (const auto& P : points_with_x(iso.domain, x)) {
                PointQ img = evaluate(cand, evaluate(iso, P));
                if (!(img == scalar_mul(iso.domain, static_cast<long long>(n), P))) return false;
            }
        return true;
    };
    if (check(dual)) return dual;
    Isogeny flipped = velu_quotient(k, raw.to_codomain.then(*back).then(negation_transform(iso.domain)));
    if (check(flipped)) return flipped;
    throw invariant_error("DualIsogeny", "no sign choice composes to multiplication by the degree");
}

}  // namespace avdiv
