#pragma once

// From a point on E^m/H to an elliptic divisibility sequence: the period n1 = u d,
// the quotient curve E0 = E/G0 and the point Q0 with
//   C_n(A, P, S) = 1 when n1 does not divide n, and C_{n/n1}(E0, Q0, S) otherwise.

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "avdiv/isogeny.hpp"
#include "avdiv/seqlib.hpp"
#include "avdiv/torsion.hpp"

namespace avdiv {

// ---------------------------------------------------------------------------
// rank-one decomposition

/// Q_i = a_i R + T_i with gcd(a) = 1, U = sum b_i Q_i and u = lcm ord(Q_j - a_j U).
struct RankOneDecomposition {
    PointQ R;
    std::vector<long> a;
    std::vector<PointQ> T;
    std::vector<long> b;
    PointQ U;
    std::uint64_t u = 1;
};

namespace detail {

inline long gcd_of(const std::vector<long>& a) {
    long g = 0;
    for (long v : a) g = std::gcd(g, v);
    return g;
}

/// Bezout coefficients by folding extended gcds from the left: sum a_i b_i = gcd(a).
inline std::vector<long> bezout(const std::vector<long>& a) {
    std::vector<long> b(a.size(), 0);
    if (a.empty()) return b;
    Integer g = a[0];
    b[0] = 1;
    for (std::size_t i = 1; i < a.size(); ++i) {
        Integer g2, s, t, ai(a[i]);
        mpz_gcdext(g2.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(), ai.get_mpz_t());
        for (std::size_t j = 0; j < i; ++j) b[j] *= s.get_si();
        b[i] = t.get_si();
        g = g2;
    }
    if (g < 0)
        for (auto& v : b) v = -v;
    return b;
}

inline PointQ combination(const CurveQ& E, const std::vector<long>& coeffs, const std::vector<PointQ>& pts) {
    PointQ acc = PointQ::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) acc = add_unchecked(E, acc, mul_unchecked(E, coeffs[i], pts[i]));
    return acc;
}

inline std::uint64_t order_or_throw(const CurveQ& E, const PointQ& P, const char* what) {
    auto o = torsion_order(E, P);
    if (!o) throw invariant_error("NotTorsion", std::string(what) + " " + P.to_string() + " has infinite order");
    return *o;
}

}  // namespace detail

/// Checks every invariant of the decomposition; throws GcdNotOne when gcd(a) != 1.
inline bool verify_decomposition(const CurveQ& E, const std::vector<PointQ>& Q, const RankOneDecomposition& dec) {
    for (const auto& P : Q) require_on_curve(E, P);
    if (Q.size() != dec.a.size() || Q.size() != dec.T.size() || Q.size() != dec.b.size()) return false;
    if (std::abs(detail::gcd_of(dec.a)) != 1) throw input_error("GcdNotOne", "the coefficients a_i are not coprime");
    if (dec.R.infinite || is_torsion(E, dec.R)) return false;
    long dot = 0;
    for (std::size_t i = 0; i < Q.size(); ++i) dot += dec.a[i] * dec.b[i];
    if (dot != 1) return false;
    for (std::size_t i = 0; i < Q.size(); ++i) {
        if (!on_curve(E, dec.T[i]) || !is_torsion(E, dec.T[i])) return false;
        if (!(Q[i] == detail::add_unchecked(E, detail::mul_unchecked(E, dec.a[i], dec.R), dec.T[i]))) return false;
    }
    if (!(dec.U == detail::combination(E, dec.b, Q))) return false;
    std::uint64_t u = 1;
    for (std::size_t j = 0; j < Q.size(); ++j) {
        auto o = torsion_order(E, detail::add_unchecked(E, Q[j], detail::negate_unchecked(E, detail::mul_unchecked(E, dec.a[j], dec.U))));
        if (!o) return false;
        u = std::lcm(u, *o);
    }
    return u == dec.u;
}

/// Completes a decomposition once the multipliers a are known.
inline RankOneDecomposition assemble_decomposition(const CurveQ& E, const std::vector<PointQ>& Q, const PointQ& R,
                                                   std::vector<long> a) {
    long g = detail::gcd_of(a);
    if (std::abs(g) != 1) throw input_error("GcdNotOne", "the coefficients a_i are not coprime");
    RankOneDecomposition dec;
    dec.R = R;
    dec.a = std::move(a);
    dec.b = detail::bezout(dec.a);
    for (std::size_t i = 0; i < Q.size(); ++i)
        dec.T.push_back(detail::add_unchecked(E, Q[i], detail::negate_unchecked(E, detail::mul_unchecked(E, dec.a[i], R))));
    dec.U = detail::combination(E, dec.b, Q);
    dec.u = 1;
    for (std::size_t j = 0; j < Q.size(); ++j) {
        PointQ dev = detail::add_unchecked(E, Q[j], detail::negate_unchecked(E, detail::mul_unchecked(E, dec.a[j], dec.U)));
        dec.u = std::lcm(dec.u, detail::order_or_throw(E, dev, "deviation"));
    }
    return dec;
}

/// Finds a_i with Q_i - a_i R torsion, guessing |a_i| from canonical height ratios.
inline RankOneDecomposition decompose_from_hints(const CurveQ& E, const std::vector<PointQ>& Q, const PointQ& R,
                                                 long bound = 64) {
    require_on_curve(E, R);
    for (const auto& P : Q) require_on_curve(E, P);
    if (R.infinite || is_torsion(E, R)) throw input_error("TorsionInput", "R must have infinite order");
    const double hR = height_estimate(E, R).value;
    std::vector<long> a;
    for (const auto& P : Q) {
        std::optional<long> found;
        if (is_torsion(E, P)) {
            found = 0;
        } else {
            const double ratio = std::sqrt(height_estimate(E, P).value / hR);
            const long guess = std::lround(ratio);
            std::vector<long> tries;
            for (long delta : {0L, -1L, 1L, -2L, 2L})
                if (guess + delta >= 1) tries.push_back(guess + delta);
            for (long k = 1; k <= bound; ++k) tries.push_back(k);
            for (long k : tries) {
                if (k > bound) continue;
                for (long s : {k, -k}) {
                    PointQ dev = detail::add_unchecked(E, P, detail::negate_unchecked(E, detail::mul_unchecked(E, s, R)));
                    if (dev.infinite || is_torsion(E, dev)) {
                        found = s;
                        break;
                    }
                }
                if (found) break;
            }
        }
        if (!found)
            throw degeneracy_error("DecompositionFailed", P.to_string() + " is not a multiple of " + R.to_string() +
                                                              " up to torsion with |a| <= " + std::to_string(bound));
        a.push_back(*found);
    }
    return assemble_decomposition(E, Q, R, std::move(a));
}

/// Tries each non-torsion component as R.
inline RankOneDecomposition decompose(const CurveQ& E, const std::vector<PointQ>& Q,
                                      const std::optional<PointQ>& hint = std::nullopt) {
    if (hint) return decompose_from_hints(E, Q, *hint);
    std::vector<PointQ> candidates;
    for (const auto& P : Q)
        if (!P.infinite && !is_torsion(E, P)) candidates.push_back(P);
    // smallest height first: it is the most likely generator
    std::sort(candidates.begin(), candidates.end(), [&](const PointQ& x, const PointQ& y) {
        return height_estimate(E, x, 3).value < height_estimate(E, y, 3).value;
    });
    std::string last;
    for (const auto& R : candidates) {
        try {
            return decompose_from_hints(E, Q, R);
        } catch (const Error& e) {
            last = e.what();
        }
    }
    throw degeneracy_error("DecompositionFailed",
                           candidates.empty() ? "every component of the lift is torsion" : "no component generates: " + last);
}

// ---------------------------------------------------------------------------
// the sets G_n

/// G_n = {V : (a_i V + n Z_i)_i in H}, computed inside E[Lambda] at an auxiliary prime.
class GnOracle {
public:
    GnOracle(const CurveQ& E, const std::vector<PointTuple>& H, std::vector<long> a, std::vector<PointQ> Z,
             std::uint64_t Lambda, std::uint64_t p)
        : Ep_(E, p), a_(std::move(a)), Lambda_(Lambda) {
        for (const auto& h : H) {
            std::vector<PointFp> r;
            for (const auto& P : h) r.push_back(reduce_point(Ep_, P));
            H_.insert(r);
        }
        for (const auto& P : Z) Z_.push_back(reduce_point(Ep_, P));
        torsion_ = torsion_points(Ep_, Lambda);
        if (torsion_.size() != Lambda * Lambda)
            throw invariant_error("NoAuxPrime", "auxiliary prime lacks full torsion");
    }

    std::uint64_t p() const { return Ep_.p(); }
    const CurveFp& curve() const { return Ep_; }
    const std::vector<PointFp>& torsion() const { return torsion_; }

    bool in_H(const std::vector<PointFp>& t) const { return H_.count(t) != 0; }

    std::vector<PointFp> gn(long n) const {
        std::vector<PointFp> nZ;
        for (const auto& z : Z_) nZ.push_back(Ep_.mul(static_cast<long long>(n), z));
        std::vector<PointFp> out;
        for (const auto& V : torsion_) {
            std::vector<PointFp> t;
            for (std::size_t i = 0; i < a_.size(); ++i)
                t.push_back(Ep_.add(Ep_.mul(static_cast<long long>(a_[i]), V), nZ[i]));
            if (in_H(t)) out.push_back(V);
        }
        return out;
    }

    /// Whether (a_i V)_i lies in H for every V in E[k].
    bool scaled_diagonal_in_H(std::uint64_t k) const {
        for (const auto& V : torsion_) {
            if (!Ep_.mul(k, V).infinite) continue;
            std::vector<PointFp> t;
            for (long ai : a_) t.push_back(Ep_.mul(static_cast<long long>(ai), V));
            if (!in_H(t)) return false;
        }
        return true;
    }

private:
    CurveFp Ep_;
    std::vector<long> a_;
    std::uint64_t Lambda_;
    std::set<std::vector<PointFp>> H_;
    std::vector<PointFp> Z_;
    std::vector<PointFp> torsion_;
};

struct GnAnalysis {
    std::uint64_t Lambda = 1;           ///< N * lcm ord(Z_i)
    std::uint64_t t = 1;                ///< lcm ord(Z_i)
    std::vector<PointQ> Z;
    std::vector<long> a;
    long d = 0;
    std::uint64_t G0_size = 1;
    std::map<long, std::size_t> sizes;  ///< #G_n for n = 0..t and n = kd, k <= 4
    std::uint64_t aux_prime = 0;
    PointFp witness;                    ///< an element V_d of G_d modulo aux_prime
};

/// Odd good primes with full Lambda-torsion, avoiding the given set.
inline std::vector<std::uint64_t> auxiliary_primes(const CurveQ& E, std::uint64_t Lambda, std::size_t count,
                                                   std::uint64_t bound, const PrimeSet& avoid) {
    auto ps = find_full_torsion_primes(E, Lambda, count, bound, avoid);
    if (ps.size() < count)
        throw degeneracy_error("NoAuxPrime", "fewer than " + std::to_string(count) + " primes up to " +
                                                 std::to_string(bound) + " have full " + std::to_string(Lambda) +
                                                 "-torsion");
    return ps;
}

inline std::vector<PointFp> compute_gn(const GnOracle& oracle, long n) { return oracle.gn(n); }

inline long compute_d(const GnOracle& oracle, std::uint64_t t) {
    for (long n = 1; n <= static_cast<long>(t); ++n)
        if (!oracle.gn(n).empty()) return n;
    throw invariant_error("GnPeriod", "G_t is empty although it contains O");
}

inline GnAnalysis analyze_gn(const GnOracle& oracle, std::vector<long> a, std::vector<PointQ> Z, std::uint64_t t) {
    GnAnalysis g;
    g.a = std::move(a);
    g.Z = std::move(Z);
    g.t = t;
    g.aux_prime = oracle.p();
    g.Lambda = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(oracle.torsion().size())) + 0.5);
    for (long n = 0; n <= static_cast<long>(t); ++n) g.sizes[n] = oracle.gn(n).size();
    g.G0_size = g.sizes[0];
    g.d = compute_d(oracle, t);
    for (long k = 1; k <= 4; ++k)
        if (!g.sizes.count(k * g.d)) g.sizes[k * g.d] = oracle.gn(k * g.d).size();
    g.witness = oracle.gn(g.d).front();
    return g;
}

// ---------------------------------------------------------------------------
// pipeline

struct PipelineOptions {
    long validate_up_to = 12;
    std::uint64_t aux_bound = kAuxPrimeBound;
    std::optional<PointQ> R_hint;
    FactorOptions factor;                  ///< for rendering report terms
    std::uint64_t report_budget = 200'000; ///< rho iterations per rendered check term
    unsigned jobs = 1;
    PrimeSet extra_S;
};

struct PipelineCheck {
    long n = 0;
    std::string lhs, rhs;
    bool exact = true;  ///< lhs/rhs are full radicals rather than support generators
    bool ok = false;
};

struct PipelineResult {
    explicit PipelineResult(Isogeny iso) : E0(iso.codomain), psi(std::move(iso)) {}

    std::uint64_t n1 = 1;
    std::uint64_t u = 1;
    long d = 1;
    std::uint64_t N = 1;
    CurveQ E0;
    PointQ Q0;
    PrimeSet S_auto;
    long verified_up_to = 0;
    std::vector<PipelineCheck> checks;
    RankOneDecomposition decomposition;
    PointQ U_lift;  ///< sum b_i L_i
    GnAnalysis gn;
    Isogeny psi;  ///< E -> E0
    std::string q0_source;  ///< which candidate validated
};

namespace detail {

template <class F>
void parallel_for(long lo, long hi, unsigned jobs, F&& f) {
    if (jobs <= 1 || hi - lo < 2) {
        for (long i = lo; i <= hi; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<long> next{lo};
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned j = 0; j < jobs; ++j)
        pool.emplace_back([&] {
            for (long i = next++; i <= hi; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline std::string render_support(const Integer& g, std::uint64_t budget, const FactorOptions& base, bool& exact) {
    FactorOptions opts = base;
    opts.budget = budget;
    try {
        return radical_factorization(g, {}, opts).to_string();
    } catch (const FactorTimeout&) {
        exact = false;
        return "support:" + g.get_str();
    }
}

}  // namespace detail

/// Kernel of G0 = {V : (a_i V)_i in H}, inside E[N].
inline KernelSpec kernel_of_G0(const QuotientContext& ctx, const std::vector<long>& a, std::uint64_t expected_order,
                               const PipelineOptions& opts) {
    const CurveQ& E = ctx.spec.base;
    const std::set<PointTuple> Hset(ctx.H.begin(), ctx.H.end());
    // rational members first
    std::vector<PointQ> rational;
    for (const auto& V : rational_torsion_points(E, static_cast<int>(ctx.N))) {
        PointTuple t;
        for (long ai : a) t.push_back(detail::mul_unchecked(E, ai, V));
        if (Hset.count(t)) rational.push_back(V);
    }
    if (rational.size() == expected_order) return kernel_from_subgroup(E, rational);
    std::vector<std::vector<PointFp>> Hred;
    SubgroupOracle oracle = [&](const CurveFp& Ep) -> std::optional<std::vector<PointFp>> {
        if (ctx.S.contains(Integer(static_cast<unsigned long>(Ep.p())))) return std::nullopt;
        if (group_order(Ep) % (ctx.N * ctx.N) != 0) return std::nullopt;
        auto tors = torsion_points(Ep, ctx.N);
        if (tors.size() != ctx.N * ctx.N) return std::nullopt;
        std::set<std::vector<PointFp>> H;
        for (const auto& h : ctx.H) {
            std::vector<PointFp> r;
            for (const auto& P : h) r.push_back(reduce_point(Ep, P));
            H.insert(r);
        }
        std::vector<PointFp> out;
        for (const auto& V : tors) {
            std::vector<PointFp> t;
            for (long ai : a) t.push_back(Ep.mul(static_cast<long long>(ai), V));
            if (H.count(t)) out.push_back(V);
        }
        return out;
    };
    ReconstructionOptions ro;
    ro.aux_bound = opts.aux_bound;
    KernelSpec k = kernel_from_reductions(E, ctx.N, oracle, ro);
    if (k.order != expected_order) throw invariant_error("KernelOrder", "G0 order differs between auxiliary primes");
    return k;
}

/// E0 = E/G0 and Q0, validated against the quotient sequence.
inline PipelineResult pipeline(const QuotientAVSpec& spec, const PipelineOptions& opts = {}) {
    const QuotientContext base_ctx(spec, opts.extra_S);
    const CurveQ& E = spec.base;
    const std::uint64_t N = base_ctx.N;

    // decomposition on the lift side, cross-checked against the downstairs points N L_i
    RankOneDecomposition dec = decompose(E, spec.L, opts.R_hint);
    const std::vector<long> a = dec.a;
    const PointQ U_lift = dec.U;
    std::vector<PointQ> dev;
    std::uint64_t u = 1;
    for (int i = 0; i < spec.m; ++i) {
        dev.push_back(detail::add_unchecked(E, spec.L[i],
                                            detail::negate_unchecked(E, detail::mul_unchecked(E, a[i], U_lift))));
        u = std::lcm(u, detail::order_or_throw(E, detail::mul_unchecked(E, static_cast<long long>(N), dev.back()),
                                               "deviation"));
    }
    {
        std::vector<PointQ> downstairs;
        for (const auto& P : spec.L) downstairs.push_back(detail::mul_unchecked(E, static_cast<long long>(N), P));
        const PointQ RA = detail::mul_unchecked(E, static_cast<long long>(N), dec.R);
        RankOneDecomposition route_a = assemble_decomposition(E, downstairs, RA, a);
        if (route_a.u != u)
            throw invariant_error("TorsionPeriod", "u from the downstairs points (" + std::to_string(route_a.u) +
                                                       ") differs from the lift side (" + std::to_string(u) + ")");
    }
    std::vector<PointQ> Z;
    std::uint64_t t = 1;
    for (const auto& D : dev) {
        Z.push_back(detail::mul_unchecked(E, static_cast<long long>(u), D));
        t = std::lcm(t, detail::order_or_throw(E, Z.back(), "Z component"));
    }
    const std::uint64_t Lambda = N * t;

    // S: bad primes, 2, primes dividing N and u
    PrimeSet S = base_ctx.S;
    S.merge(factor(Integer(static_cast<unsigned long>(u))).primes());

    const std::uint64_t p = auxiliary_primes(E, Lambda, 1, opts.aux_bound, S).front();
    const GnOracle oracle(E, base_ctx.H, a, Z, Lambda, p);
    GnAnalysis gn = analyze_gn(oracle, a, Z, t);

    // E0 = E / G0
    PipelineResult res(velu_quotient(kernel_of_G0(base_ctx, a, gn.G0_size, opts)));
    res.N = N;
    res.u = u;
    res.decomposition = std::move(dec);
    res.U_lift = U_lift;
    res.gn = std::move(gn);
    res.d = res.gn.d;
    res.n1 = u * static_cast<std::uint64_t>(res.d);
    S.merge(bad_primes(res.E0));
    res.S_auto = S;
    QuotientContext ctx = base_ctx;
    ctx.S = S;

    // tau = psi(V_d) is rational: G_d is a coset of G0 stable under Galois
    const PointQ base_point = evaluate(res.psi, detail::mul_unchecked(E, static_cast<long long>(res.n1), res.U_lift));
    std::vector<PointQ> torsion0 = rational_torsion_points(res.E0, static_cast<int>(Lambda));
    std::optional<PointQ> tau;
    if (auto map = IsogenyModP::make(res.psi, p)) {
        const PointFp image = (*map)(res.gn.witness);
        for (const auto& T : torsion0)
            if (reduce_point(map->codomain(), T) == image) tau = T;
    }
    std::vector<std::pair<PointQ, std::string>> candidates;
    if (tau) candidates.push_back({detail::add_unchecked(res.E0, base_point, detail::negate_unchecked(res.E0, *tau)),
                                   "psi(n1 U) - psi(V_d)"});
    for (const auto& T : rational_torsion_points(res.E0, static_cast<int>(2 * Lambda)))
        candidates.push_back({detail::add_unchecked(res.E0, base_point, T), "psi(n1 U) + " + T.to_string()});
    for (const auto& P : preimage_points(res.E0, static_cast<int>(res.n1), base_point))
        candidates.push_back({P, "n1-division point " + P.to_string()});

    // quotient side supports for n <= validate
    const long V = opts.validate_up_to;
    std::vector<Integer> lhs(V + 1);
    detail::parallel_for(1, V, opts.jobs, [&](long n) { lhs[n] = quotient_support(ctx, n); });
    for (long n = 1; n <= V; ++n)
        if (n % static_cast<long>(res.n1) != 0 && lhs[n] != 1)
            throw invariant_error("PeriodCheck", "C_" + std::to_string(n) + " is not 1 although n1 = " +
                                                     std::to_string(res.n1) + " does not divide n");

    std::optional<std::size_t> chosen;
    std::vector<Integer> rhs(V + 1, Integer(1));
    for (std::size_t c = 0; c < candidates.size() && !chosen; ++c) {
        const PointQ& Q0 = candidates[c].first;
        if (Q0.infinite || is_torsion(res.E0, Q0)) continue;
        bool ok = true;
        for (long n = res.n1; n <= V && ok; n += res.n1) {
            rhs[n] = elliptic_support(res.E0, Q0, S, n / static_cast<long>(res.n1));
            ok = same_support(lhs[n], rhs[n]);
        }
        if (ok) chosen = c;
    }
    if (!chosen)
        throw degeneracy_error("NoRationalQ0", "no rational candidate for Q0 reproduces the sequence up to n = " +
                                                   std::to_string(V) + " (" + std::to_string(candidates.size()) +
                                                   " candidates tried)");
    res.Q0 = candidates[*chosen].first;
    res.q0_source = candidates[*chosen].second;
    res.verified_up_to = V;

    res.checks.resize(V);
    detail::parallel_for(1, V, opts.jobs, [&](long n) {
        PipelineCheck& c = res.checks[n - 1];
        c.n = n;
        c.lhs = detail::render_support(lhs[n], opts.report_budget, opts.factor, c.exact);
        c.rhs = n % static_cast<long>(res.n1) ? std::string("1")
                                               : detail::render_support(rhs[n], opts.report_budget, opts.factor, c.exact);
        c.ok = n % static_cast<long>(res.n1) ? lhs[n] == 1 : same_support(lhs[n], rhs[n]);
    });
    return res;
}

// ---------------------------------------------------------------------------
// primitive divisors

struct PrimitiveCriterion {
    bool has_primitive_divisors = false;  ///< n1 == 1
    bool deviations_vanish = false;       ///< u == 1
    bool g1_nonempty = false;             ///< d == 1
    bool scaled_diagonal_in_kernel = false;  ///< (a_i V) in H for all V in E[N]
    bool z_in_kernel = false;                ///< (Z_i) in H
};

/// n1 == 1, with the two kernel conditions evaluated at the auxiliary prime and
/// checked against the emptiness of G_1.
inline PrimitiveCriterion primitive_criterion(const QuotientAVSpec& spec, const PipelineResult& res,
                                              const PipelineOptions& opts = {}) {
    const QuotientContext ctx(spec, opts.extra_S);
    const GnOracle oracle(spec.base, ctx.H, res.gn.a, res.gn.Z, res.gn.Lambda, res.gn.aux_prime);
    PrimitiveCriterion pc;
    pc.deviations_vanish = res.u == 1;
    pc.g1_nonempty = !oracle.gn(1).empty();
    pc.scaled_diagonal_in_kernel = oracle.scaled_diagonal_in_H(res.N);
    std::vector<PointFp> z;
    for (const auto& P : res.gn.Z) z.push_back(reduce_point(oracle.curve(), P));
    pc.z_in_kernel = oracle.in_H(z);
    pc.has_primitive_divisors = pc.deviations_vanish && pc.g1_nonempty;
    if (pc.has_primitive_divisors != (res.n1 == 1))
        throw invariant_error("CriterionCheck", "u = 1 and G_1 nonempty disagree with n1 = 1");
    if (pc.z_in_kernel && !pc.g1_nonempty) throw invariant_error("CriterionCheck", "O should lie in G_1");
    if (res.gn.t != 0 && res.N % res.gn.t == 0 && pc.scaled_diagonal_in_kernel && !pc.z_in_kernel && pc.g1_nonempty)
        throw invariant_error("CriterionCheck", "G_1 is nonempty although both kernel conditions hold");
    return pc;
}

}  // namespace avdiv
