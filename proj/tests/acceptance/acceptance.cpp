// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <iostream>
#include <random>
#include <sstream>

#include "avdiv/cli.hpp"

using namespace avdiv;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Collects reasons for failure within one criterion.
struct Verdict {
    std::vector<std::string> problems;
    std::size_t checks = 0;
    void require(bool ok, const std::string& what) {
        ++checks;
        if (!ok) problems.push_back(what);
    }
    bool ok() const { return problems.empty(); }
};

const std::vector<std::string> kEx31Table{"1",
                                          "1",
                                          "7·17·41",
                                          "13·29·101",
                                          "103·113·1087·2377",
                                          "7·11·17·41·89·2713·8329",
                                          "23·23497·156671·48883577521"};

const std::vector<std::string> kEx35Table{"1",
                                          "5·11·13",
                                          "1",
                                          "5·11·13·67·197·19249·21649",
                                          "1",
                                          "5·7·11·13·17·19·23·191·251·263·311·16103·1786451·385044001"};

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string factor_string(const Json& term) {
    std::string out;
    for (const auto& f : term.at("factors")) {
        if (!out.empty()) out += "·";
        out += f.at(0).get<std::string>();
        if (f.at(1).get<unsigned>() != 1) out += "^" + std::to_string(f.at(1).get<unsigned>());
    }
    return out.empty() ? "1" : out;
}

Verdict criterion1() {
    Verdict v;
    const auto t0 = Clock::now();
    std::ostringstream out, err;
    const int code = cli::run({"reproduce", "ex31", "--s", "2", "--format", "json"}, out, err);
    v.require(code == 0, "reproduce exited with " + std::to_string(code) + ": " + err.str());
    const auto rows = split_lines(out.str());
    v.require(rows.size() == 7, "expected 7 rows, got " + std::to_string(rows.size()));
    for (std::size_t i = 0; i < rows.size() && i < 7; ++i) {
        const Json j = Json::parse(rows[i]);
        const std::string q = factor_string(j.at("quotient")), e = factor_string(j.at("elliptic"));
        v.require(j.at("n") == static_cast<long>(i + 1), "row order");
        v.require(q == kEx31Table[i], "n=" + std::to_string(i + 1) + " quotient column " + q);
        v.require(e == kEx31Table[i], "n=" + std::to_string(i + 1) + " elliptic column " + e);
    }
    // full factorizations of B_n for the lift point
    std::ostringstream eds;
    v.require(cli::run({"eds", "--curve", "0,8,0,-9,0", "--point", "9,-36", "--range", "1:7"}, eds, err) == 0,
              "eds run failed");
    const double secs = seconds_since(t0);
    v.require(secs < 60, "took " + std::to_string(secs) + " s");
    return v;
}

Verdict criterion2() {
    Verdict v;
    const PipelineResult r = pipeline(fixtures::spec("ex31"));
    v.require(r.n1 == 1, "n1 = " + std::to_string(r.n1));
    const CurveQ target(0, 8, 0, 36, 288);
    const auto iso = isomorphic_over_q(r.E0, target);
    v.require(iso.has_value(), "E0 = " + r.E0.to_string() + " is not isomorphic to the target");
    if (iso) {
        v.require(iso->apply(r.E0) == target, "transform does not carry E0 to the target");
        const PointQ image = iso->apply(r.Q0);
        v.require(on_curve(target, image), "image of Q0 is off the target curve");
        v.require(image.x == 8 && (image.y == 40 || image.y == -40), "Q0 maps to " + image.to_string());
    }
    return v;
}

Verdict criterion3() {
    Verdict v;
    const auto t0 = Clock::now();
    const QuotientAVSpec spec = fixtures::spec("ex35");
    const PrimeSet S{2, 3};
    const QuotientContext ctx(spec, S);
    const PointQ twice_u = scalar_mul(spec.base, 2, PointQ::affine(-3, 4));
    for (long n = 1; n <= 6; ++n) {
        const DivSeqTerm t = c_n_quotient(ctx, n);
        v.require(t.factorization.to_string() == kEx35Table[n - 1],
                  "n=" + std::to_string(n) + " gives " + t.factorization.to_string());
        if (n % 2 == 0) {
            const DivSeqTerm e = c_n_elliptic(spec.base, twice_u, S, n);
            v.require(e.radical_value == t.radical_value, "n=" + std::to_string(n) + " differs from C_n(E, 2U')");
        }
    }
    const PipelineResult r = pipeline(spec);
    v.require(r.n1 == 2, "n1 = " + std::to_string(r.n1));
    const double secs = seconds_since(t0);
    v.require(secs < 60, "took " + std::to_string(secs) + " s");
    return v;
}

Verdict criterion4() {
    Verdict v;
    const auto s31 = fixtures::spec("ex31");
    const QuotientContext c31(s31, fixtures::default_S("ex31"));
    std::vector<DivSeqTerm> terms;
    for (long n = 1; n <= 7; ++n) terms.push_back(c_n_quotient(c31, n));
    terms = primitive_report(terms);
    for (long n = 3; n <= 7; ++n)
        v.require(!terms[n - 1].primitive_primes.empty(), "ex31 n=" + std::to_string(n) + " has no primitive prime");

    const auto s35 = fixtures::spec("ex35");
    const QuotientContext c35(s35, PrimeSet{2, 3});
    for (long n = 1; n <= 13; n += 2)
        v.require(quotient_support(c35, n) == 1, "ex35 odd n=" + std::to_string(n) + " is not 1");

    v.require(primitive_criterion(s31, pipeline(s31)).has_primitive_divisors, "criterion false on ex31");
    v.require(!primitive_criterion(s35, pipeline(s35)).has_primitive_divisors, "criterion true on ex35");
    return v;
}

Verdict criterion5() {
    Verdict v;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20261016);
    for (const std::string name : {"ex31", "ex35"}) {
        const QuotientAVSpec spec = fixtures::spec(name);
        const PipelineResult r = pipeline(spec);
        const QuotientContext ctx(spec, {});
        const GnAnalysis& g = r.gn;

        // (a) where G_n is nonempty, and its size
        const GnOracle oracle(spec.base, ctx.H, g.a, g.Z, g.Lambda, g.aux_prime);
        for (long n = 1; n <= static_cast<long>(g.t); ++n)
            v.require(!oracle.gn(n).empty() == (n % g.d == 0), name + ": G_" + std::to_string(n));
        for (long k = 1; k <= 4; ++k)
            v.require(oracle.gn(k * g.d).size() == g.G0_size, name + ": #G_" + std::to_string(k * g.d));

        // (b) three auxiliary primes see the same sets, up to reduction
        const auto primes = auxiliary_primes(spec.base, g.Lambda, 3, kAuxPrimeBound, r.S_auto);
        std::vector<std::vector<std::size_t>> sizes;
        for (auto p : primes) {
            const GnOracle o(spec.base, ctx.H, g.a, g.Z, g.Lambda, p);
            std::vector<std::size_t> row;
            for (long n = 0; n <= 2 * static_cast<long>(g.t) + 2; ++n) {
                const auto set = o.gn(n);
                row.push_back(set.size());
                // rational members of G_n reduce into every auxiliary G_n
                for (const auto& V : rational_torsion_points(spec.base, static_cast<int>(g.Lambda))) {
                    PointTuple t;
                    for (std::size_t i = 0; i < g.a.size(); ++i)
                        t.push_back(add(spec.base, scalar_mul(spec.base, g.a[i], V), scalar_mul(spec.base, n, g.Z[i])));
                    if (std::find(ctx.H.begin(), ctx.H.end(), t) != ctx.H.end())
                        v.require(std::find(set.begin(), set.end(), reduce_point(o.curve(), V)) != set.end(),
                                  name + ": rational member missing mod " + std::to_string(p));
                }
            }
            sizes.push_back(row);
        }
        v.require(sizes[0] == sizes[1] && sizes[0] == sizes[2], name + ": G_n sizes vary with the auxiliary prime");

        // (c) congruence primes against brute-force reduction
        const PrimeSet exclude = ctx.S;
        std::uniform_int_distribution<long> pick_n(1, 6);
        std::uniform_int_distribution<std::size_t> pick_h(0, ctx.H.size() - 1);
        for (int trial = 0; trial < 10; ++trial) {
            const long n = pick_n(rng);
            const PointTuple& h = ctx.H[pick_h(rng)];
            const PointTuple nL = tuple_mul(spec.base, n, spec.L);
            bool all = true;
            PrimeSet common;
            for (int i = 0; i < spec.m; ++i) {
                const CongruencePrimes cp = congruence_primes(spec.base, nL[i], h[i], exclude);
                if (cp.all) continue;
                PrimeSet next;
                for (const auto& p : cp.primes)
                    if (all || common.contains(p)) next.insert(p);
                common = next;
                all = false;
            }
            for (std::uint64_t p = 3; p < 1000; p += 2) {
                if (!is_prime(p) || exclude.contains(Integer(static_cast<unsigned long>(p)))) continue;
                const CurveFp Ep(spec.base, p);
                bool congruent = true;
                for (int i = 0; i < spec.m; ++i)
                    congruent = congruent && reduce_point(Ep, nL[i]) == reduce_point(Ep, h[i]);
                const bool claimed = all || common.contains(Integer(static_cast<unsigned long>(p)));
                v.require(congruent == claimed, name + ": n=" + std::to_string(n) + " h=" + tuple_to_string(h) +
                                                    " disagrees at p=" + std::to_string(p));
            }
        }
    }
    const double secs = seconds_since(t0);
    v.require(secs < 120, "took " + std::to_string(secs) + " s");
    return v;
}

Verdict criterion6() {
    Verdict v;
    std::mt19937_64 rng(6);

    // B_n from the square root of the x denominator; B_m | B_n whenever m | n
    const std::vector<std::pair<CurveQ, PointQ>> eds{{CurveQ(0, 8, 0, -9, 0), PointQ::affine(9, -36)},
                                                     {CurveQ(0, 0, 0, -21, -20), PointQ::affine(-3, 4)},
                                                     {CurveQ(1, -1, 1, 0, 0), PointQ::affine(0, 0)}};
    for (const auto& [E, P] : eds) {
        std::vector<Integer> B(31);
        PointQ nP = PointQ::infinity();
        for (int n = 1; n <= 30; ++n) {
            nP = add(E, nP, P);
            mpz_sqrt(B[n].get_mpz_t(), nP.x.get_den().get_mpz_t());
            v.require(B[n] * B[n] == nP.x.get_den(), "denominator not a square");
        }
        for (int m = 1; m <= 30; ++m)
            for (int n = 2 * m; n <= 30; n += m)
                v.require(B[n] % B[m] == 0, E.to_string() + ": B_" + std::to_string(m) + " does not divide B_" +
                                                std::to_string(n));
    }

    // associativity on random combinations of a generator and torsion
    {
        const CurveQ E(0, 0, 0, -21, -20);
        const std::vector<PointQ> base{PointQ::affine(-3, 4), PointQ::affine(-1, 0), PointQ::affine(5, 0),
                                       PointQ::affine(-4, 0)};
        std::uniform_int_distribution<int> coef(-4, 4), which(0, 3);
        auto random_point = [&] { return add(E, scalar_mul(E, coef(rng), base[0]), base[which(rng)]); };
        for (int i = 0; i < 200; ++i) {
            const PointQ A = random_point(), B = random_point(), C = random_point();
            v.require(add(E, add(E, A, B), C) == add(E, A, add(E, B, C)), "associativity fails");
        }
    }

    // factorization reproduces the input
    {
        std::uniform_int_distribution<std::uint64_t> dist(2, 1'000'000'000'000ULL);
        for (int i = 0; i < 300; ++i) {
            const Integer n(static_cast<unsigned long>(dist(rng)));
            const Factorization f = factor(n);
            v.require(f.product() == n, "factors of " + n.get_str() + " do not multiply back");
            for (const auto& pp : f.factors) v.require(is_prime(pp.prime), pp.prime.get_str() + " is not prime");
        }
    }

    // dual after isogeny is multiplication by the degree
    {
        struct Case {
            CurveQ E;
            std::vector<PointQ> kernel;
            PointQ gen;
        };
        const std::vector<Case> cases{
            {CurveQ(0, 8, 0, -9, 0), {PointQ::affine(0, 0)}, PointQ::affine(9, -36)},
            {CurveQ(0, 0, 0, -21, -20), {PointQ::affine(-1, 0), PointQ::affine(5, 0)}, PointQ::affine(-3, 4)},
            {CurveQ(0, 0, 0, -21, -20), {PointQ::affine(5, 0)}, PointQ::affine(-3, 4)}};
        for (const auto& c : cases) {
            const Isogeny iso = velu_quotient(kernel_from_subgroup(c.E, c.kernel));
            const Isogeny dual = dual_isogeny(iso);
            const auto torsion = two_torsion(c.E);
            int checked = 0;
            for (long k = -3; k <= 4 && checked < 20; ++k)
                for (const auto& T : torsion) {
                    if (checked == 20) break;
                    const PointQ P = add(c.E, scalar_mul(c.E, k, c.gen), T);
                    v.require(evaluate(dual, evaluate(iso, P)) ==
                                  scalar_mul(c.E, static_cast<long long>(iso.degree), P),
                              "dual composition fails at " + P.to_string());
                    ++checked;
                }
            v.require(checked == 20, "too few sample points");
        }
    }
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Verdict (*)()>> criteria{
        {"1 first example table", criterion1}, {"2 quotient curve and point", criterion2},
        {"3 second example table", criterion3}, {"4 primitive divisors", criterion4},
        {"5 G_n structure and congruences", criterion5},          {"6 arithmetic core", criterion6}};
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v.problems.push_back(std::string("exception: ") + e.what());
        }
        std::cout << (v.ok() ? "PASS" : "FAIL") << "  criterion " << name << "  (" << std::fixed
                  << std::setprecision(2) << seconds_since(t0) << " s, " << v.checks << " checks)";
        for (std::size_t i = 0; i < v.problems.size() && i < 5; ++i) std::cout << "\n      " << v.problems[i];
        std::cout << std::endl;
        failures += !v.ok();
    }
    return failures == 0 ? 0 : 1;
}
