#pragma once

// Command-line front end. run() is usable in-process so tests can drive it.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "avdiv/fixtures.hpp"
#include "avdiv/io.hpp"
#include "avdiv/theorem1.hpp"

namespace avdiv::cli {

enum ExitCode : int { kOk = 0, kInput = 2, kDegeneracy = 3, kBudget = 4, kInvariant = 5 };

inline int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::input: return kInput;
        case ErrorKind::degeneracy: return kDegeneracy;
        case ErrorKind::budget: return kBudget;
        case ErrorKind::invariant: return kInvariant;
    }
    return kInvariant;
}

struct JobConfig {
    std::string command;
    std::string curve, spec_path, fixture, point, kernel, reproduce_name;
    std::string range, s = "auto", format = "text", cache_path;
    std::uint64_t aux_bound = kAuxPrimeBound;
    std::uint64_t budget = 100'000'000;
    long validate = 12;
    unsigned jobs = 1;
};

struct Range {
    long lo = 1, hi = 1;
};

inline Range parse_range(const std::string& s, Range fallback) {
    if (s.empty()) return fallback;
    Range r;
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) {
            r.lo = 1;
            r.hi = std::stol(s);
        } else {
            r.lo = std::stol(s.substr(0, colon));
            r.hi = std::stol(s.substr(colon + 1));
        }
    } catch (const std::exception&) {
        throw input_error("BadRange", "cannot parse range '" + s + "' (expected LO:HI)");
    }
    if (r.lo < 1 || r.hi < r.lo) throw input_error("BadRange", "range must satisfy 1 <= LO <= HI");
    return r;
}

/// nullopt for "auto".
inline std::optional<PrimeSet> parse_primes(const std::string& s) {
    if (s == "auto") return std::nullopt;
    PrimeSet S;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        Integer p;
        if (p.set_str(tok, 10) != 0 || p < 2 || !is_prime(p))
            throw input_error("BadPrime", "'" + tok + "' in --s is not a prime");
        S.insert(p);
    }
    return S;
}

inline std::vector<PointQ> parse_points(const std::string& s) {
    std::vector<PointQ> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ';'))
        if (!tok.empty()) out.push_back(parse_point(tok));
    return out;
}

// ---------------------------------------------------------------------------
// output

class Reporter {
public:
    Reporter(std::ostream& out, std::string format) : out_(out), format_(std::move(format)) {
        if (format_ != "text" && format_ != "json" && format_ != "csv")
            throw input_error("BadFormat", "format must be text, json or csv");
    }
    const std::string& format() const { return format_; }
    std::ostream& out() { return out_; }

    /// One record per term, ordered by n.
    void terms(const std::vector<DivSeqTerm>& ts, const std::string& title) {
        if (format_ == "json") {
            for (const auto& t : ts) out_ << term_to_json(t).dump() << '\n';
            return;
        }
        if (format_ == "csv") {
            out_ << "n,radical,factors,primitive\n";
            for (const auto& t : ts)
                out_ << t.n << ',' << t.radical_value.get_str() << ',' << csv_escape(t.factorization.to_string()) << ','
                     << csv_escape(prime_list(t.primitive_primes)) << '\n';
            return;
        }
        out_ << title << '\n';
        std::size_t w = 7;
        for (const auto& t : ts) w = std::max(w, columns(t.factorization.to_string()));
        out_ << std::setw(4) << "n" << "  " << pad("factors", w) << "  primitive\n";
        for (const auto& t : ts)
            out_ << std::setw(4) << t.n << "  " << pad(t.factorization.to_string(), w) << "  "
                 << prime_list(t.primitive_primes) << '\n';
    }

    /// Display width; the middle dot is two bytes but one column.
    static std::size_t columns(const std::string& s) {
        std::size_t cols = 0;
        for (unsigned char c : s) cols += (c & 0xC0) != 0x80;
        return cols;
    }
    static std::string pad(const std::string& s, std::size_t w) {
        const std::size_t cols = columns(s);
        return s + std::string(w > cols ? w - cols : 0, ' ');
    }

private:
    std::ostream& out_;
    std::string format_;
};

// ---------------------------------------------------------------------------
// commands

struct Session {
    JobConfig cfg;
    std::unique_ptr<FactorCache> cache;
    FactorOptions fopts;

    explicit Session(JobConfig c) : cfg(std::move(c)) {
        if (!cfg.cache_path.empty()) cache = std::make_unique<FactorCache>(cfg.cache_path);
        fopts.budget = cfg.budget;
        fopts.cache = cache.get();
    }
    ~Session() {
        if (cache) cache->save();
    }

    CurveQ curve() const {
        if (cfg.curve.empty()) throw input_error("MissingCurve", "--curve is required");
        return parse_curve(cfg.curve);
    }

    PointQ single_point(const CurveQ& E) const {
        if (cfg.point.empty()) throw input_error("MissingPoint", "--point is required");
        const PointQ P = parse_point(cfg.point);
        require_on_curve(E, P);
        if (P.infinite || is_torsion(E, P))
            throw input_error("TorsionPoint", P.to_string() + " has finite order, its sequence is not defined");
        return P;
    }

    Json spec_document() const {
        if (!cfg.fixture.empty()) return fixtures::document(cfg.fixture);
        if (cfg.spec_path.empty()) throw input_error("MissingSpec", "--spec FILE or --fixture NAME is required");
        std::ifstream in(cfg.spec_path);
        if (!in) throw input_error("MissingSpec", "cannot read " + cfg.spec_path);
        try {
            return Json::parse(in);
        } catch (const Json::exception& e) {
            throw input_error("BadJson", cfg.spec_path + ": " + e.what());
        }
    }

    /// Computes terms lo..hi with f, in parallel when --jobs > 1, then fills in primitive primes.
    template <class F>
    std::vector<DivSeqTerm> compute_terms(Range r, F&& f) const {
        auto guarded = [&](long n) {
            try {
                return f(n);
            } catch (const Error& e) {
                throw Error(e.kind(), e.code(), "at n=" + std::to_string(n) + ": " +
                                                    std::string(e.what()).substr(e.code().size() + 2));
            }
        };
        std::vector<DivSeqTerm> ts(r.hi - r.lo + 1);
        detail::parallel_for(r.lo, r.hi, cfg.jobs, [&](long n) { ts[n - r.lo] = guarded(n); });
        // the primitive set is relative to all earlier terms, so start from n = 1
        if (r.lo > 1) {
            std::vector<DivSeqTerm> prefix(r.lo - 1);
            detail::parallel_for(1, r.lo - 1, cfg.jobs, [&](long n) { prefix[n - 1] = guarded(n); });
            prefix.insert(prefix.end(), ts.begin(), ts.end());
            auto all = primitive_report(std::move(prefix));
            return {all.begin() + (r.lo - 1), all.end()};
        }
        return primitive_report(std::move(ts));
    }
};

/// Terms B_n with nP = (A_n/B_n^2, ...), fully factored.
inline int cmd_eds(Session& s, Reporter& rep) {
    const CurveQ E = s.curve();
    if (!E.is_integral()) throw input_error("NonIntegralModel", E.to_string() + " is not an integral model");
    const PointQ P = s.single_point(E);
    const Range r = parse_range(s.cfg.range, {1, 10});
    auto ts = s.compute_terms(r, [&](long n) {
        const PointQ nP = detail::mul_unchecked(E, n, P);
        Integer B;
        mpz_sqrt(B.get_mpz_t(), nP.x.get_den().get_mpz_t());
        if (B * B != nP.x.get_den()) throw invariant_error("EdsSquare", "denominator of x(nP) is not a square at n=" + std::to_string(n));
        DivSeqTerm t;
        t.n = n;
        t.factorization = factor(B, s.fopts);
        t.radical_value = radical_factorization(B, {}, s.fopts).value;
        return t;
    });
    rep.terms(ts, "B_n for " + P.to_string() + " on " + E.to_string());
    return kOk;
}

inline int cmd_cseq_ec(Session& s, Reporter& rep) {
    const CurveQ E = s.curve();
    if (!E.is_integral()) throw input_error("NonIntegralModel", E.to_string() + " is not an integral model");
    const PointQ P = s.single_point(E);
    PrimeSet S = parse_primes(s.cfg.s).value_or(PrimeSet{2});
    S.insert(Integer(2));
    const Range r = parse_range(s.cfg.range, {1, 10});
    auto ts = s.compute_terms(r, [&](long n) { return c_n_elliptic(E, P, S, n, s.fopts); });
    rep.terms(ts, "C_n(E, " + P.to_string() + ", S) with S = {" + prime_list(S) + "} plus bad primes");
    return kOk;
}

inline int cmd_cseq_quotient(Session& s, Reporter& rep) {
    const QuotientAVSpec spec = spec_from_json(s.spec_document());
    const QuotientContext ctx(spec, parse_primes(s.cfg.s).value_or(PrimeSet{}));
    const Range r = parse_range(s.cfg.range, {1, 10});
    auto ts = s.compute_terms(r, [&](long n) { return c_n_quotient(ctx, n, s.fopts); });
    rep.terms(ts, "C_n(A, P, S) with S = {" + prime_list(ctx.S) + "}");
    return kOk;
}

inline int cmd_velu(Session& s, Reporter& rep) {
    const CurveQ E = s.curve();
    if (s.cfg.kernel.empty()) throw input_error("MissingKernel", "--kernel \"x,y;x,y\" is required");
    const Isogeny iso = velu_quotient(kernel_from_subgroup(E, parse_points(s.cfg.kernel)));
    std::optional<PointQ> image;
    if (!s.cfg.point.empty()) {
        const PointQ P = parse_point(s.cfg.point);
        require_on_curve(E, P);
        image = evaluate(iso, P);
    }
    auto& out = rep.out();
    if (rep.format() == "json") {
        Json j{{"domain", curve_to_json(iso.domain)},
               {"codomain", curve_to_json(iso.codomain)},
               {"degree", iso.degree},
               {"kernel_polynomial", polynomial_to_json(iso.kernel.kernel_polynomial)}};
        if (image) j["image"] = point_to_json(*image);
        out << j.dump() << '\n';
    } else if (rep.format() == "csv") {
        out << "domain,codomain,degree,kernel_polynomial" << (image ? ",image" : "") << '\n';
        out << csv_escape(iso.domain.to_string()) << ',' << csv_escape(iso.codomain.to_string()) << ',' << iso.degree
            << ',' << csv_escape(iso.kernel.kernel_polynomial.to_string());
        if (image) out << ',' << csv_escape(image->to_string());
        out << '\n';
    } else {
        out << "domain    " << iso.domain.to_string() << '\n'
            << "codomain  " << iso.codomain.to_string() << '\n'
            << "degree    " << iso.degree << '\n'
            << "kernel    " << iso.kernel.kernel_polynomial.to_string() << '\n';
        if (image) out << "image     " << image->to_string() << '\n';
    }
    return kOk;
}

inline PipelineOptions pipeline_options(const Session& s) {
    PipelineOptions o;
    o.validate_up_to = s.cfg.validate;
    o.aux_bound = s.cfg.aux_bound;
    o.factor = s.fopts;
    o.jobs = s.cfg.jobs;
    if (auto S = parse_primes(s.cfg.s)) o.extra_S = *S;
    if (o.validate_up_to < 1) throw input_error("BadRange", "--validate must be positive");
    return o;
}

inline Json pipeline_to_json(const PipelineResult& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"n", c.n}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"exact", c.exact}, {"ok", c.ok}});
    Json a = Json::array();
    for (long v : r.decomposition.a) a.push_back(v);
    return {{"n1", r.n1},
            {"u", r.u},
            {"d", r.d},
            {"N", r.N},
            {"Lambda", r.gn.Lambda},
            {"G0_order", r.gn.G0_size},
            {"aux_prime", r.gn.aux_prime},
            {"R", point_to_json(r.decomposition.R)},
            {"a", a},
            {"E0", curve_to_json(r.E0)},
            {"Q0", point_to_json(r.Q0)},
            {"Q0_source", r.q0_source},
            {"kernel_polynomial", polynomial_to_json(r.psi.kernel.kernel_polynomial)},
            {"S", prime_set_to_json(r.S_auto)},
            {"verified_up_to", r.verified_up_to},
            {"checks", checks}};
}

inline int cmd_pipeline(Session& s, Reporter& rep) {
    const QuotientAVSpec spec = spec_from_json(s.spec_document());
    const PipelineResult r = pipeline(spec, pipeline_options(s));
    auto& out = rep.out();
    if (rep.format() == "json") {
        out << pipeline_to_json(r).dump() << '\n';
    } else if (rep.format() == "csv") {
        out << "n,lhs,rhs,exact,ok\n";
        for (const auto& c : r.checks)
            out << c.n << ',' << csv_escape(c.lhs) << ',' << csv_escape(c.rhs) << ',' << c.exact << ',' << c.ok << '\n';
    } else {
        out << "n1 = " << r.n1 << "  (u = " << r.u << ", d = " << r.d << ")\n"
            << "E0 = " << r.E0.to_string() << "  (quotient by a subgroup of order " << r.gn.G0_size << ")\n"
            << "Q0 = " << r.Q0.to_string() << '\n'
            << "S  = {" << prime_list(r.S_auto) << "}\n"
            << "verified for n <= " << r.verified_up_to << " at auxiliary prime " << r.gn.aux_prime << '\n';
    }
    return kOk;
}

inline int cmd_primitive(Session& s, Reporter& rep) {
    const QuotientAVSpec spec = spec_from_json(s.spec_document());
    const PipelineOptions opts = pipeline_options(s);
    const PipelineResult r = pipeline(spec, opts);
    const PrimitiveCriterion pc = primitive_criterion(spec, r, opts);
    const QuotientContext ctx(spec, opts.extra_S);
    const Range range = parse_range(s.cfg.range, {1, 8});
    auto ts = s.compute_terms(range, [&](long n) { return c_n_quotient(ctx, n, s.fopts); });
    if (rep.format() == "json") {
        rep.out() << Json{{"has_primitive_divisors", pc.has_primitive_divisors},
                          {"n1", r.n1},
                          {"u", r.u},
                          {"d", r.d},
                          {"scaled_diagonal_in_kernel", pc.scaled_diagonal_in_kernel},
                          {"z_in_kernel", pc.z_in_kernel}}
                             .dump()
                  << '\n';
    } else if (rep.format() == "text") {
        rep.out() << "primitive divisors for almost all n: " << (pc.has_primitive_divisors ? "yes" : "no") << "  (n1 = "
                  << r.n1 << ")\n";
    }
    rep.terms(ts, "C_n(A, P, S) with S = {" + prime_list(ctx.S) + "}");
    return kOk;
}

inline int cmd_reproduce(Session& s, Reporter& rep) {
    const std::string name = s.cfg.reproduce_name;
    const QuotientAVSpec spec = fixtures::spec(name);
    PrimeSet S = fixtures::default_S(name);
    if (auto explicit_S = parse_primes(s.cfg.s)) S = *explicit_S;
    const Range r = parse_range(s.cfg.range, {1, name == "ex31" ? 7L : 6L});

    PipelineOptions opts = pipeline_options(s);
    opts.extra_S = S;
    const PipelineResult pr = pipeline(spec, opts);
    const QuotientContext ctx(spec, S);
    const long n1 = static_cast<long>(pr.n1);

    // for the second example the quotient column also agrees with C_n(E, 2U') at even n
    std::optional<PointQ> twice_u;
    if (name == "ex35") twice_u = scalar_mul(spec.base, 2, spec.L[1]);

    auto quotient = s.compute_terms(r, [&](long n) { return c_n_quotient(ctx, n, s.fopts); });
    std::vector<DivSeqTerm> elliptic(r.hi - r.lo + 1), reference(r.hi - r.lo + 1);
    detail::parallel_for(r.lo, r.hi, s.cfg.jobs, [&](long n) {
        DivSeqTerm one;
        one.n = n;
        elliptic[n - r.lo] = n % n1 ? one : c_n_elliptic(pr.E0, pr.Q0, pr.S_auto, n / n1, s.fopts);
        elliptic[n - r.lo].n = n;
        if (twice_u) reference[n - r.lo] = n % 2 ? one : c_n_elliptic(spec.base, *twice_u, ctx.S, n, s.fopts);
    });

    bool all_match = true;
    std::vector<bool> match;
    for (long n = r.lo; n <= r.hi; ++n) {
        const auto& q = quotient[n - r.lo];
        bool ok = q.radical_value == elliptic[n - r.lo].radical_value;
        if (twice_u && n % 2 == 0) ok = ok && q.radical_value == reference[n - r.lo].radical_value;
        match.push_back(ok);
        all_match = all_match && ok;
    }

    auto& out = rep.out();
    if (rep.format() == "json") {
        for (long n = r.lo; n <= r.hi; ++n) {
            Json j{{"n", n},
                   {"quotient", term_to_json(quotient[n - r.lo])},
                   {"elliptic", term_to_json(elliptic[n - r.lo])},
                   {"match", static_cast<bool>(match[n - r.lo])}};
            if (twice_u && n % 2 == 0) j["reference"] = term_to_json(reference[n - r.lo]);
            out << j.dump() << '\n';
        }
    } else if (rep.format() == "csv") {
        out << "n,quotient,elliptic" << (twice_u ? ",reference" : "") << ",match\n";
        for (long n = r.lo; n <= r.hi; ++n) {
            out << n << ',' << csv_escape(quotient[n - r.lo].factorization.to_string()) << ','
                << csv_escape(elliptic[n - r.lo].factorization.to_string());
            if (twice_u) out << ',' << (n % 2 ? "" : csv_escape(reference[n - r.lo].factorization.to_string()));
            out << ',' << (match[n - r.lo] ? "yes" : "no") << '\n';
        }
    } else {
        out << name << ": S = {" << prime_list(S) << "} (effective {" << prime_list(pr.S_auto) << "}), n1 = " << pr.n1 << ", E0 = " << pr.E0.to_string()
            << ", Q0 = " << pr.Q0.to_string() << '\n';
        std::size_t w = 8;
        for (const auto& t : quotient) w = std::max(w, Reporter::columns(t.factorization.to_string()));
        out << std::setw(4) << "n" << "  " << Reporter::pad("C_n(A,P)", w) << "  "
            << "C_n/n1(E0,Q0)" << '\n';
        for (long n = r.lo; n <= r.hi; ++n)
            out << std::setw(4) << n << "  " << Reporter::pad(quotient[n - r.lo].factorization.to_string(), w) << "  "
                << elliptic[n - r.lo].factorization.to_string() << (match[n - r.lo] ? "" : "  MISMATCH") << '\n';
    }
    if (!all_match) throw invariant_error("TableMismatch", "the two columns of " + name + " disagree");
    return kOk;
}

inline int cmd_selftest(Session& s, Reporter& rep) {
    const std::vector<std::string> ex31{"1", "1", "7·17·41", "13·29·101", "103·113·1087·2377",
                                        "7·11·17·41·89·2713·8329", "23·23497·156671·48883577521"};
    const std::vector<std::string> ex35{"1", "5·11·13", "1", "5·11·13·67·197·19249·21649", "1",
                                        "5·7·11·13·17·19·23·191·251·263·311·16103·1786451·385044001"};
    bool ok = true;
    auto check = [&](const std::string& what, bool pass) {
        rep.out() << (pass ? "PASS " : "FAIL ") << what << '\n';
        ok = ok && pass;
    };
    for (const auto& [name, table] : {std::pair{std::string("ex31"), ex31}, std::pair{std::string("ex35"), ex35}}) {
        const QuotientContext ctx(fixtures::spec(name), fixtures::default_S(name));
        bool same = true;
        for (long n = 1; n <= static_cast<long>(table.size()); ++n)
            same = same && c_n_quotient(ctx, n, s.fopts).factorization.to_string() == table[n - 1];
        check(name + " table", same);
        PipelineOptions opts = pipeline_options(s);
        const PipelineResult r = pipeline(ctx.spec, opts);
        check(name + " n1 = " + std::to_string(r.n1), r.n1 == (name == "ex31" ? 1u : 2u));
    }
    return ok ? kOk : kInvariant;
}

// ---------------------------------------------------------------------------

inline int dispatch(const JobConfig& cfg, std::ostream& out) {
    Session s(cfg);
    Reporter rep(out, cfg.format);
    if (cfg.command == "eds") return cmd_eds(s, rep);
    if (cfg.command == "cseq-ec") return cmd_cseq_ec(s, rep);
    if (cfg.command == "cseq-quotient") return cmd_cseq_quotient(s, rep);
    if (cfg.command == "velu") return cmd_velu(s, rep);
    if (cfg.command == "pipeline") return cmd_pipeline(s, rep);
    if (cfg.command == "primitive") return cmd_primitive(s, rep);
    if (cfg.command == "reproduce") return cmd_reproduce(s, rep);
    if (cfg.command == "selftest") return cmd_selftest(s, rep);
    throw input_error("BadCommand", "unknown command " + cfg.command);
}

/// Parses arguments (without the program name) and runs the command.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Divisibility sequences on quotients of powers of elliptic curves", "avdiv"};
    app.require_subcommand(1);
    JobConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--curve", cfg.curve, "a1,a2,a3,a4,a6");
        sub->add_option("--spec", cfg.spec_path, "specification document (JSON)");
        sub->add_option("--fixture", cfg.fixture, "built-in specification: ex31 or ex35");
        sub->add_option("--point", cfg.point, "x,y with rational coordinates");
        sub->add_option("--range", cfg.range, "LO:HI");
        sub->add_option("--s", cfg.s, "auto or p1,p2,...");
        sub->add_option("--format", cfg.format, "text, json or csv");
        sub->add_option("--cache", cfg.cache_path, "factorization cache file");
        sub->add_option("--aux-bound", cfg.aux_bound, "search bound for auxiliary primes");
        sub->add_option("--budget", cfg.budget, "Pollard rho iterations per factorization");
        sub->add_option("--validate", cfg.validate, "check the pipeline for n up to this bound");
        sub->add_option("--jobs", cfg.jobs, "worker threads for independent terms");
    };
    const std::vector<std::pair<const char*, const char*>> commands{
        {"eds", "elliptic divisibility sequence B_n of a point"},
        {"cseq-ec", "C_n(E, Q, S) for a point on an elliptic curve"},
        {"cseq-quotient", "C_n(A, P, S) for a specification document"},
        {"velu", "quotient of a curve by a finite rational subgroup"},
        {"pipeline", "period n1, quotient curve E0 and point Q0"},
        {"primitive", "primitive divisor criterion and report"},
        {"reproduce", "reproduce a built-in worked example"},
        {"selftest", "quick consistency checks"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        common(sub);
        if (std::string(name) == "velu") sub->add_option("--kernel", cfg.kernel, "generators x,y;x,y");
        if (std::string(name) == "reproduce") sub->add_option("example", cfg.reproduce_name, "ex31 or ex35")->required();
        sub->callback([&cfg, name = std::string(name)] { cfg.command = name; });
    }

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInput;
    }
    try {
        return dispatch(cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const Json::exception& e) {
        err << "error: BadJson: " << e.what() << '\n';
        return kInput;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
        return kInvariant;
    }
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace avdiv::cli
