#pragma once

// Text and JSON serialization: rationals as "p/q", points as [x, y] or "O",
// specification documents and sequence records.

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "avdiv/isogeny.hpp"
#include "avdiv/seqlib.hpp"

namespace avdiv {

using Json = nlohmann::json;

inline Rational parse_rational(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw input_error("BadNumber", "empty number");
    auto valid = [](const std::string& part) {
        std::size_t i = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
        if (i >= part.size()) return false;
        for (; i < part.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(part[i]))) return false;
        return true;
    };
    const auto slash = s.find('/');
    const std::string num = s.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid(num) || !valid(den) || den[0] == '-' || den[0] == '+')
        throw input_error("BadNumber", "cannot parse '" + s + "' as a rational");
    Integer n(num[0] == '+' ? num.substr(1) : num), d(den);
    if (d == 0) throw input_error("BadNumber", "zero denominator in '" + s + "'");
    Rational q(n, d);
    q.canonicalize();
    return q;
}

inline Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(Integer(std::to_string(j.get<long long>())));
    throw input_error("BadNumber", "expected an integer or a \"p/q\" string, got " + j.dump());
}

inline Json rational_to_json(const Rational& q) { return q.get_str(); }

inline PointQ point_from_json(const Json& j) {
    if (j.is_string() && (j.get<std::string>() == "O" || j.get<std::string>() == "inf")) return PointQ::infinity();
    if (j.is_array() && j.size() == 2) return PointQ::affine(rational_from_json(j[0]), rational_from_json(j[1]));
    throw input_error("BadPoint", "expected [x, y] or \"O\", got " + j.dump());
}

inline Json point_to_json(const PointQ& P) {
    if (P.infinite) return "O";
    return Json::array({rational_to_json(P.x), rational_to_json(P.y)});
}

/// "x,y", "(x,y)" or "O".
inline PointQ parse_point(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) || c == '(' || c == ')'; }),
            s.end());
    if (s == "O" || s == "inf") return PointQ::infinity();
    const auto comma = s.find(',');
    if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
        throw input_error("BadPoint", "expected x,y or O, got '" + s + "'");
    return PointQ::affine(parse_rational(s.substr(0, comma)), parse_rational(s.substr(comma + 1)));
}

inline CurveQ curve_from_list(const std::vector<Rational>& a) {
    if (a.size() != 5) throw input_error("BadCurve", "a curve needs the five coefficients a1,a2,a3,a4,a6");
    return CurveQ(a[0], a[1], a[2], a[3], a[4]);
}

inline CurveQ curve_from_json(const Json& j) {
    if (!j.is_array()) throw input_error("BadCurve", "curve must be a list [a1,a2,a3,a4,a6]");
    std::vector<Rational> a;
    for (const auto& v : j) a.push_back(rational_from_json(v));
    return curve_from_list(a);
}

/// "a1,a2,a3,a4,a6"
inline CurveQ parse_curve(const std::string& s) {
    std::vector<Rational> a;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) a.push_back(parse_rational(part));
    return curve_from_list(a);
}

inline Json curve_to_json(const CurveQ& E) {
    Json out = Json::array();
    for (const auto& a : E.ainvs()) out.push_back(rational_to_json(a));
    return out;
}

inline Json tuple_to_json(const PointTuple& t) {
    Json out = Json::array();
    for (const auto& P : t) out.push_back(point_to_json(P));
    return out;
}

inline PointTuple tuple_from_json(const Json& j) {
    if (!j.is_array()) throw input_error("BadSpec", "expected a list of points");
    PointTuple out;
    for (const auto& P : j) out.push_back(point_from_json(P));
    return out;
}

/// {curve: [a1..a6], m, H: [[point,...],...], L: [point,...], N?}
inline QuotientAVSpec spec_from_json(const Json& j) {
    if (!j.is_object()) throw input_error("BadSpec", "specification must be a JSON object");
    for (const char* key : {"curve", "H", "L"})
        if (!j.contains(key)) throw input_error("BadSpec", std::string("missing field '") + key + "'");
    QuotientAVSpec spec{curve_from_json(j.at("curve")), 1, {}, std::nullopt, tuple_from_json(j.at("L"))};
    spec.m = j.contains("m") ? j.at("m").get<int>() : static_cast<int>(spec.L.size());
    for (const auto& g : j.at("H")) spec.H_generators.push_back(tuple_from_json(g));
    if (j.contains("N") && !j.at("N").is_null()) {
        long long N = j.at("N").get<long long>();
        if (N < 1) throw input_error("BadSpec", "N must be positive");
        spec.N = static_cast<std::uint64_t>(N);
    }
    validate(spec);
    return spec;
}

inline Json spec_to_json(const QuotientAVSpec& spec) {
    Json H = Json::array();
    for (const auto& g : spec.H_generators) H.push_back(tuple_to_json(g));
    Json out{{"curve", curve_to_json(spec.base)}, {"m", spec.m}, {"H", H}, {"L", tuple_to_json(spec.L)}};
    if (spec.N) out["N"] = *spec.N;
    return out;
}

inline Json prime_set_to_json(const PrimeSet& S) {
    Json out = Json::array();
    for (const auto& p : S) out.push_back(p.get_str());
    return out;
}

/// {"n", "radical", "factors": [["p", e], ...], "primitive": ["p", ...]}
inline Json term_to_json(const DivSeqTerm& t) {
    Json factors = Json::array();
    for (const auto& pp : t.factorization.factors) factors.push_back(Json::array({pp.prime.get_str(), pp.exponent}));
    return {{"n", t.n},
            {"radical", t.radical_value.get_str()},
            {"factors", factors},
            {"primitive", prime_set_to_json(t.primitive_primes)}};
}

inline DivSeqTerm term_from_json(const Json& j) {
    DivSeqTerm t;
    t.n = j.at("n").get<long>();
    t.radical_value = Integer(j.at("radical").get<std::string>());
    t.factorization.value = 1;
    for (const auto& f : j.at("factors")) {
        PrimePower pp{Integer(f.at(0).get<std::string>()), f.at(1).get<unsigned>()};
        t.factorization.factors.push_back(pp);
    }
    t.factorization.value = t.factorization.product();
    for (const auto& p : j.at("primitive")) t.primitive_primes.insert(Integer(p.get<std::string>()));
    return t;
}

inline std::string prime_list(const PrimeSet& S) {
    std::string out;
    for (const auto& p : S) out += (out.empty() ? "" : ",") + p.get_str();
    return out.empty() ? "-" : out;
}

/// Kernel polynomial coefficients, constant term first.
inline Json polynomial_to_json(const PolyQ& f) {
    Json out = Json::array();
    for (const auto& c : f.coeffs()) out.push_back(rational_to_json(c));
    return out;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

}  // namespace avdiv
