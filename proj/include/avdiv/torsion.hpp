#pragma once

// Torsion orders, rational torsion subgroups and a naive canonical height estimate.

#include <cmath>
#include <optional>
#include <vector>

#include "avdiv/curve_fp.hpp"
#include "avdiv/curve_q.hpp"

namespace avdiv {

namespace detail {

/// The two smallest good primes above 3 for an integral model.
inline std::vector<std::uint64_t> torsion_test_primes(const CurveQ& E) {
    const Integer disc = E.discriminant().get_num();
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 5; out.size() < 2; p += 2)
        if (is_prime(p) && !mpz_divisible_ui_p(disc.get_mpz_t(), p)) out.push_back(p);
    return out;
}

}  // namespace detail

/// Exact order of P, or nothing when P has infinite order.
inline std::optional<std::uint64_t> torsion_order(const CurveQ& E, const PointQ& P) {
    if (!E.is_integral()) throw input_error("NonIntegralModel", E.to_string() + " is not an integral model");
    require_on_curve(E, P);
    if (P.infinite) return 1;
    // Reduction at a good prime p > 3 is injective on torsion and torsion points are p-integral there.
    std::optional<std::uint64_t> order;
    for (std::uint64_t p : detail::torsion_test_primes(E)) {
        if (mpz_divisible_ui_p(P.x.get_den_mpz_t(), p)) return std::nullopt;
        CurveFp Ep(E, p);
        std::uint64_t o = point_order(Ep, reduce_point(Ep, P));
        if (order && *order != o) return std::nullopt;
        order = o;
    }
    if (!detail::mul_unchecked(E, static_cast<long long>(*order), P).infinite) return std::nullopt;
    return order;
}

inline bool is_torsion(const CurveQ& E, const PointQ& P) { return torsion_order(E, P).has_value(); }

/// All rational points killed by N, sorted, the identity first.
inline std::vector<PointQ> rational_torsion_points(const CurveQ& E, int N) {
    if (N < 1) throw input_error("BadIndex", "torsion level must be positive");
    std::vector<PointQ> out{PointQ::infinity()};
    if (N == 1) return out;
    for (const auto& x : rational_roots(division_polynomial(E, N).torsion_x_polynomial()))
        for (const auto& R : points_with_x(E, x))
            if (detail::mul_unchecked(E, N, R).infinite) out.push_back(R);
    std::sort(out.begin(), out.end());
    return out;
}

struct HeightEstimate {
    std::vector<double> sequence;  ///< h(x(2^k P)) / (2 * 4^k) for k = 0..5
    double value = 0;              ///< last entry
};

namespace detail {

inline double log_abs(const Integer& n) {
    if (n == 0) return 0;
    long exp = 0;
    double m = mpz_get_d_2exp(&exp, n.get_mpz_t());
    return std::log(std::fabs(m)) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace detail

/// Naive height h(x) = log max(|num x|, den x).
inline double naive_height(const Rational& x) {
    return std::max(detail::log_abs(x.get_num()), detail::log_abs(x.get_den()));
}

/// Canonical height approximation by repeated doubling.
inline HeightEstimate height_estimate(const CurveQ& E, const PointQ& P, int steps = 5) {
    require_on_curve(E, P);
    if (P.infinite || (E.is_integral() && is_torsion(E, P)))
        throw degeneracy_error("TorsionInput", P.to_string() + " is a torsion point");
    HeightEstimate out;
    PointQ R = P;
    double scale = 0.5;
    for (int k = 0; k <= steps; ++k) {
        if (R.infinite) throw degeneracy_error("TorsionInput", P.to_string() + " is a torsion point");
        out.sequence.push_back(naive_height(R.x) * scale);
        R = detail::add_unchecked(E, R, R);
        scale /= 4;
    }
    out.value = out.sequence.back();
    return out;
}

}  // namespace avdiv
