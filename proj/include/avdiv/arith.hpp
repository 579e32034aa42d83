#pragma once

// Exact integer services: primality, factorization, radicals and
// prime-support comparisons on arbitrary-precision integers.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "avdiv/errors.hpp"

namespace avdiv {

using Integer = mpz_class;
using Rational = mpq_class;

// ---------------------------------------------------------------------------
// word-size modular helpers

namespace modp {

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}
inline std::uint64_t add(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    std::uint64_t s = a + b;
    return (s >= p || s < a) ? s - p : s;
}
inline std::uint64_t sub(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return a >= b ? a - b : a + (p - b);
}
inline std::uint64_t pow(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    b %= p;
    while (e) {
        if (e & 1) r = mul(r, b, p);
        b = mul(b, b, p);
        e >>= 1;
    }
    return r;
}
/// Inverse modulo a prime p; a must be nonzero mod p.
inline std::uint64_t inv(std::uint64_t a, std::uint64_t p) { return pow(a, p - 2, p); }

/// Reduce an arbitrary integer into [0, p).
inline std::uint64_t reduce(const Integer& n, std::uint64_t p) {
    return mpz_fdiv_ui(n.get_mpz_t(), static_cast<unsigned long>(p));
}

/// Reduce a rational into [0, p); p must not divide the denominator.
inline std::uint64_t reduce(const Rational& q, std::uint64_t p) {
    std::uint64_t num = reduce(q.get_num(), p);
    std::uint64_t den = reduce(q.get_den(), p);
    if (den == 0) throw input_error("DenominatorDivisible", "prime divides a denominator");
    return mul(num, inv(den, p), p);
}

/// Legendre symbol (a/p) for an odd prime p.
inline int legendre(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0) return 0;
    return pow(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

/// Tonelli-Shanks square root modulo an odd prime; a must be a square.
inline std::uint64_t sqrt(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0) return 0;
    if (p % 4 == 3) return pow(a, (p + 1) / 4, p);
    std::uint64_t q = p - 1;
    unsigned s = 0;
    while ((q & 1) == 0) {
        q >>= 1;
        ++s;
    }
    std::uint64_t z = 2;
    while (legendre(z, p) != -1) ++z;
    std::uint64_t m = s, c = pow(z, q, p), t = pow(a, q, p), r = pow(a, (q + 1) / 2, p);
    while (t != 1) {
        std::uint64_t i = 0, tt = t;
        while (tt != 1) {
            tt = mul(tt, tt, p);
            ++i;
        }
        std::uint64_t b = c;
        for (std::uint64_t j = 0; j + i + 1 < m; ++j) b = mul(b, b, p);
        m = i;
        c = mul(b, b, p);
        t = mul(t, c, p);
        r = mul(r, b, p);
    }
    return r;
}

}  // namespace modp

// ---------------------------------------------------------------------------
// small primes

inline constexpr std::uint32_t kTrialBound = 10000;

/// Primes up to `bound` by a plain sieve.
inline std::vector<std::uint32_t> primes_up_to(std::uint32_t bound) {
    std::vector<char> composite(bound + 1, 0);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i <= bound; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = std::uint64_t(i) * i; j <= bound; j += i) composite[j] = 1;
    }
    return out;
}

inline const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = primes_up_to(kTrialBound);
    return primes;
}

// ---------------------------------------------------------------------------
// primality

namespace detail {

inline bool miller_rabin_round(const Integer& n, const Integer& d, unsigned s, const Integer& base) {
    Integer x;
    mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    const Integer nm1 = n - 1;
    if (x == 1 || x == nm1) return true;
    for (unsigned i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == nm1) return true;
    }
    return false;
}

}  // namespace detail

/// Threshold below which the fixed witness set {2,...,17} is a proof.
inline const Integer& deterministic_mr_limit() {
    static const Integer limit("341550071728321");
    return limit;
}

/// Miller-Rabin. Deterministic below 3.4e14; above that 64 rounds with
/// reproducible pseudo-random bases (error below 2^-128).
inline bool is_prime(const Integer& n) {
    if (n < 2) return false;
    for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        if (n == p) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    if (n < 41 * 41) return true;

    Integer d = n - 1;
    unsigned s = 0;
    while (mpz_even_p(d.get_mpz_t())) {
        d /= 2;
        ++s;
    }
    static constexpr std::uint32_t fixed[] = {2, 3, 5, 7, 11, 13, 17};
    for (std::uint32_t b : fixed)
        if (!detail::miller_rabin_round(n, d, s, Integer(b))) return false;
    if (n < deterministic_mr_limit()) return true;

    std::mt19937_64 rng(0x5eed5eedULL);
    gmp_randclass gen(gmp_randinit_default);
    gen.seed(static_cast<unsigned long>(rng()));
    const Integer span = n - 3;
    for (int round = 0; round < 64 - 7; ++round) {
        Integer base = gen.get_z_range(span) + 2;
        if (!detail::miller_rabin_round(n, d, s, base)) return false;
    }
    return true;
}

inline bool is_prime(std::uint64_t n) { return is_prime(Integer(static_cast<unsigned long>(n))); }

// ---------------------------------------------------------------------------
// prime sets and factorizations

/// Sorted set of distinct primes.
class PrimeSet {
public:
    PrimeSet() = default;
    PrimeSet(std::initializer_list<long> primes) {
        for (long p : primes) insert(Integer(p));
    }

    void insert(const Integer& p) {
        if (!is_prime(p)) throw input_error("NotPrime", p.get_str() + " is not prime");
        primes_.insert(p);
    }
    void merge(const PrimeSet& other) { primes_.insert(other.primes_.begin(), other.primes_.end()); }
    bool contains(const Integer& p) const { return primes_.count(p) != 0; }
    bool empty() const { return primes_.empty(); }
    std::size_t size() const { return primes_.size(); }
    auto begin() const { return primes_.begin(); }
    auto end() const { return primes_.end(); }
    std::vector<Integer> to_vector() const { return {primes_.begin(), primes_.end()}; }

    bool operator==(const PrimeSet& o) const { return primes_ == o.primes_; }
    bool is_subset_of(const PrimeSet& o) const {
        return std::includes(o.primes_.begin(), o.primes_.end(), primes_.begin(), primes_.end());
    }

private:
    std::set<Integer> primes_;
};

struct PrimePower {
    Integer prime;
    unsigned exponent = 0;
    bool operator==(const PrimePower&) const = default;
};

struct Factorization {
    Integer value = 1;
    std::vector<PrimePower> factors;  // primes strictly increasing

    Integer product() const {
        Integer r = 1;
        for (const auto& f : factors) {
            Integer pe;
            mpz_pow_ui(pe.get_mpz_t(), f.prime.get_mpz_t(), f.exponent);
            r *= pe;
        }
        return r;
    }
    PrimeSet primes() const {
        PrimeSet s;
        for (const auto& f : factors) s.insert(f.prime);
        return s;
    }
    /// "7·17·41" style rendering; "1" for the empty product.
    std::string to_string() const {
        if (factors.empty()) return "1";
        std::string out;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (i) out += "·";
            out += factors[i].prime.get_str();
            if (factors[i].exponent > 1) out += "^" + std::to_string(factors[i].exponent);
        }
        return out;
    }
};

/// Raised when the rho iteration budget runs out. Carries everything found so far.
class FactorTimeout : public Error {
public:
    FactorTimeout(std::uint64_t budget, Factorization partial, std::vector<Integer> unfactored)
        : Error(ErrorKind::budget, "Timeout",
                "factorization budget of " + std::to_string(budget) + " rho iterations exhausted"),
          budget_(budget), partial_(std::move(partial)), unfactored_(std::move(unfactored)) {}
    std::uint64_t budget() const noexcept { return budget_; }
    const Factorization& partial() const noexcept { return partial_; }
    const std::vector<Integer>& unfactored() const noexcept { return unfactored_; }

private:
    std::uint64_t budget_;
    Factorization partial_;
    std::vector<Integer> unfactored_;
};

// ---------------------------------------------------------------------------
// persistent factorization cache

/// Map from integer to its factorization, optionally backed by a JSON file.
/// Readers share; writers are exclusive.
class FactorCache {
public:
    static constexpr const char* kFormat = "avdiv-factor-cache";
    static constexpr int kVersion = 1;

    FactorCache() = default;
    explicit FactorCache(std::string path) : path_(std::move(path)) { load(); }

    std::optional<Factorization> find(const Integer& n) const {
        std::shared_lock lock(mutex_);
        auto it = entries_.find(n.get_str());
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    void store(const Factorization& f) {
        std::unique_lock lock(mutex_);
        entries_[f.value.get_str()] = f;
        dirty_ = true;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return entries_.size();
    }

    void save() const {
        std::shared_lock lock(mutex_);
        if (path_.empty() || !dirty_) return;
        nlohmann::json doc;
        doc["format"] = kFormat;
        doc["version"] = kVersion;
        nlohmann::json entries = nlohmann::json::object();
        for (const auto& [key, f] : entries_) {
            nlohmann::json list = nlohmann::json::array();
            for (const auto& pp : f.factors) list.push_back({pp.prime.get_str(), pp.exponent});
            entries[key] = list;
        }
        doc["entries"] = entries;
        std::ofstream out(path_);
        out << doc.dump(1) << '\n';
    }

private:
    void load() {
        std::ifstream in(path_);
        if (!in) return;
        try {
            nlohmann::json doc = nlohmann::json::parse(in);
            if (doc.at("format") != kFormat || doc.at("version") != kVersion)
                throw std::runtime_error("unknown cache format");
            std::map<std::string, Factorization> loaded;
            for (const auto& [key, list] : doc.at("entries").items()) {
                Factorization f;
                f.value = Integer(key);
                for (const auto& pe : list)
                    f.factors.push_back({Integer(pe.at(0).get<std::string>()), pe.at(1).get<unsigned>()});
                // never trust a stale or hand-edited entry
                if (f.product() != f.value) throw std::runtime_error("entry " + key + " does not multiply out");
                for (std::size_t i = 0; i < f.factors.size(); ++i) {
                    if (!is_prime(f.factors[i].prime) || f.factors[i].exponent == 0 ||
                        (i && !(f.factors[i - 1].prime < f.factors[i].prime)))
                        throw std::runtime_error("entry " + key + " is not a prime factorization");
                }
                loaded.emplace(key, std::move(f));
            }
            entries_ = std::move(loaded);
        } catch (const std::exception& e) {
            std::cerr << "warning: ignoring factor cache " << path_ << " (" << e.what() << ")\n";
            entries_.clear();
        }
    }

    std::string path_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, Factorization> entries_;
    bool dirty_ = false;
};

struct FactorOptions {
    std::uint64_t budget = 100'000'000;  ///< rho iterations across the whole call
    std::uint32_t trial_bound = kTrialBound;
    FactorCache* cache = nullptr;
};

// ---------------------------------------------------------------------------
// Pollard rho, Brent's cycle finding with batched gcds

namespace detail {

struct RhoBudget {
    std::uint64_t limit;
    std::uint64_t used = 0;
    bool spend(std::uint64_t k) {
        used += k;
        return used <= limit;
    }
};

inline std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

/// One rho attempt on a word-size composite. Returns 0 when the budget is gone,
/// n when the attempt failed, else a proper divisor.
inline std::uint64_t brent_u64(std::uint64_t n, std::uint64_t c, std::uint64_t seed, RhoBudget& budget) {
    constexpr std::uint64_t m = 128;
    auto f = [&](std::uint64_t v) { return modp::add(modp::mul(v, v, n), c, n); };
    std::uint64_t y = seed % n, x = y, ys = y, q = 1, g = 1, r = 1;
    do {
        x = y;
        for (std::uint64_t i = 0; i < r; ++i) y = f(y);
        std::uint64_t k = 0;
        do {
            ys = y;
            std::uint64_t steps = std::min(m, r - k);
            if (!budget.spend(steps)) return 0;
            for (std::uint64_t i = 0; i < steps; ++i) {
                y = f(y);
                q = modp::mul(q, x > y ? x - y : y - x, n);
            }
            g = gcd_u64(q, n);
            k += m;
        } while (k < r && g == 1);
        r *= 2;
    } while (g == 1);
    if (g == n) {
        do {
            ys = f(ys);
            g = gcd_u64(x > ys ? x - ys : ys - x, n);
        } while (g == 1);
    }
    return g;
}

inline Integer brent_mpz(const Integer& n, unsigned long c, const Integer& seed, RhoBudget& budget) {
    constexpr std::uint64_t m = 128;
    auto f = [&](Integer& v) {
        v = v * v + c;
        mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    Integer y = seed % n, x = y, ys = y, q = 1, g = 1, diff;
    std::uint64_t r = 1;
    do {
        x = y;
        for (std::uint64_t i = 0; i < r; ++i) f(y);
        std::uint64_t k = 0;
        do {
            ys = y;
            std::uint64_t steps = std::min(m, r - k);
            if (!budget.spend(steps)) return 0;
            for (std::uint64_t i = 0; i < steps; ++i) {
                f(y);
                diff = x - y;
                q = q * abs(diff) % n;
            }
            g = gcd(q, n);
            k += m;
        } while (k < r && g == 1);
        r *= 2;
    } while (g == 1);
    if (g == n) {
        do {
            f(ys);
            diff = x - ys;
            g = gcd(abs(diff), n);
        } while (g == 1);
    }
    return g;
}

/// Proper divisor of the composite n, or 0 when the budget runs out.
inline Integer find_divisor(const Integer& n, RhoBudget& budget) {
    if (mpz_even_p(n.get_mpz_t())) return 2;
    if (mpz_perfect_power_p(n.get_mpz_t())) {
        for (unsigned long k = 2;; ++k) {
            Integer root;
            if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k)) return root;
        }
    }
    const bool word = mpz_sizeinbase(n.get_mpz_t(), 2) <= 63;
    for (unsigned long c = 1;; ++c) {
        if (word) {
            std::uint64_t nn = mpz_get_ui(n.get_mpz_t());
            std::uint64_t g = brent_u64(nn, c, 2 + c, budget);
            if (g == 0) return 0;
            if (g != nn) return Integer(static_cast<unsigned long>(g));
        } else {
            Integer g = brent_mpz(n, c, Integer(2 + c), budget);
            if (g == 0) return 0;
            if (g != n) return g;
        }
    }
}

inline void add_prime(std::map<Integer, unsigned>& acc, const Integer& p, unsigned e) { acc[p] += e; }

}  // namespace detail

/// Complete factorization: trial division to `trial_bound`, then Brent-rho with
/// recursive splitting. Throws FactorTimeout when the budget is exhausted.
inline Factorization factor(const Integer& n, const FactorOptions& opts = {}) {
    if (n < 1) throw input_error("NotPositive", "factor() requires n >= 1, got " + n.get_str());
    if (opts.cache) {
        if (auto hit = opts.cache->find(n)) return *hit;
    }

    std::map<Integer, unsigned> acc;
    Integer rest = n;
    for (std::uint32_t p : small_primes()) {
        if (p > opts.trial_bound) break;
        if (Integer(p) * p > rest) break;
        unsigned e = 0;
        while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
            mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
            ++e;
        }
        if (e) detail::add_prime(acc, Integer(p), e);
    }

    detail::RhoBudget budget{opts.budget};
    std::vector<Integer> stack;
    if (rest > 1) stack.push_back(rest);
    while (!stack.empty()) {
        Integer m = stack.back();
        stack.pop_back();
        if (is_prime(m)) {
            detail::add_prime(acc, m, 1);
            continue;
        }
        Integer d = detail::find_divisor(m, budget);
        if (d == 0) {
            stack.push_back(m);
            Factorization partial;
            partial.value = 1;
            for (const auto& [p, e] : acc) partial.factors.push_back({p, e});
            partial.value = partial.product();
            throw FactorTimeout(opts.budget, std::move(partial), std::move(stack));
        }
        stack.push_back(d);
        stack.push_back(m / d);
    }

    Factorization f;
    f.value = n;
    for (const auto& [p, e] : acc) f.factors.push_back({p, e});
    if (opts.cache && mpz_sizeinbase(n.get_mpz_t(), 10) > 15) opts.cache->store(f);
    return f;
}

/// Remove every prime of `primes` from n.
inline Integer strip_primes(Integer n, const PrimeSet& primes) {
    for (const auto& p : primes) {
        if (n == 0) break;
        mpz_remove(n.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
    }
    return n;
}

/// Product of the distinct primes of n outside `exclude`.
inline Integer radical(const Integer& n, const PrimeSet& exclude = {}, const FactorOptions& opts = {}) {
    Factorization f = factor(n, opts);
    Integer r = 1;
    for (const auto& pp : f.factors)
        if (!exclude.contains(pp.prime)) r *= pp.prime;
    return r;
}

/// Squarefree factorization of the radical of n outside `exclude`.
inline Factorization radical_factorization(const Integer& n, const PrimeSet& exclude = {},
                                           const FactorOptions& opts = {}) {
    Factorization f = factor(strip_primes(n, exclude), opts);
    Factorization r;
    r.value = 1;
    for (const auto& pp : f.factors) {
        r.factors.push_back({pp.prime, 1});
        r.value *= pp.prime;
    }
    return r;
}

// ---------------------------------------------------------------------------
// prime supports without factoring
//
// A positive integer g stands for the set of primes dividing it. These helpers
// compare such sets with gcds only, so they work on integers far beyond the
// reach of rho.

/// True iff every prime dividing a also divides b (a, b >= 1).
inline bool support_subset(Integer a, const Integer& b) {
    for (;;) {
        if (a == 1) return true;
        Integer g = gcd(a, b);
        if (g == 1) return false;
        while (mpz_divisible_p(a.get_mpz_t(), g.get_mpz_t())) a /= g;
        Integer h = gcd(a, g);
        while (h > 1) {
            while (mpz_divisible_p(a.get_mpz_t(), h.get_mpz_t())) a /= h;
            h = gcd(a, h);
        }
    }
}

inline bool same_support(const Integer& a, const Integer& b) { return support_subset(a, b) && support_subset(b, a); }

}  // namespace avdiv
