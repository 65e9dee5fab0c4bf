// Copyright 2026 The knforge developers.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include <gmpxx.h>
#include <mpfr.h>

#include "knforge/errors.hpp"

namespace knf {

// ---------------------------------------------------------------------------
// factored integers
// ---------------------------------------------------------------------------

struct PrimeFactor {
    mpz_class prime;
    unsigned exp = 0;
    // true when primality was established deterministically (small value or
    // Miller-Rabin below the deterministic-base bound); false means the
    // factor is only a Baillie-PSW probable prime.
    bool certified = true;
};

struct FactoredInt {
    mpz_class value = 1;
    std::vector<PrimeFactor> factors; // primes ascending, exponents >= 1
    // false when a composite cofactor survived the splitting budget;
    // the cofactor is value / prod(prime^exp) and is NOT listed in factors.
    bool complete = true;

    mpz_class cofactor() const {
        mpz_class rest = value;
        for (const auto& f : factors) {
            mpz_class pe;
            mpz_pow_ui(pe.get_mpz_t(), f.prime.get_mpz_t(), f.exp);
            rest /= pe;
        }
        return rest;
    }

    bool all_certified() const {
        return std::all_of(factors.begin(), factors.end(),
                           [](const PrimeFactor& f) { return f.certified; });
    }
};

// ---------------------------------------------------------------------------
// primality
// ---------------------------------------------------------------------------

namespace detail {

inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

inline uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

// one Miller-Rabin round, n-1 = d * 2^s with d odd
inline bool mr_round_u64(uint64_t n, uint64_t d, int s, uint64_t base) {
    base %= n;
    if (base == 0) return true;
    uint64_t x = powmod_u64(base, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod_u64(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

inline bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                       23ull, 29ull, 31ull, 37ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    // first twelve primes: deterministic far beyond 2^64
    for (uint64_t b : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                       23ull, 29ull, 31ull, 37ull})
        if (!mr_round_u64(n, d, s, b)) return false;
    return true;
}

// largest value for which Miller-Rabin with the first 13 prime bases is a
// deterministic primality proof (Sorenson-Webster): 3,317,044,064,679,887,385,961,981
inline const mpz_class& mr_deterministic_bound() {
    static const mpz_class bound("3317044064679887385961981");
    return bound;
}

inline bool mr_round_mpz(const mpz_class& n, const mpz_class& d, unsigned long s,
                         unsigned long base) {
    mpz_class x, b(base);
    b %= n;
    if (b == 0) return true;
    mpz_powm(x.get_mpz_t(), b.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n - 1) return true;
    for (unsigned long i = 1; i < s; ++i) {
        x = (x * x) % n;
        if (x == n - 1) return true;
    }
    return false;
}

} // namespace detail

enum class Primality { composite, certified_prime, probable_prime };

// Deterministic Miller-Rabin (13 prime bases) below ~3.3e24; Baillie-PSW
// (via GMP) above that, reported as a probable prime.
inline Primality classify_prime(const mpz_class& n) {
    if (n < 2) return Primality::composite;
    if (mpz_fits_ulong_p(n.get_mpz_t()) && n.fits_ulong_p()) {
        unsigned long v = n.get_ui();
        if (v <= UINT64_MAX)
            return detail::is_prime_u64(v) ? Primality::certified_prime
                                           : Primality::composite;
    }
    for (unsigned long p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}) {
        if (n == p) return Primality::certified_prime;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return Primality::composite;
    }
    if (n < detail::mr_deterministic_bound()) {
        mpz_class d = n - 1;
        unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
        mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
        for (unsigned long b : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41})
            if (!detail::mr_round_mpz(n, d, s, b)) return Primality::composite;
        return Primality::certified_prime;
    }
    int r = mpz_probab_prime_p(n.get_mpz_t(), 25);
    if (r == 0) return Primality::composite;
    if (r == 2) return Primality::certified_prime;
    return Primality::probable_prime;
}

inline bool is_prime(const mpz_class& n) {
    return classify_prime(n) != Primality::composite;
}

// ---------------------------------------------------------------------------
// shared prime sieve
// ---------------------------------------------------------------------------

namespace detail {

// grows on demand, guarded; default hard limit keeps runaway requests at bay
inline constexpr uint64_t kSieveLimit = uint64_t(1) << 26;

class Sieve {
  public:
    static Sieve& instance() {
        static Sieve s;
        return s;
    }

    // all primes p <= n, ascending
    std::vector<uint64_t> upto(uint64_t n) {
        if (n > kSieveLimit)
            throw range_too_large("sieve request beyond limit 2^26: " +
                                  std::to_string(n));
        std::lock_guard<std::mutex> lock(mu_);
        ensure(n);
        std::vector<uint64_t> out;
        for (uint64_t p : primes_) {
            if (p > n) break;
            out.push_back(p);
        }
        return out;
    }

    // first k primes satisfying pred, scanning ascending; grows as needed
    template <class Pred>
    std::vector<uint64_t> first_matching(size_t k, Pred pred) {
        std::lock_guard<std::mutex> lock(mu_);
        std::vector<uint64_t> out;
        uint64_t bound = 1 << 12;
        for (;;) {
            ensure(bound);
            out.clear();
            for (uint64_t p : primes_) {
                if (pred(p)) {
                    out.push_back(p);
                    if (out.size() == k) return out;
                }
            }
            if (bound >= kSieveLimit)
                throw range_too_large("prime-class request exhausted the sieve");
            bound *= 2;
        }
    }

  private:
    void ensure(uint64_t n) {
        if (n <= limit_) return;
        uint64_t target = std::max<uint64_t>(n, 1 << 16);
        std::vector<bool> comp(target + 1, false);
        primes_.clear();
        for (uint64_t i = 2; i <= target; ++i) {
            if (!comp[i]) {
                primes_.push_back(i);
                for (uint64_t j = i * i; j <= target; j += i) comp[j] = true;
            }
        }
        limit_ = target;
    }

    std::mutex mu_;
    std::vector<uint64_t> primes_;
    uint64_t limit_ = 0;
};

} // namespace detail

// primes strictly between lo and hi (real endpoints, both exclusive)
inline std::vector<uint64_t> primes_in_range(double lo, double hi) {
    if (hi <= lo) return {};
    if (hi > double(detail::kSieveLimit))
        throw range_too_large("primes_in_range beyond sieve limit 2^26");
    auto all = detail::Sieve::instance().upto(uint64_t(hi));
    std::vector<uint64_t> out;
    for (uint64_t p : all)
        if (double(p) > lo && double(p) < hi) out.push_back(p);
    return out;
}

struct RangeStats {
    double inv_sum = 0; // sum of 1/p, rounded up
    uint64_t count = 0;
};

// primes in the open interval (2^t, 2^(t+u)); the inverse sum is computed in
// extended precision and rounded toward +inf so downstream thresholds stay
// conservative
inline RangeStats range_stats(double t, double u) {
    auto ps = primes_in_range(std::pow(2.0, t), std::pow(2.0, t + u));
    mpfr_t acc, term;
    mpfr_init2(acc, 192);
    mpfr_init2(term, 192);
    mpfr_set_ui(acc, 0, MPFR_RNDU);
    for (uint64_t p : ps) {
        mpfr_set_ui(term, 1, MPFR_RNDU);
        mpfr_div_ui(term, term, static_cast<unsigned long>(p), MPFR_RNDU);
        mpfr_add(acc, acc, term, MPFR_RNDU);
    }
    RangeStats st;
    st.inv_sum = mpfr_get_d(acc, MPFR_RNDU);
    st.count = ps.size();
    mpfr_clear(acc);
    mpfr_clear(term);
    return st;
}

struct PrimeClassPrefix {
    std::vector<uint64_t> primes;
    mpq_class inv_sum; // exact sum of 1/p
    mpz_class product; // exact product of the primes
};

// First k primes in a residue class: modulus >= 2 selects primes p with
// p % modulus == residue.  modulus == 1 switches to "first k primes strictly
// greater than residue".
inline PrimeClassPrefix class_prime_prefix(uint64_t modulus, uint64_t residue,
                                           size_t k) {
    PrimeClassPrefix out;
    if (k == 0) {
        out.inv_sum = 0;
        out.product = 1;
        return out;
    }
    auto pred = [&](uint64_t p) {
        return modulus == 1 ? p > residue : p % modulus == residue;
    };
    out.primes = detail::Sieve::instance().first_matching(k, pred);
    out.inv_sum = 0;
    out.product = 1;
    for (uint64_t p : out.primes) {
        out.inv_sum += mpq_class(1, static_cast<unsigned long>(p));
        out.product *= static_cast<unsigned long>(p);
    }
    out.inv_sum.canonicalize();
    return out;
}

// largest k such that multiplier * (product of the first k class primes)
// stays strictly below bound; the class is selected as in class_prime_prefix
inline size_t class_prime_cutoff(uint64_t modulus, uint64_t residue,
                                 const mpz_class& multiplier,
                                 const mpz_class& bound) {
    if (multiplier < 1 || bound < 1) throw bad_input("class_prime_cutoff bounds");
    size_t k = 0;
    size_t batch = 64;
    mpz_class prod = multiplier;
    size_t consumed = 0;
    while (true) {
        auto pre = class_prime_prefix(modulus, residue, consumed + batch);
        if (pre.primes.size() < consumed + batch)
            throw range_too_large("prime class exhausted in class_prime_cutoff");
        for (size_t i = consumed; i < pre.primes.size(); ++i) {
            prod *= static_cast<unsigned long>(pre.primes[i]);
            if (prod >= bound) return k;
            ++k;
        }
        consumed = pre.primes.size();
    }
}

// all prime powers p^j <= hi, ascending
inline std::vector<uint64_t> prime_powers_upto(uint64_t hi) {
    std::vector<uint64_t> out;
    for (uint64_t p : detail::Sieve::instance().upto(hi)) {
        uint64_t v = p;
        while (true) {
            out.push_back(v);
            if (v > hi / p) break;
            v *= p;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// factoring
// ---------------------------------------------------------------------------

// hints: map from decimal value to asserted prime factors; every asserted
// factor is re-verified (primality and divisibility) before use
using FactorHints = std::map<std::string, std::vector<mpz_class>>;

// parse "N: p1 p2 p3" lines; '#' starts a comment, blank lines skipped
inline FactorHints parse_hints(std::istream& in) {
    FactorHints hints;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = line.substr(0, colon);
        key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
        if (key.empty()) continue;
        std::istringstream rest(line.substr(colon + 1));
        std::vector<mpz_class> ps;
        std::string tok;
        while (rest >> tok) ps.emplace_back(tok);
        if (!ps.empty()) hints[key] = std::move(ps);
    }
    return hints;
}

inline FactorHints load_hints_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw bad_input("cannot open hints file: " + path);
    return parse_hints(in);
}

namespace detail {

// Brent's cycle variant of Pollard rho with batched gcd, 64-bit fast path.
// Returns a nontrivial factor of odd composite n, or 0 when the budget runs
// out.
inline uint64_t brent_u64(uint64_t n, uint64_t c, uint64_t budget) {
    if (n % 2 == 0) return 2;
    uint64_t y = 2, r = 1, q = 1, g = 1, x = 0, ys = 0;
    auto f = [&](uint64_t v) { return (mulmod_u64(v, v, n) + c) % n; };
    while (g == 1 && budget > 0) {
        x = y;
        for (uint64_t i = 0; i < r; ++i) y = f(y);
        uint64_t k = 0;
        while (k < r && g == 1) {
            ys = y;
            uint64_t lim = std::min<uint64_t>(128, r - k);
            for (uint64_t i = 0; i < lim; ++i) {
                y = f(y);
                uint64_t d = x > y ? x - y : y - x;
                if (d) q = mulmod_u64(q, d, n);
            }
            g = std::gcd(q, n);
            k += lim;
            if (budget < lim) budget = 0; else budget -= lim;
        }
        r *= 2;
    }
    if (g == n) {
        // backtrack one step at a time
        do {
            ys = f(ys);
            uint64_t d = x > ys ? x - ys : ys - x;
            g = std::gcd(d, n);
        } while (g == 1);
    }
    return (g == n || g == 1) ? 0 : g;
}

inline mpz_class brent_mpz(const mpz_class& n, unsigned long c, uint64_t budget) {
    mpz_class y(2), x, ys, q(1), g(1), d;
    uint64_t r = 1;
    auto f = [&](mpz_class& v) {
        v = (v * v + c) % n;
    };
    while (g == 1 && budget > 0) {
        x = y;
        for (uint64_t i = 0; i < r; ++i) f(y);
        uint64_t k = 0;
        while (k < r && g == 1) {
            ys = y;
            uint64_t lim = std::min<uint64_t>(128, r - k);
            for (uint64_t i = 0; i < lim; ++i) {
                f(y);
                d = x - y;
                if (d != 0) q = (q * abs(d)) % n;
            }
            mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            k += lim;
            if (budget < lim) budget = 0; else budget -= lim;
        }
        r *= 2;
    }
    if (g == n) {
        do {
            f(ys);
            d = abs(x - ys);
            mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        } while (g == 1);
    }
    if (g == n || g == 1) return 0;
    return g;
}

inline mpz_class rho_split(const mpz_class& n, uint64_t budget) {
    // perfect powers first: rho behaves badly on them
    if (mpz_perfect_power_p(n.get_mpz_t())) {
        for (unsigned long k = 2; k <= mpz_sizeinbase(n.get_mpz_t(), 2); ++k) {
            mpz_class root;
            if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k)) return root;
        }
    }
    if (n.fits_ulong_p()) {
        uint64_t v = n.get_ui();
        for (uint64_t c = 1; c < 32; ++c) {
            uint64_t g = brent_u64(v, c, budget);
            if (g) return mpz_class(static_cast<unsigned long>(g));
        }
        return 0;
    }
    for (unsigned long c = 1; c < 32; ++c) {
        mpz_class g = brent_mpz(n, c, budget);
        if (g != 0) return g;
    }
    return 0;
}

inline void push_factor(std::vector<std::pair<mpz_class, unsigned>>& acc,
                        const mpz_class& p, unsigned e) {
    for (auto& [q, k] : acc)
        if (q == p) {
            k += e;
            return;
        }
    acc.emplace_back(p, e);
}

} // namespace detail

struct FactorOptions {
    uint64_t trial_limit = 1 << 16;    // trial division by primes up to this
    uint64_t rho_budget = uint64_t(1) << 26; // Brent iterations per composite
    const FactorHints* hints = nullptr;
};

inline FactoredInt factor_int(const mpz_class& n,
                              const FactorOptions& opt = {}) {
    if (n < 1) throw bad_input("factor_int requires n >= 1");
    FactoredInt out;
    out.value = n;
    if (n == 1) return out;

    std::vector<std::pair<mpz_class, unsigned>> acc;
    mpz_class rest = n;

    if (opt.hints) {
        auto it = opt.hints->find(n.get_str());
        if (it != opt.hints->end()) {
            for (const mpz_class& p : it->second) {
                if (p < 2 || !is_prime(p)) continue; // re-verification failed
                unsigned e = 0;
                while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
                    rest /= p;
                    ++e;
                }
                if (e) detail::push_factor(acc, p, e);
            }
        }
    }

    // trial division
    if (rest > 1) {
        auto smalls = detail::Sieve::instance().upto(opt.trial_limit);
        for (uint64_t p : smalls) {
            if (mpz_class(p) * p > rest) break;
            unsigned e = 0;
            while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
                mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
                ++e;
            }
            if (e) detail::push_factor(acc, mpz_class(static_cast<unsigned long>(p)), e);
            if (rest == 1) break;
        }
    }

    // split what remains
    bool complete = true;
    std::vector<mpz_class> stack;
    if (rest > 1) stack.push_back(rest);
    while (!stack.empty()) {
        mpz_class m = stack.back();
        stack.pop_back();
        if (m == 1) continue;
        if (is_prime(m)) {
            detail::push_factor(acc, m, 1);
            continue;
        }
        mpz_class g = detail::rho_split(m, opt.rho_budget);
        if (g == 0) {
            complete = false; // composite survives as the (unlisted) cofactor
            continue;
        }
        stack.push_back(g);
        stack.push_back(m / g);
    }

    std::sort(acc.begin(), acc.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [p, e] : acc) {
        PrimeFactor f;
        f.prime = p;
        f.exp = e;
        f.certified = classify_prime(p) == Primality::certified_prime;
        out.factors.push_back(std::move(f));
    }
    out.complete = complete;
    return out;
}

inline FactoredInt factor_u64(uint64_t n, const FactorOptions& opt = {}) {
    return factor_int(mpz_class(static_cast<unsigned long>(n)), opt);
}

// ---------------------------------------------------------------------------
// arithmetic on factored integers
// ---------------------------------------------------------------------------

namespace detail {
inline void require_complete(const FactoredInt& f, const char* who) {
    if (!f.complete)
        throw incomplete_factorization(std::string(who) +
                                       " requires a complete factorization");
}
} // namespace detail

inline mpz_class euler_phi(const FactoredInt& f) {
    detail::require_complete(f, "euler_phi");
    mpz_class r = 1;
    for (const auto& pf : f.factors) {
        mpz_class pe;
        mpz_pow_ui(pe.get_mpz_t(), pf.prime.get_mpz_t(), pf.exp - 1);
        r *= pe * (pf.prime - 1);
    }
    return r;
}

inline int moebius(const FactoredInt& f) {
    detail::require_complete(f, "moebius");
    for (const auto& pf : f.factors)
        if (pf.exp > 1) return 0;
    return f.factors.size() % 2 == 0 ? 1 : -1;
}

// W(n) = 2^(number of distinct primes)
inline mpz_class w_int(const FactoredInt& f) {
    detail::require_complete(f, "w_int");
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, f.factors.size());
    return r;
}

inline mpz_class rad_int(const FactoredInt& f) {
    detail::require_complete(f, "rad_int");
    mpz_class r = 1;
    for (const auto& pf : f.factors) r *= pf.prime;
    return r;
}

// ---------------------------------------------------------------------------
// prime powers
// ---------------------------------------------------------------------------

// decompose q = p^e; throws not_prime_power otherwise
inline std::pair<mpz_class, unsigned> prime_power_split(const mpz_class& q) {
    if (q < 2) throw not_prime_power("q must be >= 2");
    if (is_prime(q)) return {q, 1};
    for (unsigned long k = 2; k <= mpz_sizeinbase(q.get_mpz_t(), 2); ++k) {
        mpz_class root;
        if (mpz_root(root.get_mpz_t(), q.get_mpz_t(), k) && is_prime(root))
            return {root, static_cast<unsigned>(k)};
    }
    throw not_prime_power("not a prime power: " + q.get_str());
}

inline bool is_prime_power(const mpz_class& q) {
    try {
        prime_power_split(q);
        return true;
    } catch (const not_prime_power&) {
        return false;
    }
}

// ---------------------------------------------------------------------------
// factoring q^n - 1 through cyclotomic pieces
// ---------------------------------------------------------------------------

// Phi_d(q), computed exactly as prod_{e | d} (q^e - 1)^{mu(d/e)}
inline mpz_class cyclotomic_at(unsigned d, const mpz_class& q) {
    if (d == 0 || q < 2) throw bad_input("cyclotomic_at requires d >= 1, q >= 2");
    mpz_class num = 1, den = 1;
    for (unsigned e = 1; e <= d; ++e) {
        if (d % e) continue;
        int mu = moebius(factor_u64(d / e));
        if (mu == 0) continue;
        mpz_class qe;
        mpz_pow_ui(qe.get_mpz_t(), q.get_mpz_t(), e);
        qe -= 1;
        (mu > 0 ? num : den) *= qe;
    }
    mpz_class r;
    mpz_divexact(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return r;
}

// q^n - 1 factored piecewise: each Phi_d(q) with d | n is factored on its
// own, so the composites handed to rho stay far smaller than q^n - 1 itself.
// A hint entry keyed by the full value short-circuits to plain factor_int.
inline FactoredInt factor_qn_minus_1(const mpz_class& q, unsigned n,
                                     const FactorOptions& opt = {}) {
    if (q < 2 || n == 0)
        throw bad_input("factor_qn_minus_1 requires q >= 2, n >= 1");
    mpz_class full;
    mpz_pow_ui(full.get_mpz_t(), q.get_mpz_t(), n);
    full -= 1;
    if (opt.hints && opt.hints->count(full.get_str()))
        return factor_int(full, opt);

    std::vector<std::pair<mpz_class, unsigned>> acc;
    bool complete = true;
    for (unsigned d = 1; d <= n; ++d) {
        if (n % d) continue;
        FactoredInt piece = factor_int(cyclotomic_at(d, q), opt);
        if (!piece.complete) complete = false;
        for (const auto& pf : piece.factors)
            detail::push_factor(acc, pf.prime, pf.exp);
    }

    std::sort(acc.begin(), acc.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    FactoredInt out;
    out.value = full;
    for (auto& [p, e] : acc) {
        PrimeFactor f;
        f.prime = p;
        f.exp = e;
        f.certified = classify_prime(p) == Primality::certified_prime;
        out.factors.push_back(std::move(f));
    }
    out.complete = complete;
    return out;
}

} // namespace knf
