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

#include <atomic>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "knforge/cert.hpp"
#include "knforge/linear.hpp"

namespace knf {

// Witness searches.  Every scan here is replayable: the exhaustive scans
// walk element indices ascending, and the seeded scans draw indices from a
// fixed mt19937_64 stream, so a "none" outcome is a deterministic claim
// about exactly the scanned candidates, never about the whole field.

enum class SearchStrategy { seeded_random, exhaustive };

namespace detail {

// uniform-enough index in [0, n): one extra 64-bit word keeps the modular
// bias below 2^-64 while the draw stays a pure function of the stream
inline mpz_class draw_index(std::mt19937_64& rng, const mpz_class& n) {
    const size_t words = mpz_sizeinbase(n.get_mpz_t(), 2) / 64 + 2;
    mpz_class acc = 0;
    for (size_t i = 0; i < words; ++i) {
        acc <<= 64;
        acc += mpz_class(static_cast<unsigned long>(rng()));
    }
    return acc % n;
}

// seeded draw of a field generator, accepted once its minimal polynomial
// over F_p has degree en (the element generates the field as an algebra)
inline FFElement seeded_generator(Fld F, uint64_t seed) {
    std::mt19937_64 rng(seed);
    while (true) {
        FFElement a = FFElement::from_index(F, draw_index(rng, F->order));
        if (a.is_zero()) continue;
        if (minimal_poly_over_Fp(a).size() == F->d + 1) return a;
    }
}

// canonical root of x^2 + 1 in F_q (needs q = 1 mod 4): of the two roots,
// keep the one with the smaller integer lift
inline FFElement root_of_x2_plus_1(Fld F) {
    auto one = FFElement::one(F);
    FFPoly quad(F, {one, FFElement::zero(F), one});
    std::mt19937_64 rng(F->seed ^ 0x2545f4914f6cdd1dull);
    FFElement b = find_root(quad, rng);
    FFElement b2 = -b;
    if (!b.in_subfield() || !b2.in_subfield())
        throw error("root of x^2 + 1 escaped the subfield (internal)");
    if (subfield_rank(b2) < subfield_rank(b)) std::swap(b, b2);
    return b;
}

} // namespace detail

// first normal element located by the chosen scan; seeded draws come from
// the field's own seed, so runs replay. budget counts candidates examined.
inline FFElement find_normal(Fld F,
                             SearchStrategy strategy = SearchStrategy::seeded_random,
                             uint64_t budget = 1u << 20) {
    if (budget == 0) throw bad_input("budget must be positive");
    if (strategy == SearchStrategy::exhaustive) {
        mpz_class idx = 1;
        for (uint64_t used = 0; used < budget && idx < F->order; ++used, ++idx) {
            FFElement a = FFElement::from_index(F, idx);
            if (k_normality(a) == 0) return a;
        }
        throw budget_exhausted("no normal element in the scanned prefix");
    }
    std::mt19937_64 rng(F->seed);
    for (uint64_t used = 0; used < budget; ++used) {
        FFElement a = FFElement::from_index(F, detail::draw_index(rng, F->order));
        if (!a.is_zero() && k_normality(a) == 0) return a;
    }
    throw budget_exhausted("no normal element within the sampling budget");
}

// image of the first normal element (ascending index scan, deterministic)
// under L_f for f | x^n - 1; the q-order drops by exactly f, so the result
// is (deg f)-normal. Composes: the result for f1*f2 equals L_{f1} applied
// to the result for f2.
inline FFElement construct_k_normal(Fld F, const FFPoly& f) {
    fq_poly_checked(f);
    if (f.is_zero()) throw not_a_divisor("the zero polynomial is not a divisor");
    FFPoly xn1 = FFPoly::x_pow_minus_one(F, F->n);
    if (!(xn1 % f).is_zero()) throw not_a_divisor("f must divide x^n - 1");
    FFElement a = find_normal(F, SearchStrategy::exhaustive);
    return q_associate_eval(f, a);
}

// additive-orbit test for F_{q^5}: beta = L_f(a) for a seeded generator a,
// with f = (x-1)^2 when 5 | q and f = x^2 - bx + 1 otherwise, where b is
// the smaller-lift root of y^2 + y - 1. Scans beta + j over the prime
// subfield in ascending j and certifies the first primitive 2-normal hit.
// "none" is a claim about this one orbit, replayable from (q, seed).
inline std::optional<Certificate> test_explicit5(const mpz_class& q,
                                                 uint64_t seed = 1,
                                                 const FactorOptions& opt = {}) {
    auto [p, e] = prime_power_split(q);
    unsigned long r5 = mpz_fdiv_ui(q.get_mpz_t(), 5);
    if (r5 != 0 && r5 != 1 && r5 != 4)
        throw bad_residue("additive orbit test needs q = 0 or +-1 mod 5");
    FieldPtr hold = make_field(mpz_get_ui(p.get_mpz_t()), e, 5, seed);
    Fld F = hold.get();
    FFPoly f = FFPoly::one(F);
    if (r5 == 0) {
        auto one = FFElement::one(F);
        FFPoly xm1(F, {-one, one});
        f = xm1 * xm1;
    } else {
        f = factor_x5_special(F).factors[1];
    }
    FFElement a = detail::seeded_generator(F, seed);
    FFElement beta = q_associate_eval(f, a);
    FactoredInt fac = factor_qn_minus_1(q, 5, opt);
    for (uint64_t j = 0; j < F->p; ++j) {
        FFElement c = beta + FFElement::from_int(F, j);
        if (c.is_zero()) continue;
        if (is_primitive(c, fac) && k_normality(c) == 2)
            return make_certificate(c, fac);
    }
    return std::nullopt;
}

// additive-orbit test for F_{q^4}, q = 1 mod 4: b^2 = -1 with the smaller
// lift, f = (x+1)(x+b), beta = a^{q^2} + (b+1)a^q + b a for a seeded
// generator a. Any primitive element of Im L_f is automatically 2-normal;
// the certificate re-verifies k = 2 anyway.
inline std::optional<Certificate> test_explicit4(const mpz_class& q,
                                                 uint64_t seed = 1,
                                                 const FactorOptions& opt = {}) {
    auto [p, e] = prime_power_split(q);
    if (mpz_fdiv_ui(q.get_mpz_t(), 4) != 1)
        throw bad_residue("additive orbit test needs q = 1 mod 4");
    FieldPtr hold = make_field(mpz_get_ui(p.get_mpz_t()), e, 4, seed);
    Fld F = hold.get();
    auto one = FFElement::one(F);
    FFElement b = detail::root_of_x2_plus_1(F);
    FFPoly f(F, {b, b + one, one});
    FFElement a = detail::seeded_generator(F, seed);
    FFElement beta = q_associate_eval(f, a);
    FactoredInt fac = factor_qn_minus_1(q, 4, opt);
    for (uint64_t j = 0; j < F->p; ++j) {
        FFElement c = beta + FFElement::from_int(F, j);
        if (c.is_zero()) continue;
        if (is_primitive(c, fac) && k_normality(c) == 2)
            return make_certificate(c, fac);
    }
    return std::nullopt;
}

namespace detail {

// ascending-index scan of [1, end) for a primitive k-normal element, split
// into contiguous blocks across workers; the lowest hit index wins, so the
// outcome is independent of scheduling
inline std::optional<uint64_t> parallel_index_scan(Fld F, unsigned k,
                                                   const FactoredInt& fac,
                                                   uint64_t end, unsigned jobs) {
    if (jobs == 0) jobs = 1;
    std::atomic<uint64_t> best{UINT64_MAX};
    auto worker = [&](uint64_t lo, uint64_t hi) {
        for (uint64_t i = lo; i < hi; ++i) {
            if (i >= best.load(std::memory_order_relaxed)) break;
            FFElement a = FFElement::from_index(F, i);
            if (!is_primitive(a, fac) || k_normality(a) != k) continue;
            uint64_t cur = best.load();
            while (i < cur && !best.compare_exchange_weak(cur, i)) {}
            break;
        }
    };
    if (jobs == 1 || end < 2 + jobs) {
        worker(1, end);
    } else {
        std::vector<std::thread> pool;
        uint64_t span = (end - 1 + jobs - 1) / jobs;
        for (unsigned w = 0; w < jobs; ++w) {
            uint64_t lo = 1 + w * span;
            uint64_t hi = std::min<uint64_t>(end, lo + span);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& t : pool) t.join();
    }
    uint64_t idx = best.load();
    if (idx == UINT64_MAX) return std::nullopt;
    return idx;
}

} // namespace detail

// certificate for a primitive k-normal element of F_{q^n}, or nullopt when
// an exhaustive scan finishes empty. Exhaustive mode walks indices
// ascending (parallel blocks, lowest index wins); seeded mode draws from
// the field's seed. BudgetExhausted distinguishes "ran out of candidates"
// from the completed-scan "none exists".
inline std::optional<Certificate> search_primitive_k_normal(
        Fld F, unsigned k,
        SearchStrategy strategy = SearchStrategy::exhaustive,
        uint64_t budget = 1u << 22, unsigned jobs = 1,
        const FactorOptions& opt = {}) {
    if (budget == 0) throw bad_input("budget must be positive");
    bool have = false;
    for (const auto& d : divisors_of(factor_xn_minus_1(F)))
        if (d.deg() == static_cast<int>(k)) { have = true; break; }
    if (!have)
        throw no_degree_k_divisor("x^n - 1 has no divisor of degree k");
    FactoredInt fac = factor_qn_minus_1(F->q, F->n, opt);
    if (strategy == SearchStrategy::exhaustive) {
        bool complete = F->order - 1 <= budget;
        uint64_t end = complete ? mpz_get_ui(F->order.get_mpz_t())
                     : budget < UINT64_MAX ? budget + 1 : UINT64_MAX;
        auto hit = detail::parallel_index_scan(F, k, fac, end, jobs);
        if (hit) return make_certificate(FFElement::from_index(F, *hit), fac);
        if (!complete)
            throw budget_exhausted("scan budget ended before the range did");
        return std::nullopt;
    }
    std::mt19937_64 rng(F->seed);
    for (uint64_t used = 0; used < budget; ++used) {
        FFElement a = FFElement::from_index(F, detail::draw_index(rng, F->order));
        if (a.is_zero()) continue;
        if (is_primitive(a, fac) && k_normality(a) == k)
            return make_certificate(a, fac);
    }
    throw budget_exhausted("no hit within the sampling budget");
}

// offline check of a tabulated witness: rebuild F_{q^n} with the supplied
// defining polynomial over F_p (ascending coefficients, degree en) and test
// whether the residue class of x is primitive and 2-normal
inline bool verify_table_entry(const mpz_class& q, unsigned n,
                               const std::vector<uint64_t>& g,
                               const FactorOptions& opt = {}) {
    auto [p, e] = prime_power_split(q);
    FieldPtr hold = make_field(mpz_get_ui(p.get_mpz_t()), e, n, 1, g);
    Fld F = hold.get();
    FFElement alpha = FFElement::from_index(F, mpz_class(F->p));
    FactoredInt fac = factor_qn_minus_1(q, n, opt);
    return is_primitive(alpha, fac) && k_normality(alpha) == 2;
}

} // namespace knf
