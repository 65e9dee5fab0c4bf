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
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <mpfr.h>

#include "knforge/fqfactor.hpp"

namespace knf {

// Sufficiency criteria for the existence of primitive k-normal elements of
// F_{q^n} over F_q, plus the threshold formulas that bound the range where
// the criteria have to be checked one q at a time.
//
// The criteria share one shape.  Pick a divisor m of q^n - 1 and a divisor
// T of x^n - 1; the primes outside m and the irreducible factors outside T
// are "sieved".  With W(m) and W(T) counting squarefree divisors, existence
// follows once
//
//     q^{n/2 - k}  >=  c * W(m) * W(T) * Delta,
//     Delta = (r + s - 1) / delta + 2,
//     delta = 1 - sum 1/p_i - sum 1/q^{deg Q_j}  (over the sieved part),
//
// provided delta > 0, where c is a small constant fixed by the criterion
// (1 here; 3 for the n = 4 additive-shift variant).  Verdicts are decided
// in exact rational arithmetic by squaring both sides.  Floating point is
// confined to display values and to the fractional-power threshold
// formulas, where every operation is rounded in the direction that makes
// the result conservative: a reported threshold is always >= the exact
// one, so acting on it never overclaims.
//
// The t parameters appearing below weight the bound W(M) <= A_t * M^{1/t};
// any positive t is valid, and the chains use the fixed choices
// t in {5, 6.6, 6.7, 7, 8} and (t, u) in {(5, 8.5), (6, 10)}.

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct SieveReport {
    mpz_class q;
    unsigned n = 0;
    unsigned k = 0;
    // kept part of q^n - 1 (primes outside it are sieved)
    FactoredInt m;
    // kept part of x^n - 1, rendered; "x^n - 1" when nothing is sieved
    std::string T;
    uint64_t omega_m = 0; // distinct primes of m
    uint64_t omega_T = 0; // distinct irreducible factors of T
    uint64_t r = 0;       // sieved primes
    uint64_t s = 0;       // sieved irreducible factors
    mpq_class delta{1};
    mpq_class Delta{1};
    mpz_class coeff{1};   // c in the criterion
    long lhs_halves = 0;  // left side is q^{lhs_halves / 2}
    double lhs = 0;       // rounded down
    double rhs = 0;       // rounded up; +inf when delta <= 0
    int cmp = 0;          // exact sign of lhs - rhs
    bool verdict = false; // delta > 0 and lhs >= rhs
    bool exact = true;    // verdict decided in rational arithmetic
    std::optional<double> t_choice;
    std::string note;
};

inline nlohmann::json sieve_report_to_json(const SieveReport& r) {
    nlohmann::json fac = nlohmann::json::array();
    for (const auto& pf : r.m.factors)
        fac.push_back({{"prime", pf.prime.get_str()}, {"exp", pf.exp}});
    nlohmann::json j{
        {"schema", "knforge.sieve_report.v1"},
        {"q", r.q.get_str()},
        {"n", r.n},
        {"k", r.k},
        {"m", r.m.value.get_str()},
        {"m_factors", std::move(fac)},
        {"T", r.T},
        {"omega_m", r.omega_m},
        {"omega_T", r.omega_T},
        {"r", r.r},
        {"s", r.s},
        {"delta", r.delta.get_str()},
        {"Delta", r.Delta.get_str()},
        {"coeff", r.coeff.get_str()},
        {"lhs_halves", r.lhs_halves},
        {"lhs", r.lhs},
        {"rhs", r.rhs},
        {"cmp", r.cmp},
        {"verdict", r.verdict},
        {"exact", r.exact},
        {"note", r.note},
    };
    if (r.t_choice)
        j["t"] = *r.t_choice;
    else
        j["t"] = nullptr;
    return j;
}

inline std::string sieve_report_line(const SieveReport& r) {
    return sieve_report_to_json(r).dump();
}

// ---------------------------------------------------------------------------
// rounding and rendering helpers
// ---------------------------------------------------------------------------

namespace detail {

// q^{halves/2} rounded down to a double
inline double q_pow_halves_down(const mpz_class& q, long halves) {
    mpz_class t;
    mpz_pow_ui(t.get_mpz_t(), q.get_mpz_t(),
               static_cast<unsigned long>(halves >= 0 ? halves : -halves));
    mpfr_t x;
    mpfr_init2(x, 128);
    double out;
    if (halves >= 0) {
        mpfr_set_z(x, t.get_mpz_t(), MPFR_RNDD);
        mpfr_sqrt(x, x, MPFR_RNDD);
        out = mpfr_get_d(x, MPFR_RNDD);
    } else {
        mpfr_set_z(x, t.get_mpz_t(), MPFR_RNDU);
        mpfr_sqrt(x, x, MPFR_RNDU);
        mpfr_ui_div(x, 1, x, MPFR_RNDD);
        out = mpfr_get_d(x, MPFR_RNDD);
    }
    mpfr_clear(x);
    return out;
}

inline double mpq_double_up(const mpq_class& v) {
    mpfr_t x;
    mpfr_init2(x, 128);
    mpfr_set_q(x, v.get_mpq_t(), MPFR_RNDU);
    double out = mpfr_get_d(x, MPFR_RNDU);
    mpfr_clear(x);
    return out;
}

// fills delta, Delta, doubles, cmp and verdict from the sieve sums
inline void finish_report(SieveReport& rep, const mpq_class& s1,
                          const mpq_class& s2) {
    rep.delta = 1 - s1 - s2;
    rep.lhs = q_pow_halves_down(rep.q, rep.lhs_halves);
    if (rep.delta <= 0) {
        rep.Delta = 0;
        rep.rhs = std::numeric_limits<double>::infinity();
        rep.cmp = -1;
        rep.verdict = false;
        if (rep.note.empty()) rep.note = "delta <= 0: sieve inconclusive";
        return;
    }
    long rs = static_cast<long>(rep.r + rep.s);
    rep.Delta = mpq_class(rs - 1) / rep.delta + 2;
    mpz_class w;
    mpz_ui_pow_ui(w.get_mpz_t(), 2,
                  static_cast<unsigned long>(rep.omega_m + rep.omega_T));
    mpq_class rhs = rep.coeff * w * rep.Delta;
    mpq_class lhs_sq;
    if (rep.lhs_halves >= 0) {
        mpz_class t;
        mpz_pow_ui(t.get_mpz_t(), rep.q.get_mpz_t(),
                   static_cast<unsigned long>(rep.lhs_halves));
        lhs_sq = t;
    } else {
        mpz_class t;
        mpz_pow_ui(t.get_mpz_t(), rep.q.get_mpz_t(),
                   static_cast<unsigned long>(-rep.lhs_halves));
        lhs_sq = mpq_class(1) / mpq_class(t);
    }
    int c = sgn(mpq_class(lhs_sq - rhs * rhs));
    rep.cmp = c;
    rep.verdict = c >= 0;
    rep.rhs = mpq_double_up(rhs);
}

inline std::string xn_minus_one_name(unsigned n) {
    std::ostringstream os;
    if (n == 1)
        os << "x - 1";
    else
        os << "x^" << n << " - 1";
    return os.str();
}

// coefficients printed as canonical lifts (base-p digits in the subfield
// basis), so "x + 12" over F_13 stands for x - 1
inline std::string render_fq_poly(const FFPoly& g) {
    if (g.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = g.deg(); i >= 0; --i) {
        FFElement c = g.coeff(static_cast<size_t>(i));
        if (c.is_zero()) continue;
        mpz_class rank = subfield_rank(c);
        if (!first) os << " + ";
        first = false;
        if (i == 0) {
            os << rank.get_str();
            continue;
        }
        if (rank != 1) os << rank.get_str() << "*";
        if (i == 1)
            os << "x";
        else
            os << "x^" << i;
    }
    return os.str();
}

inline std::string render_T(const FactoredPoly& xn1, const FFPoly& T,
                            unsigned n) {
    if (T == xn1.poly) return xn_minus_one_name(n);
    if (T.deg() <= 0) return "1";
    std::vector<std::pair<const FFPoly*, unsigned>> parts;
    FFPoly rest = T;
    for (const auto& [g, mult] : xn1.factors) {
        (void)mult;
        unsigned v = 0;
        while (rest.deg() >= g.deg() && (rest % g).is_zero()) {
            rest = rest / g;
            ++v;
        }
        if (v) parts.emplace_back(&g, v);
    }
    if (rest.deg() != 0 || parts.empty()) return render_fq_poly(T);
    if (parts.size() == 1 && parts[0].second == 1)
        return render_fq_poly(*parts[0].first);
    std::ostringstream os;
    for (const auto& [g, v] : parts) {
        os << "(" << render_fq_poly(*g) << ")";
        if (v > 1) os << "^" << v;
    }
    return os.str();
}

} // namespace detail

// ---------------------------------------------------------------------------
// sieve criteria
// ---------------------------------------------------------------------------

// the no-sieve criterion: q^{n/2 - k} >= W(q^n - 1) * W(x^n - 1); needs no
// field construction, so it is cheap enough for large sweeps
inline SieveReport basic_condition(const mpz_class& q, unsigned n, unsigned k,
                                   const FactorOptions& opt = {}) {
    auto [p, e] = prime_power_split(q);
    (void)e;
    if (n == 0) throw bad_input("n must be positive");
    FactoredInt m = factor_qn_minus_1(q, n, opt);
    detail::require_complete(m, "basic_condition");
    Xn1Shape shape = xn1_shape(q, p, n);
    SieveReport rep;
    rep.q = q;
    rep.n = n;
    rep.k = k;
    rep.omega_m = m.factors.size();
    rep.m = std::move(m);
    rep.T = detail::xn_minus_one_name(n);
    rep.omega_T = shape.distinct();
    rep.lhs_halves = static_cast<long>(n) - 2 * static_cast<long>(k);
    detail::finish_report(rep, 0, 0);
    return rep;
}

// full sieve: keep m | q^n - 1 and T | x^n - 1, sieve everything else.
// f is the intended F_q-order pattern: deg f = k, f | x^n - 1, and
// (x^n - 1)/f must share a factor with T, otherwise the criterion proves
// nothing for this f.
inline SieveReport sieve_delta(Fld F, unsigned k, const mpz_class& m,
                               const FFPoly& T, const FFPoly& f,
                               const FactorOptions& opt = {}) {
    if (!F) throw bad_input("sieve_delta needs a field");
    FFPoly xn1 = FFPoly::x_pow_minus_one(F, F->n);
    FFPoly Tm = T.monic();
    FFPoly fm = f.monic();
    if (fm.deg() != static_cast<int>(k))
        throw bad_input("deg f must equal k");
    if (!(xn1 % fm).is_zero())
        throw not_a_divisor("f does not divide x^n - 1");
    if (Tm.deg() < 1 || !(xn1 % Tm).is_zero())
        throw not_a_divisor("T must be a nonconstant divisor of x^n - 1");
    if (poly_gcd(xn1 / fm, Tm).deg() < 1)
        throw precondition_gcd("(x^n - 1)/f shares no factor with T");
    FactoredInt whole = factor_qn_minus_1(F->q, F->n, opt);
    detail::require_complete(whole, "sieve_delta");
    if (m < 1 || !mpz_divisible_p(whole.value.get_mpz_t(), m.get_mpz_t()))
        throw not_a_divisor("m must divide q^n - 1");

    SieveReport rep;
    rep.q = F->q;
    rep.n = F->n;
    rep.k = k;
    rep.m.value = m;
    rep.m.complete = true;
    mpq_class s1 = 0;
    for (const auto& pf : whole.factors) {
        if (mpz_divisible_p(m.get_mpz_t(), pf.prime.get_mpz_t())) {
            PrimeFactor kept;
            kept.prime = pf.prime;
            kept.certified = pf.certified;
            mpz_class rest = m;
            unsigned v = 0;
            while (mpz_divisible_p(rest.get_mpz_t(), pf.prime.get_mpz_t())) {
                mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(),
                             pf.prime.get_mpz_t());
                ++v;
            }
            kept.exp = v;
            rep.m.factors.push_back(std::move(kept));
        } else {
            ++rep.r;
            s1 += mpq_class(1) / mpq_class(pf.prime);
        }
    }
    rep.omega_m = rep.m.factors.size();

    const FactoredPoly& fac = factor_xn_minus_1(F);
    mpq_class s2 = 0;
    for (const auto& [g, mult] : fac.factors) {
        (void)mult;
        if ((Tm % g).is_zero()) {
            ++rep.omega_T;
        } else {
            ++rep.s;
            mpz_class qd;
            mpz_pow_ui(qd.get_mpz_t(), F->q.get_mpz_t(),
                       static_cast<unsigned long>(g.deg()));
            s2 += mpq_class(1) / mpq_class(qd);
        }
    }
    rep.T = detail::render_T(fac, Tm, F->n);
    rep.lhs_halves = static_cast<long>(F->n) - 2 * static_cast<long>(k);
    detail::finish_report(rep, s1, s2);
    return rep;
}

// lexicographically first monic degree-k divisor of x^n - 1 whose cofactor
// shares a factor with T; enumerates all monic divisors, so it is only
// meant for fields where x^n - 1 has few distinct factors
inline FFPoly default_degree_k_divisor(Fld F, unsigned k, const FFPoly& T) {
    const FactoredPoly& fac = factor_xn_minus_1(F);
    bool any = false;
    for (const FFPoly& d : divisors_of(fac)) {
        if (d.deg() != static_cast<int>(k)) continue;
        any = true;
        if (poly_gcd(fac.poly / d, T).deg() >= 1) return d;
    }
    if (!any) throw no_degree_k_divisor("x^n - 1 has no divisor of degree k");
    throw precondition_gcd(
        "no degree-k divisor leaves a factor of x^n - 1 shared with T");
}

// scripted k = 2 check: T is x - 1 when x^n - 1 has at least three linear
// factors counted with multiplicity or any quadratic, else a factor of
// minimal degree >= 3 (false when none exists); everything else is the
// plain sieve on the shape of x^n - 1, so no field is built
inline bool test_delta(const mpz_class& q, unsigned n, const mpz_class& m,
                       const FactorOptions& opt = {}) {
    auto [p, e] = prime_power_split(q);
    (void)e;
    if (n == 0) throw bad_input("n must be positive");
    FactoredInt whole = factor_qn_minus_1(q, n, opt);
    detail::require_complete(whole, "test_delta");
    if (m < 1 || !mpz_divisible_p(whole.value.get_mpz_t(), m.get_mpz_t()))
        throw not_a_divisor("m must divide q^n - 1");
    Xn1Shape shape = xn1_shape(q, p, n);
    uint64_t lin = 0, quad = 0;
    for (const auto& [deg, cnt] : shape.degree_counts) {
        if (deg == 1) lin = cnt * shape.multiplicity;
        if (deg == 2) quad = cnt * shape.multiplicity;
    }
    uint64_t deg_T = 0;
    if (lin >= 3 || quad >= 1) {
        deg_T = 1;
    } else {
        for (const auto& [deg, cnt] : shape.degree_counts) {
            (void)cnt;
            if (deg >= 3) {
                deg_T = deg;
                break;
            }
        }
        if (deg_T == 0) return false; // no factor worth keeping
    }
    uint64_t omega_m = 0, r = 0;
    mpq_class s1 = 0;
    for (const auto& pf : whole.factors) {
        if (mpz_divisible_p(m.get_mpz_t(), pf.prime.get_mpz_t())) {
            ++omega_m;
        } else {
            ++r;
            s1 += mpq_class(1) / mpq_class(pf.prime);
        }
    }
    uint64_t s = shape.distinct() - 1;
    mpq_class s2 = 0;
    mpz_class qq;
    for (const auto& [deg, cnt] : shape.degree_counts) {
        mpz_pow_ui(qq.get_mpz_t(), q.get_mpz_t(),
                   static_cast<unsigned long>(deg));
        s2 += mpq_class(static_cast<long>(cnt)) / mpq_class(qq);
    }
    mpz_pow_ui(qq.get_mpz_t(), q.get_mpz_t(),
               static_cast<unsigned long>(deg_T));
    s2 -= mpq_class(1) / mpq_class(qq);
    mpq_class delta = 1 - s1 - s2;
    if (delta <= 0) return false;
    mpq_class Delta = mpq_class(static_cast<long>(r + s) - 1) / delta + 2;
    mpz_class w;
    mpz_ui_pow_ui(w.get_mpz_t(), 2, static_cast<unsigned long>(omega_m + 1));
    mpq_class rhs = w * Delta;
    // q^{n/2 - 2} >= rhs, squared to stay rational
    mpz_class qe;
    mpq_class lhs_sq;
    if (n >= 4) {
        mpz_pow_ui(qe.get_mpz_t(), q.get_mpz_t(),
                   static_cast<unsigned long>(n - 4));
        lhs_sq = qe;
    } else {
        mpz_pow_ui(qe.get_mpz_t(), q.get_mpz_t(),
                   static_cast<unsigned long>(4 - n));
        lhs_sq = mpq_class(1) / mpq_class(qe);
    }
    return sgn(mpq_class(lhs_sq - rhs * rhs)) >= 0;
}

// ---------------------------------------------------------------------------
// the A_t machinery: W(M) <= A_t * M^{1/t}
// ---------------------------------------------------------------------------

// a prime power p^a known to divide the integer being bounded; its factor
// in A_t becomes 2 / (p^b)^{1/root} with b <= a clamped so p^b <= 2^root
struct KnownPrimePower {
    uint64_t prime = 2;
    unsigned exp = 1;
};

namespace detail {

// out must be initialized; every step is rounded so the final value errs
// in direction dir
inline void a_t_mpfr(mpfr_ptr out, double root, double range_log2,
                     const std::vector<KnownPrimePower>& include,
                     const std::vector<uint64_t>& exclude, mpfr_rnd_t dir) {
    if (!(root > 0) || !(range_log2 > 0))
        throw bad_input("a_t needs positive parameters");
    mpfr_rnd_t anti = dir == MPFR_RNDU ? MPFR_RNDD : MPFR_RNDU;
    double limit = std::pow(2.0, range_log2);
    if (!(limit < double(uint64_t(1) << 26)))
        throw range_too_large("a_t range beyond the sieve limit");
    std::map<uint64_t, unsigned> inc;
    for (const auto& pp : include) inc[pp.prime] = std::max(1u, pp.exp);
    std::set<uint64_t> exc(exclude.begin(), exclude.end());
    mpfr_prec_t prec = mpfr_get_prec(out);
    mpfr_t term, lg, ex;
    mpfr_init2(term, prec);
    mpfr_init2(lg, prec);
    mpfr_init2(ex, prec);
    mpfr_set_ui(out, 1, dir);
    for (uint64_t p : Sieve::instance().upto(static_cast<uint64_t>(limit))) {
        if (!(static_cast<double>(p) < limit)) break;
        if (exc.count(p)) continue;
        unsigned a = 1;
        if (auto it = inc.find(p); it != inc.end()) {
            a = it->second;
            while (a > 1 &&
                   std::pow(static_cast<double>(p), static_cast<double>(a)) >
                       std::pow(2.0, root))
                --a;
        }
        // term = p^{a/root} rounded against dir, so 2/term errs toward dir
        mpfr_set_ui(lg, static_cast<unsigned long>(p), MPFR_RNDN); // exact
        mpfr_log(lg, lg, anti);
        mpfr_set_ui(ex, a, MPFR_RNDN); // exact
        mpfr_div_d(ex, ex, root, anti);
        mpfr_mul(lg, lg, ex, anti);
        mpfr_exp(term, lg, anti);
        mpfr_ui_div(term, 2, term, dir);
        mpfr_mul(out, out, term, dir);
    }
    mpfr_clear(term);
    mpfr_clear(lg);
    mpfr_clear(ex);
}

} // namespace detail

// A over primes p < 2^{range_log2}, each contributing 2 / p^{1/root};
// exclude drops primes known coprime to M, include upgrades a prime to a
// known prime-power divisor.  Using range_log2 < root is only valid when
// M has no prime factor between the two limits.  Rounded up.
inline double a_t_range(double root, double range_log2,
                        const std::vector<KnownPrimePower>& include = {},
                        const std::vector<uint64_t>& exclude = {}) {
    mpfr_t v;
    mpfr_init2(v, 256);
    detail::a_t_mpfr(v, root, range_log2, include, exclude, MPFR_RNDU);
    double out = mpfr_get_d(v, MPFR_RNDU);
    mpfr_clear(v);
    return out;
}

inline double a_t(double t, const std::vector<KnownPrimePower>& include = {},
                  const std::vector<uint64_t>& exclude = {}) {
    return a_t_range(t, t, include, exclude);
}

// ---------------------------------------------------------------------------
// threshold formulas
// ---------------------------------------------------------------------------

namespace detail {

// ceil((base * A)^{expo_num/expo_den}) with every step rounded up, where A
// is the a_t product for the given parameters; base > 1 expected
inline mpz_class ceil_pow_up(const mpq_class& base, double a_root,
                             double a_range,
                             const std::vector<KnownPrimePower>& include,
                             const std::vector<uint64_t>& exclude,
                             double expo_num, double expo_den) {
    if (!(expo_den > 0)) throw exponent_nonpositive("exponent denominator");
    mpfr_t b, A, en, ed, ex;
    mpfr_init2(b, 256);
    mpfr_init2(A, 256);
    mpfr_init2(en, 256);
    mpfr_init2(ed, 256);
    mpfr_init2(ex, 256);
    a_t_mpfr(A, a_root, a_range, include, exclude, MPFR_RNDU);
    mpfr_set_q(b, base.get_mpq_t(), MPFR_RNDU);
    mpfr_mul(b, b, A, MPFR_RNDU);
    mpfr_set_d(en, expo_num, MPFR_RNDU);
    mpfr_set_d(ed, expo_den, MPFR_RNDD);
    mpfr_div(ex, en, ed, MPFR_RNDU);
    mpfr_pow(b, b, ex, MPFR_RNDU);
    mpz_class out;
    mpfr_get_z(out.get_mpz_t(), b, MPFR_RNDU);
    mpfr_clear(b);
    mpfr_clear(A);
    mpfr_clear(en);
    mpfr_clear(ed);
    mpfr_clear(ex);
    return out;
}

// exact ceil(v) for rational v > 0
inline mpz_class ceil_mpq(const mpq_class& v) {
    mpz_class out;
    mpz_cdiv_q(out.get_mpz_t(), v.get_num().get_mpz_t(),
               v.get_den().get_mpz_t());
    return out;
}

} // namespace detail

// coefficients of W(x^n - 1) <= 2^{(n + a)/b}
struct WPolyBound {
    unsigned a = 0;
    unsigned b = 1;
};

inline WPolyBound w_xn_bound(const mpz_class& q) {
    prime_power_split(q);
    if (q == 2) return {14, 5};
    if (q == 3) return {20, 4};
    if (q == 4) return {12, 3};
    if (q == 5) return {18, 3};
    if (q <= 27)
        return {static_cast<unsigned>(q.get_ui() - 1), 2};
    return {0, 1};
}

// least n from which the no-sieve criterion for k = 2 holds for all
// extensions of F_q, via q^{n/2 - 2} >= A_t q^{2/t... } folded into
//   n >= (2 ln q + ln(A_t 2^{a/b})) / ((1/2 - 1/t) ln q - (ln 2)/b)
inline uint64_t condition_b_min_n(const mpz_class& q, double t) {
    WPolyBound wb = w_xn_bound(q);
    for (mpfr_prec_t prec = 192; prec <= 12288; prec *= 2) {
        mpz_class hi, lo;
        bool bad = false;
        for (int pass = 0; pass < 2; ++pass) {
            mpfr_rnd_t d = pass == 0 ? MPFR_RNDU : MPFR_RNDD;
            mpfr_rnd_t anti = pass == 0 ? MPFR_RNDD : MPFR_RNDU;
            mpfr_t num, den, tmp, lnq;
            mpfr_init2(num, prec);
            mpfr_init2(den, prec);
            mpfr_init2(tmp, prec);
            mpfr_init2(lnq, prec);
            // numerator: 2 ln q + ln(A_t) + (a/b) ln 2, direction d
            detail::a_t_mpfr(num, t, t, {}, {}, d);
            mpfr_log(num, num, d);
            mpfr_set_z(lnq, q.get_mpz_t(), d);
            mpfr_log(lnq, lnq, d);
            mpfr_mul_ui(tmp, lnq, 2, d);
            mpfr_add(num, num, tmp, d);
            mpfr_const_log2(tmp, d);
            mpfr_mul_ui(tmp, tmp, wb.a, d);
            mpfr_div_ui(tmp, tmp, wb.b, d);
            mpfr_add(num, num, tmp, d);
            // denominator: (1/2 - 1/t) ln q - (ln 2)/b, direction anti
            mpfr_set_d(tmp, 1.0, MPFR_RNDN);
            mpfr_div_d(tmp, tmp, t, d); // subtracted, so direction d
            mpfr_d_sub(den, 0.5, tmp, anti);
            mpfr_set_z(lnq, q.get_mpz_t(), anti);
            mpfr_log(lnq, lnq, anti);
            mpfr_mul(den, den, lnq, anti);
            mpfr_const_log2(tmp, d);
            mpfr_div_ui(tmp, tmp, wb.b, d);
            mpfr_sub(den, den, tmp, anti);
            if (mpfr_sgn(den) <= 0) {
                bad = true;
            } else {
                mpfr_div(num, num, den, d);
                mpz_class z;
                mpfr_get_z(z.get_mpz_t(), num, MPFR_RNDU);
                (pass == 0 ? hi : lo) = z;
            }
            mpfr_clear(num);
            mpfr_clear(den);
            mpfr_clear(tmp);
            mpfr_clear(lnq);
        }
        if (bad) throw exponent_nonpositive("condition_b_min_n needs t > 2");
        if (hi == lo) return static_cast<uint64_t>(hi.get_ui());
    }
    throw error("condition_b_min_n did not stabilize");
}

enum class MtBranch { general, small_q };

// largest q for which the generic inequality can still fail at this n:
//   general: floor((2^{n/2-4} n^2 A_t)^{2t/((t-2)n-4t)})
//   small_q: floor((2^{n/2-2}     A_t)^{2t/((t-2)n-8t)})
inline mpz_class m_t(unsigned n, double t, MtBranch branch = MtBranch::general) {
    if (n == 0) throw bad_input("n must be positive");
    double shift = branch == MtBranch::general ? double(n) / 2 - 4
                                               : double(n) / 2 - 2;
    double sub = branch == MtBranch::general ? 4 * t : 8 * t;
    for (mpfr_prec_t prec = 192; prec <= 12288; prec *= 2) {
        mpz_class hi, lo;
        bool bad = false;
        for (int pass = 0; pass < 2; ++pass) {
            mpfr_rnd_t d = pass == 0 ? MPFR_RNDU : MPFR_RNDD;
            mpfr_rnd_t anti = pass == 0 ? MPFR_RNDD : MPFR_RNDU;
            mpfr_t base, A, ex, den;
            mpfr_init2(base, prec);
            mpfr_init2(A, prec);
            mpfr_init2(ex, prec);
            mpfr_init2(den, prec);
            // base = 2^{shift} [* n^2] * A_t, direction d
            mpfr_set_d(ex, shift, MPFR_RNDN); // dyadic, exact
            mpfr_ui_pow(base, 2, ex, d);
            if (branch == MtBranch::general) mpfr_mul_ui(base, base, n * n, d);
            detail::a_t_mpfr(A, t, t, {}, {}, d);
            mpfr_mul(base, base, A, d);
            // exponent = 2t / ((t-2) n - sub), direction d (base > 1)
            mpfr_set_d(den, t, MPFR_RNDN);
            mpfr_sub_ui(den, den, 2, anti);
            mpfr_mul_ui(den, den, n, anti);
            mpfr_sub_d(den, den, sub, anti);
            if (mpfr_sgn(den) <= 0) {
                bad = true;
            } else {
                mpfr_set_d(ex, 2 * t, d);
                mpfr_div(ex, ex, den, d);
                mpfr_pow(base, base, ex, d);
                mpz_class z;
                mpfr_get_z(z.get_mpz_t(), base, MPFR_RNDD);
                (pass == 0 ? hi : lo) = z;
            }
            mpfr_clear(base);
            mpfr_clear(A);
            mpfr_clear(ex);
            mpfr_clear(den);
        }
        if (bad)
            throw exponent_nonpositive("m_t exponent denominator is <= 0");
        if (hi == lo) return hi;
    }
    throw error("m_t did not stabilize");
}

// the W(q^n - 1) W(x^n - 1) product is below B(q, n) in the generic range:
// five regimes, checked top to bottom; rounded up
inline double caseall_B(const mpz_class& q, unsigned n) {
    prime_power_split(q);
    if (n < 5) throw bad_input("B(q, n) is defined for n >= 5");
    mpfr_t v, ex;
    mpfr_init2(v, 128);
    mpfr_init2(ex, 128);
    if (q == 2) {
        mpfr_set_d(ex, (double(n) + 1) / 2, MPFR_RNDN);
        mpfr_ui_pow(v, 2, ex, MPFR_RNDU);
    } else if (2 * q < n) {
        mpfr_set_d(ex, double(n) / 2, MPFR_RNDN);
        mpfr_ui_pow(v, 2, ex, MPFR_RNDU);
        mpfr_t qq;
        mpfr_init2(qq, 128);
        mpfr_set_z(qq, q.get_mpz_t(), MPFR_RNDU);
        mpfr_sqr(qq, qq, MPFR_RNDU);
        mpfr_mul(v, v, qq, MPFR_RNDU);
        mpfr_div_ui(v, v, 4, MPFR_RNDU);
        mpfr_clear(qq);
    } else if (n <= 7 && q == n - 1) {
        mpfr_set_z(v, q.get_mpz_t(), MPFR_RNDU);
        mpfr_sqr(v, v, MPFR_RNDU);
    } else if (n <= 7 && q >= n) {
        mpfr_set_ui(v, n * n, MPFR_RNDU);
    } else {
        mpfr_set_d(ex, double(n) / 2, MPFR_RNDN);
        mpfr_ui_pow(v, 2, ex, MPFR_RNDU);
        mpfr_mul_ui(v, v, n * n, MPFR_RNDU);
        mpfr_div_ui(v, v, 16, MPFR_RNDU);
    }
    double out = mpfr_get_d(v, MPFR_RNDU);
    mpfr_clear(v);
    mpfr_clear(ex);
    return out;
}

// ---------------------------------------------------------------------------
// fixed-n chains (k = 2)
// ---------------------------------------------------------------------------

// n = 7: with everything sieved, Delta = 5/(1 - 6/q) + 2 = 7 + 30/(q - 6)
inline mpq_class n7_delta(const mpz_class& q) {
    if (q <= 6) throw bad_input("n7_delta needs q > 6");
    return 7 + mpq_class(30) / mpq_class(q - 6);
}

// n = 6, q = +-1 mod 6: keep m = q^2 - 1, sieve the first 38 primes
// = 1 mod 6; valid for q < 4.66 * 10^20
inline bool n6_cond61(const mpz_class& q, const FactorOptions& opt = {}) {
    prime_power_split(q);
    unsigned long rm = mpz_fdiv_ui(q.get_mpz_t(), 6);
    if (rm != 1 && rm != 5)
        throw bad_residue("criterion covers q = +-1 mod 6 only");
    if (q >= mpz_class("466000000000000000000"))
        throw bad_input("criterion hypothesis needs q < 4.66 * 10^20");
    PrimeClassPrefix pre = class_prime_prefix(6, 1, 38);
    mpq_class delta = 1 - pre.inv_sum - mpq_class(5) / mpq_class(q);
    if (delta <= 0) return false;
    mpq_class Delta = mpq_class(42) / delta + 2;
    FactoredInt f2 = factor_int(q * q - 1, opt);
    detail::require_complete(f2, "n6_cond61");
    return sgn(mpq_class(mpq_class(q) - 2 * w_int(f2) * Delta)) >= 0;
}

// n = 6: q above this threshold always passes the criterion above
inline mpz_class n6_threshold() {
    PrimeClassPrefix pre = class_prime_prefix(6, 1, 38);
    mpq_class delta = 1 - pre.inv_sum - mpq_class(1, 20000); // 5/q at q = 1e5
    mpq_class Delta = mpq_class(42) / delta + 2;
    return detail::ceil_pow_up(2 * Delta, 5, 5, {}, {}, 5, 3);
}

// n = 5 chain, split by q mod 5 (class 0, 1, or 4; -1 is accepted for 4).
// Stage 1 handles all q at (t, u) = (6, 10); stage 2 restarts below the
// stage-1 output with the primes = 1 mod 5 carrying the sieve; stage 3
// iterates an exact small-prime sieve down to a fixpoint.  Each stage
// seeds from the previous one's computed output, so the chain never
// depends on externally asserted constants.  The unit-fraction tail from
// the linear or quadratic factors of x^5 - 1 assumes q >= 10^6 in stage 1
// and q >= 10^5 afterwards; every output stays far above both, which
// keeps the assumption self-consistent.
inline mpz_class n5_threshold(int cls, unsigned stage) {
    if (cls == -1) cls = 4;
    if (cls != 0 && cls != 1 && cls != 4)
        throw stage_unknown("q mod 5 class must be 0, 1, or 4");
    if (stage < 1 || stage > 3)
        throw stage_unknown("n = 5 chain has stages 1..3");
    const int ci = cls == 0 ? 0 : cls == 1 ? 1 : 2;
    // linear factors of x^5 - 1 beyond x - 1 contribute s/q to the sieve
    // sum (class 1), quadratic ones s/q^2 (class 4), none for class 0
    const long s_poly[3] = {0, 4, 2};
    auto tail = [&](unsigned long qlo) -> mpq_class {
        mpz_class q(qlo);
        if (ci == 1) return mpq_class(4) / mpq_class(q);
        if (ci == 2) return mpq_class(2) / mpq_class(q * q);
        return 0;
    };

    // stage 1: sieve every prime in (2^6, 2^16), bound W(m) by A_{6,10}
    mpz_class thr;
    {
        RangeStats rs = range_stats(6, 10);
        mpq_class delta = 1 - mpq_class(rs.inv_sum) - tail(1000000);
        if (delta <= 0) throw error("stage 1 sieve sum exceeds 1");
        mpq_class Delta =
            mpq_class(static_cast<long>(rs.count) + s_poly[ci] - 1) / delta + 2;
        std::vector<KnownPrimePower> inc;
        std::vector<uint64_t> exc;
        if (ci == 1)
            inc.push_back({5, 2}); // 5^2 | q^5 - 1 when q = 1 mod 5
        else
            exc.push_back(5); // 5 does not divide q^5 - 1 otherwise
        thr = detail::ceil_pow_up(2 * Delta, 16, 6, inc, exc, 32, 6);
    }
    if (stage == 1) return thr;

    // stage 2: below the stage-1 bound only primes = 1 mod 5 divide
    // (q^5 - 1)/(q - 1) beyond 5 itself, so sieve those and bound the
    // kept part by A_5 q^{1/5}... folded into exponent 10/3
    {
        const mpz_class& M = thr;
        mpz_class bound = ((M * M + M) * M + M) * M + 1; // sum M^i, i <= 4
        mpz_class mult = ci == 1 ? 5 : 1;
        size_t v = class_prime_cutoff(5, 1, mult, bound);
        PrimeClassPrefix pre = class_prime_prefix(5, 1, v);
        mpq_class delta = 1 - pre.inv_sum - tail(100000);
        if (delta <= 0) throw error("stage 2 sieve sum exceeds 1");
        mpq_class Delta =
            mpq_class(static_cast<long>(v) + s_poly[ci] - 1) / delta + 2;
        thr = detail::ceil_pow_up(2 * Delta, 5, 5, {}, {}, 10, 3);
    }
    if (stage == 2) return thr;

    // stage 3: keep m = the 2, 3 (and 5) part of q^5 - 1, sieve the first
    // v primes above 5, with v cut so that mult * P_v < N^5 - 1; iterate
    // until the threshold stops improving
    const unsigned long mult3[3] = {4, 25, 1};
    const unsigned wexp[3] = {2, 3, 2};
    for (int guard = 0; guard < 64; ++guard) {
        mpz_class bound;
        mpz_pow_ui(bound.get_mpz_t(), thr.get_mpz_t(), 5);
        bound -= 1;
        size_t v = class_prime_cutoff(1, 5, mult3[ci], bound);
        PrimeClassPrefix pre = class_prime_prefix(1, 5, v);
        mpq_class delta = 1 - pre.inv_sum - tail(100000);
        if (delta <= 0) throw error("stage 3 sieve sum exceeds 1");
        mpq_class Delta =
            mpq_class(static_cast<long>(v) + s_poly[ci] - 1) / delta + 2;
        mpz_class w;
        mpz_ui_pow_ui(w.get_mpz_t(), 2, wexp[ci]);
        mpq_class rhs = 2 * w * Delta;
        mpz_class next = detail::ceil_mpq(rhs * rhs);
        if (next < 100000) next = 100000; // tail assumed q >= 10^5
        if (next >= thr) break;
        thr = next;
    }
    return thr;
}

// n = 4, q = 1 mod 4 chain.  Stage 1 covers all such q at (t, u) =
// (5, 8.5); stages 2 and 3 sieve the odd primes of q^2 + 1 (all 1 mod 4)
// and bound W(q^2 - 1) by A_t q^{2/t}; stages 4..6 switch to the exact
// small-prime sieve with W(m) capped at 16, 8, 8.  As in the n = 5 chain
// each stage seeds from the previous stage's computed output.
inline mpz_class n4_threshold(unsigned stage) {
    if (stage < 1 || stage > 6)
        throw stage_unknown("n = 4 chain has stages 1..6");

    // stage 1: sieve every prime in (2^5, 2^13.5), 2^4 | q^4 - 1
    mpz_class thr;
    {
        RangeStats rs = range_stats(5, 8.5);
        mpq_class delta = 1 - mpq_class(rs.inv_sum);
        if (delta <= 0) throw error("stage 1 sieve sum exceeds 1");
        mpq_class Delta =
            mpq_class(static_cast<long>(rs.count) - 1) / delta + 2;
        thr = detail::ceil_pow_up(3 * Delta, 13.5, 5, {{2, 4}}, {}, 27, 5.5);
    }

    for (unsigned st = 2; st <= stage; ++st) {
        const mpz_class M = thr;
        if (st <= 3) {
            // keep m = q^2 - 1 (2^3 divides it), sieve the odd primes of
            // q^2 + 1: at most v of them once 2 p_1 ... p_v >= M^2 + 1
            size_t v = class_prime_cutoff(4, 1, 2, M * M + 1);
            PrimeClassPrefix pre = class_prime_prefix(4, 1, v);
            mpq_class delta = 1 - pre.inv_sum;
            if (delta <= 0) throw error("sieve sum exceeds 1");
            mpq_class Delta = mpq_class(static_cast<long>(v) - 1) / delta + 2;
            double t = st == 2 ? 6.7 : 6.6;
            thr = detail::ceil_pow_up(3 * Delta, t, t, {{2, 3}}, {}, 2 * t,
                                      t - 4);
        } else {
            // keep m = the small-prime part of q^4 - 1 (at least 48),
            // sieve the first v primes of the family once 48 P_v >= M^4
            unsigned long residue = st == 4 ? 10 : 6;
            unsigned wexp = st == 4 ? 4 : 3;
            mpz_class bound;
            mpz_pow_ui(bound.get_mpz_t(), M.get_mpz_t(), 4);
            bound -= 1;
            size_t v = class_prime_cutoff(1, residue, 48, bound);
            PrimeClassPrefix pre = class_prime_prefix(1, residue, v);
            mpq_class delta = 1 - pre.inv_sum;
            if (delta <= 0) throw error("sieve sum exceeds 1");
            mpq_class Delta = mpq_class(static_cast<long>(v) - 1) / delta + 2;
            mpz_class w;
            mpz_ui_pow_ui(w.get_mpz_t(), 2, wexp);
            mpq_class rhs = 3 * w * Delta;
            thr = detail::ceil_mpq(rhs * rhs);
        }
    }
    return thr;
}

// n = 4 no-sieve criterion: sqrt(q) >= 3 W(m) for m | q^4 - 1
inline bool n4_condn4(const mpz_class& q, const mpz_class& m,
                      const FactorOptions& opt = {}) {
    prime_power_split(q);
    if (mpz_fdiv_ui(q.get_mpz_t(), 4) != 1)
        throw bad_residue("criterion covers q = 1 mod 4 only");
    FactoredInt whole = factor_qn_minus_1(q, 4, opt);
    detail::require_complete(whole, "n4_condn4");
    if (m < 1 || !mpz_divisible_p(whole.value.get_mpz_t(), m.get_mpz_t()))
        throw not_a_divisor("m must divide q^4 - 1");
    uint64_t omega = 0;
    for (const auto& pf : whole.factors)
        if (mpz_divisible_p(m.get_mpz_t(), pf.prime.get_mpz_t())) ++omega;
    mpz_class w;
    mpz_ui_pow_ui(w.get_mpz_t(), 2, static_cast<unsigned long>(omega));
    return q >= 9 * w * w;
}

// n = 4 sieve: sqrt(q) >= 3 W(m) Delta with the primes of q^4 - 1 outside
// m sieved; no polynomial part
inline SieveReport n4_sieve(const mpz_class& q, const mpz_class& m,
                            const FactorOptions& opt = {}) {
    prime_power_split(q);
    if (mpz_fdiv_ui(q.get_mpz_t(), 4) != 1)
        throw bad_residue("criterion covers q = 1 mod 4 only");
    FactoredInt whole = factor_qn_minus_1(q, 4, opt);
    detail::require_complete(whole, "n4_sieve");
    if (m < 1 || !mpz_divisible_p(whole.value.get_mpz_t(), m.get_mpz_t()))
        throw not_a_divisor("m must divide q^4 - 1");
    SieveReport rep;
    rep.q = q;
    rep.n = 4;
    rep.k = 2;
    rep.coeff = 3;
    rep.m.value = m;
    rep.m.complete = true;
    rep.T = "1";
    rep.lhs_halves = 1;
    rep.note = "additive-shift criterion: left side is sqrt(q)";
    mpq_class s1 = 0;
    for (const auto& pf : whole.factors) {
        if (mpz_divisible_p(m.get_mpz_t(), pf.prime.get_mpz_t())) {
            PrimeFactor kept;
            kept.prime = pf.prime;
            kept.certified = pf.certified;
            mpz_class rest = m;
            unsigned v = 0;
            while (mpz_divisible_p(rest.get_mpz_t(), pf.prime.get_mpz_t())) {
                mpz_divexact(rest.get_mpz_t(), rest.get_mpz_t(),
                             pf.prime.get_mpz_t());
                ++v;
            }
            kept.exp = v;
            rep.m.factors.push_back(std::move(kept));
        } else {
            ++rep.r;
            s1 += mpq_class(1) / mpq_class(pf.prime);
        }
    }
    rep.omega_m = rep.m.factors.size();
    detail::finish_report(rep, s1, 0);
    return rep;
}

// scripted list form of the n = 4 sieve: keep exactly the listed primes
// (those that divide q^4 - 1), sieve the rest
inline bool test_list(const mpz_class& q, const std::vector<uint64_t>& keep,
                      const FactorOptions& opt = {}) {
    prime_power_split(q);
    if (mpz_fdiv_ui(q.get_mpz_t(), 4) != 1)
        throw bad_residue("criterion covers q = 1 mod 4 only");
    FactoredInt whole = factor_qn_minus_1(q, 4, opt);
    detail::require_complete(whole, "test_list");
    std::set<uint64_t> want(keep.begin(), keep.end());
    mpz_class m = 1;
    for (const auto& pf : whole.factors)
        if (mpz_fits_ulong_p(pf.prime.get_mpz_t()) &&
            want.count(mpz_get_ui(pf.prime.get_mpz_t())))
            m *= pf.prime;
    return n4_sieve(q, m, opt).verdict;
}

} // namespace knf
