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

#include <array>
#include <map>
#include <numeric>

#include "knforge/gf.hpp"

namespace knf {

// Factorization of x^n - 1 over the embedded F_q, and the polynomial
// arithmetic functions built on it (Euler phi, Moebius, divisor counts).
//
// Writing n = p^a * n0 with gcd(n0, p) = 1, x^n - 1 = (x^{n0} - 1)^{p^a},
// and x^{n0} - 1 is squarefree with irreducible factors in bijection with
// the q-cyclotomic cosets mod n0.

struct FactoredPoly {
    FFPoly poly;
    // irreducible over F_q, sorted by (degree, coefficient order), with
    // multiplicities; product of factor^multiplicity equals poly
    std::vector<std::pair<FFPoly, unsigned>> factors;

    unsigned distinct() const { return static_cast<unsigned>(factors.size()); }
    bool squarefree() const {
        for (const auto& [g, m] : factors)
            if (m > 1) return false;
        return true;
    }
};

// degree profile of x^n - 1 over F_q, computed from cyclotomic cosets alone
// (no field construction); enough for factor counts and W(x^n - 1)
struct Xn1Shape {
    uint64_t n0 = 1;           // p-free part of n
    uint64_t multiplicity = 1; // p^a, so x^n - 1 = (x^{n0} - 1)^multiplicity
    // (degree, number of distinct irreducible factors of that degree),
    // ascending degree
    std::vector<std::pair<uint64_t, uint64_t>> degree_counts;

    uint64_t distinct() const {
        uint64_t s = 0;
        for (auto& [r, c] : degree_counts) s += c;
        return s;
    }
    mpz_class w() const {
        mpz_class r;
        mpz_ui_pow_ui(r.get_mpz_t(), 2, static_cast<unsigned long>(distinct()));
        return r;
    }
};

namespace detail {

// orbit sizes of multiplication by q on Z/n0 as (size, count), ascending
inline std::vector<std::pair<uint64_t, uint64_t>>
coset_degree_counts(const mpz_class& q, uint64_t n0) {
    uint64_t qm = mpz_fdiv_ui(q.get_mpz_t(), static_cast<unsigned long>(n0));
    std::map<uint64_t, uint64_t> counts;
    std::vector<char> seen(n0, 0);
    for (uint64_t j = 0; j < n0; ++j) {
        if (seen[j]) continue;
        uint64_t sz = 0, cur = j;
        do {
            seen[cur] = 1;
            ++sz;
            cur = mulmod_u64(cur, qm, n0);
        } while (cur != j);
        counts[sz]++;
    }
    return {counts.begin(), counts.end()};
}

} // namespace detail

inline Xn1Shape xn1_shape(const mpz_class& q, const mpz_class& p, uint64_t n) {
    if (n == 0) throw bad_input("n must be positive");
    Xn1Shape s;
    uint64_t n0 = n;
    if (mpz_fits_ulong_p(p.get_mpz_t())) {
        uint64_t pu = mpz_get_ui(p.get_mpz_t());
        while (pu <= n0 && n0 % pu == 0) {
            n0 /= pu;
            s.multiplicity *= pu;
        }
    } // p beyond word size certainly exceeds n, so n0 = n
    s.n0 = n0;
    s.degree_counts = detail::coset_degree_counts(q, n0);
    return s;
}

// I_n(r): the number of monic irreducible degree-r factors of x^n - 1 over
// F_q when gcd(n, q) = 1, via (1/r) sum_{d | r} gcd(q^d - 1, n) mu(r/d)
inline uint64_t irreducible_factor_count(const mpz_class& q, uint64_t n,
                                         uint64_t r) {
    if (n == 0 || r == 0) throw bad_input("n and r must be positive");
    mpz_class g;
    mpz_class nz(static_cast<unsigned long>(n));
    mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), nz.get_mpz_t());
    if (g != 1) throw p_not_coprime("irreducible_factor_count needs gcd(n, q) = 1");
    uint64_t qm = mpz_fdiv_ui(q.get_mpz_t(), static_cast<unsigned long>(n));
    int64_t sum = 0;
    for (uint64_t d = 1; d <= r; ++d) {
        if (r % d) continue;
        int mu = moebius(factor_u64(r / d));
        if (!mu) continue;
        uint64_t qd = detail::powmod_u64(qm % n, d, n);
        uint64_t td = std::gcd((qd + n - 1) % n, n); // gcd(0, n) = n
        sum += mu * static_cast<int64_t>(td);
    }
    if (sum < 0 || sum % static_cast<int64_t>(r) != 0)
        throw error("inconsistent factor count (internal)");
    return static_cast<uint64_t>(sum) / r;
}

namespace detail {

// deterministic element of multiplicative order exactly n0 in the field
inline FFElement unity_root(Fld h, uint64_t n0) {
    mpz_class u = (h->order - 1) / static_cast<unsigned long>(n0);
    auto fac = factor_u64(n0);
    for (mpz_class idx = 1; idx < h->order; ++idx) {
        FFElement c = FFElement::from_index(h, idx).pow(u);
        if (c == FFElement::one(h)) continue;
        bool full = true;
        for (const auto& pf : fac.factors) {
            uint64_t r = pf.prime.get_ui();
            if (c.pow(mpz_class(static_cast<unsigned long>(n0 / r))) ==
                FFElement::one(h)) {
                full = false;
                break;
            }
        }
        if (full) return c;
    }
    throw error("no element of the requested order (internal)");
}

} // namespace detail

// irreducibility over the embedded F_q: g | x^{q^deg} - x and
// gcd(g, x^{q^(deg/r)} - x) constant for every prime r | deg
inline bool is_irreducible_fq(const FFPoly& g) {
    fq_poly_checked(g);
    int dg = g.deg();
    if (dg < 1) return false;
    if (dg == 1) return true;
    const mpz_class& q = g.f->q;
    auto xq_power_minus_x = [&](unsigned k) {
        mpz_class e;
        mpz_pow_ui(e.get_mpz_t(), q.get_mpz_t(), k);
        FFPoly w = poly_powmod(FFPoly::x(g.f), e, g);
        return w - (FFPoly::x(g.f) % g);
    };
    if (!xq_power_minus_x(static_cast<unsigned>(dg)).is_zero()) return false;
    auto dfac = factor_u64(static_cast<uint64_t>(dg));
    for (const auto& pf : dfac.factors) {
        unsigned k = static_cast<unsigned>(dg) /
                     static_cast<unsigned>(pf.prime.get_ui());
        if (poly_gcd(xq_power_minus_x(k), g).deg() != 0) return false;
    }
    return true;
}

// factorization of x^n - 1 over the embedded F_q of the context; the result
// is computed once and cached on the context
inline const FactoredPoly& factor_xn_minus_1(Fld f) {
    {
        std::lock_guard<std::mutex> lk(f->cache_mu);
        if (f->xn1_cache) return *f->xn1_cache;
    }
    const uint64_t p = f->p;
    const unsigned n = f->n;
    uint64_t n0 = n, pa = 1;
    while (n0 % p == 0) {
        n0 /= p;
        pa *= static_cast<uint64_t>(p);
    }

    std::vector<FFPoly> irred;
    if (n0 == 1) {
        irred.push_back(FFPoly(f, {-FFElement::one(f), FFElement::one(f)}));
    } else {
        // cosets of multiplication by q on Z/n0
        uint64_t qm = mpz_fdiv_ui(f->q.get_mpz_t(), static_cast<unsigned long>(n0));
        std::vector<std::vector<uint64_t>> cosets;
        std::vector<char> seen(n0, 0);
        uint64_t m = 1; // multiplicative order of q mod n0
        {
            uint64_t r = qm % n0;
            while (r != 1 % n0) {
                r = detail::mulmod_u64(r, qm, n0);
                ++m;
            }
        }
        for (uint64_t j = 0; j < n0; ++j) {
            if (seen[j]) continue;
            std::vector<uint64_t> c;
            uint64_t cur = j;
            do {
                seen[cur] = 1;
                c.push_back(cur);
                cur = detail::mulmod_u64(cur, qm, n0);
            } while (cur != j);
            cosets.push_back(std::move(c));
        }
        // helper field F_{q^m} contains a primitive n0-th root of unity
        FieldPtr hf = make_field(p, f->e, static_cast<unsigned>(m), f->seed);
        FFElement zeta = detail::unity_root(hf.get(), n0);
        for (const auto& coset : cosets) {
            FFPoly g = FFPoly::one(hf.get());
            for (uint64_t j : coset) {
                FFElement root = zeta.pow(mpz_class(static_cast<unsigned long>(j)));
                g = g * FFPoly(hf.get(), {-root, FFElement::one(hf.get())});
            }
            // transport coefficients into the target realization via the
            // shared canonical subfield generator
            FFPoly gg(f);
            for (const auto& c : g.c)
                gg.c.push_back(subfield_element(f, subfield_coords(c)));
            gg.trim();
            if (gg.deg() != static_cast<int>(coset.size()))
                throw error("coefficient transport failed (internal)");
            irred.push_back(std::move(gg));
        }
    }

    std::sort(irred.begin(), irred.end(),
              [](const FFPoly& a, const FFPoly& b) { return a.key_less(b); });

    auto fp = std::make_shared<FactoredPoly>();
    fp->poly = FFPoly::x_pow_minus_one(f, n);
    FFPoly check = FFPoly::one(f);
    for (auto& g : irred) {
        for (uint64_t i = 0; i < pa; ++i) check = check * g;
        fp->factors.emplace_back(std::move(g), static_cast<unsigned>(pa));
    }
    if (check != fp->poly)
        throw error("factor product mismatch for x^n - 1 (internal)");

    std::lock_guard<std::mutex> lk(f->cache_mu);
    if (!f->xn1_cache) f->xn1_cache = std::move(fp);
    return *f->xn1_cache;
}

// Euler phi for a factored polynomial:
// Phi_q(prod P_i^{e_i}) = prod (q^{e_i d_i} - q^{(e_i - 1) d_i})
inline mpz_class phi_q(const FactoredPoly& f) {
    if (f.poly.is_zero()) throw bad_input("phi_q of the zero polynomial");
    const mpz_class& q = f.poly.f->q;
    mpz_class out = 1;
    for (const auto& [g, mult] : f.factors) {
        unsigned d = static_cast<unsigned>(g.deg());
        mpz_class hi, lo;
        mpz_pow_ui(hi.get_mpz_t(), q.get_mpz_t(), size_t(mult) * d);
        mpz_pow_ui(lo.get_mpz_t(), q.get_mpz_t(), size_t(mult - 1) * d);
        out *= hi - lo;
    }
    return out;
}

// Moebius function for monic polynomials over F_q: 0 unless squarefree,
// else (-1)^(number of irreducible factors)
inline int mu_q(const FFPoly& g0) {
    fq_poly_checked(g0);
    if (g0.is_zero()) throw bad_input("mu_q of the zero polynomial");
    FFPoly g = g0.monic();
    if (g.deg() == 0) return 1;
    if (poly_gcd(g, g.derivative()).deg() != 0) return 0;
    // count irreducible factors by distinct-degree splitting
    unsigned count = 0;
    const mpz_class& q = g.f->q;
    FFPoly w = g;
    for (unsigned r = 1; w.deg() > 0 && static_cast<int>(r) <= w.deg(); ++r) {
        mpz_class e;
        mpz_pow_ui(e.get_mpz_t(), q.get_mpz_t(), r);
        FFPoly h = poly_gcd(poly_powmod(FFPoly::x(w.f), e, w) -
                                (FFPoly::x(w.f) % w),
                            w);
        if (h.deg() > 0) {
            count += static_cast<unsigned>(h.deg()) / r;
            w = w / h;
        }
    }
    if (w.deg() > 0) ++count; // leftover single large factor
    return (count % 2) ? -1 : 1;
}

// W(f) = number of squarefree monic divisors = 2^(distinct irreducibles)
inline mpz_class w_poly(const FactoredPoly& f) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, f.distinct());
    return r;
}

// the divisor selected by an exponent vector, with its own factorization
inline FactoredPoly sub_factored(const FactoredPoly& f,
                                 const std::vector<unsigned>& exps) {
    if (exps.size() != f.factors.size())
        throw bad_input("exponent vector length mismatch");
    FactoredPoly out;
    FFPoly prod = FFPoly::one(f.poly.f);
    for (size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] > f.factors[i].second)
            throw bad_input("exponent exceeds multiplicity");
        if (exps[i] == 0) continue;
        for (unsigned j = 0; j < exps[i]; ++j) prod = prod * f.factors[i].first;
        out.factors.emplace_back(f.factors[i].first, exps[i]);
    }
    out.poly = prod;
    return out;
}

// all monic divisors, nondecreasing degree, coefficient order within degree
inline std::vector<FFPoly> divisors_of(const FactoredPoly& f) {
    std::vector<FFPoly> out;
    std::vector<unsigned> exps(f.factors.size(), 0);
    while (true) {
        FFPoly prod = FFPoly::one(f.poly.f);
        for (size_t i = 0; i < exps.size(); ++i)
            for (unsigned j = 0; j < exps[i]; ++j) prod = prod * f.factors[i].first;
        out.push_back(std::move(prod));
        size_t i = 0;
        while (i < exps.size() && exps[i] == f.factors[i].second) exps[i++] = 0;
        if (i == exps.size()) break;
        ++exps[i];
    }
    std::sort(out.begin(), out.end(), [](const FFPoly& a, const FFPoly& b) {
        return a.key_less(b);
    });
    return out;
}

// x^5 - 1 = (x - 1)(x^2 - bx + 1)(x^2 + (b+1)x + 1) where b^2 + b = 1;
// requires q = 1 or 4 mod 5, else the quadratic has no root in F_q
struct X5Split {
    FFElement b;
    std::array<FFPoly, 3> factors;
};

inline X5Split factor_x5_special(Fld f) {
    unsigned long r5 = mpz_fdiv_ui(f->q.get_mpz_t(), 5);
    if (r5 != 1 && r5 != 4)
        throw no_root("x^2 + x - 1 has no root in F_q unless q = +-1 mod 5");
    // roots of y^2 + y - 1 lie in F_q here; find one, then take the
    // canonically smaller of the pair
    FFPoly quad(f, {-FFElement::one(f), FFElement::one(f),
                    FFElement::one(f)});
    std::mt19937_64 rng(f->seed ^ 0xa5a5a5a5ull);
    FFElement b = detail::find_root(quad, rng);
    FFElement b2 = -FFElement::one(f) - b;
    if (!b.in_subfield() || !b2.in_subfield())
        throw error("root of x^2 + x - 1 escaped the subfield (internal)");
    if (subfield_rank(b2) < subfield_rank(b)) std::swap(b, b2);

    auto one = FFElement::one(f);
    X5Split out{b,
                {FFPoly(f, {-one, one}),                  // x - 1
                 FFPoly(f, {one, -b, one}),               // x^2 - bx + 1
                 FFPoly(f, {one, b + one, one})}};        // x^2 + (b+1)x + 1
    FFPoly prod = out.factors[0] * out.factors[1] * out.factors[2];
    if (prod != FFPoly::x_pow_minus_one(f, 5))
        throw error("x^5 - 1 split verification failed (internal)");
    return out;
}

} // namespace knf
