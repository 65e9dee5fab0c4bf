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

#include <cassert>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <vector>

#include "knforge/numth.hpp"

namespace knf {

// F_{q^n} with q = p^e is realized as one absolute extension F_p[x]/(modulus)
// of degree d = e*n.  The intermediate F_q is the set of c with c^q = c,
// generated by a root of the canonical degree-e irreducible over F_p.
//
// Deterministic conventions (they matter for reproducible certificates):
//   * monic polynomials of degree k over F_p are enumerated by mapping the
//     integer i to the coefficient tail c_j = j-th base-p digit of i,
//     candidate x^k + sum c_j x^j; "lexicographically first" = smallest i;
//   * an element's index is sum coord_j * p^j (power basis of the modulus);
//     element scan order is ascending index.
//
// Elements and polynomials hold a plain pointer to their context; the
// FieldPtr returned by make_field owns the context and must outlive them.

class FieldCtx;
using FieldPtr = std::shared_ptr<const FieldCtx>;
using Fld = const FieldCtx*;

struct FactoredPoly;

namespace detail {

// ---- dense polynomial arithmetic over F_p (vector<uint64_t>, ascending) ----
// coefficient values always lie in [0, p) with p < 2^31, so raw products fit
// in 64 bits and row sums fit in 128

inline void fp_trim(std::vector<uint64_t>& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int fp_deg(const std::vector<uint64_t>& a) {
    return static_cast<int>(a.size()) - 1;
}

inline uint64_t fp_inv(uint64_t a, uint64_t p) {
    int64_t t = 0, nt = 1;
    int64_t r = static_cast<int64_t>(p), nr = static_cast<int64_t>(a % p);
    while (nr != 0) {
        int64_t qq = r / nr;
        t -= qq * nt;
        std::swap(t, nt);
        r -= qq * nr;
        std::swap(r, nr);
    }
    if (t < 0) t += static_cast<int64_t>(p);
    return static_cast<uint64_t>(t);
}

inline std::vector<uint64_t> fp_mul(const std::vector<uint64_t>& a,
                                    const std::vector<uint64_t>& b, uint64_t p) {
    if (a.empty() || b.empty()) return {};
    std::vector<__uint128_t> acc(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j) acc[i + j] += a[i] * b[j];
    }
    std::vector<uint64_t> out(acc.size());
    for (size_t i = 0; i < acc.size(); ++i)
        out[i] = static_cast<uint64_t>(acc[i] % p);
    fp_trim(out);
    return out;
}

inline std::vector<uint64_t> fp_mod(std::vector<uint64_t> a,
                                    const std::vector<uint64_t>& m, uint64_t p) {
    fp_trim(a);
    int dm = fp_deg(m);
    assert(dm >= 0);
    uint64_t lead_inv = fp_inv(m[dm], p);
    while (fp_deg(a) >= dm) {
        int da = fp_deg(a);
        uint64_t c = mulmod_u64(a[da], lead_inv, p);
        if (c) {
            for (int j = 0; j <= dm; ++j) {
                uint64_t sub = mulmod_u64(c, m[j], p);
                uint64_t& t = a[da - dm + j];
                t = (t + p - sub) % p;
            }
        }
        a.pop_back();
        fp_trim(a);
    }
    return a;
}

inline std::vector<uint64_t> fp_mulmod(const std::vector<uint64_t>& a,
                                       const std::vector<uint64_t>& b,
                                       const std::vector<uint64_t>& m, uint64_t p) {
    return fp_mod(fp_mul(a, b, p), m, p);
}

inline std::vector<uint64_t> fp_powmod(std::vector<uint64_t> base, mpz_class e,
                                       const std::vector<uint64_t>& m, uint64_t p) {
    std::vector<uint64_t> r{1};
    base = fp_mod(std::move(base), m, p);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = fp_mulmod(r, base, m, p);
        base = fp_mulmod(base, base, m, p);
        mpz_fdiv_q_2exp(e.get_mpz_t(), e.get_mpz_t(), 1);
    }
    return r;
}

inline std::vector<uint64_t> fp_gcd(std::vector<uint64_t> a,
                                    std::vector<uint64_t> b, uint64_t p) {
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        a = fp_mod(std::move(a), b, p);
        std::swap(a, b);
    }
    if (!a.empty()) {
        uint64_t inv = fp_inv(a.back(), p);
        for (auto& c : a) c = mulmod_u64(c, inv, p);
    }
    return a;
}

// irreducibility of monic f over F_p: x^(p^deg) == x mod f, and
// gcd(x^(p^(deg/r)) - x, f) = 1 for every prime r | deg
inline bool fp_irreducible(const std::vector<uint64_t>& f, uint64_t p) {
    int df = fp_deg(f);
    if (df < 1) return false;
    if (df == 1) return true;
    mpz_class pz(static_cast<unsigned long>(p));
    auto frob_iter = [&](int k) {
        std::vector<uint64_t> r = fp_mod({0, 1}, f, p);
        for (int i = 0; i < k; ++i) r = fp_powmod(r, pz, f, p);
        return r;
    };
    auto minus_x = [&](std::vector<uint64_t> g) {
        if (g.size() < 2) g.resize(2, 0);
        g[1] = (g[1] + p - 1) % p;
        fp_trim(g);
        return g;
    };
    if (!minus_x(frob_iter(df)).empty()) return false;
    auto dfac = factor_u64(static_cast<uint64_t>(df));
    for (const auto& pf : dfac.factors) {
        int k = df / static_cast<int>(pf.prime.get_ui());
        if (fp_deg(fp_gcd(minus_x(frob_iter(k)), f, p)) != 0) return false;
    }
    return true;
}

// lexicographically first monic irreducible of the given degree
inline std::vector<uint64_t> fp_first_irreducible(unsigned degree, uint64_t p) {
    if (degree == 1) return {0, 1}; // x itself
    mpz_class limit;
    mpz_ui_pow_ui(limit.get_mpz_t(), static_cast<unsigned long>(p), degree);
    for (mpz_class i = 0; i < limit; ++i) {
        std::vector<uint64_t> f(degree + 1, 0);
        mpz_class t = i;
        for (unsigned j = 0; j < degree; ++j) {
            f[j] = mpz_fdiv_ui(t.get_mpz_t(), static_cast<unsigned long>(p));
            t /= static_cast<unsigned long>(p);
        }
        f[degree] = 1;
        if (fp_irreducible(f, p)) return f;
    }
    throw error("no irreducible polynomial found (unreachable)");
}

} // namespace detail

// ---------------------------------------------------------------------------
// field context
// ---------------------------------------------------------------------------

class FieldCtx {
  public:
    uint64_t p = 2;
    unsigned e = 1, n = 1, d = 1; // d = e*n
    uint64_t seed = 0;
    mpz_class q;     // p^e
    mpz_class order; // p^(e*n)
    mpz_class units; // order - 1
    std::vector<uint64_t> modulus;           // monic, ascending, size d+1
    std::vector<uint64_t> subfield_min_poly; // degree e over F_p

    // power-basis coordinates of s^i for i < e (s = subfield generator)
    std::vector<std::vector<uint64_t>> s_powers;

    // d x d matrices over F_p, row-major: x -> x^p and x -> x^q
    std::vector<uint64_t> frob_p, frob_q;

    using Coords = std::vector<uint64_t>;

    Coords zero_c() const { return Coords(d, 0); }

    Coords add_c(const Coords& a, const Coords& b) const {
        Coords r(d);
        for (unsigned i = 0; i < d; ++i) {
            uint64_t s = a[i] + b[i];
            r[i] = s >= p ? s - p : s;
        }
        return r;
    }

    Coords sub_c(const Coords& a, const Coords& b) const {
        Coords r(d);
        for (unsigned i = 0; i < d; ++i)
            r[i] = a[i] >= b[i] ? a[i] - b[i] : a[i] + p - b[i];
        return r;
    }

    Coords neg_c(const Coords& a) const {
        Coords r(d);
        for (unsigned i = 0; i < d; ++i) r[i] = a[i] ? p - a[i] : 0;
        return r;
    }

    Coords scal_c(const Coords& a, uint64_t k) const {
        Coords r(d);
        k %= p;
        for (unsigned i = 0; i < d; ++i) r[i] = detail::mulmod_u64(a[i], k, p);
        return r;
    }

    Coords mul_c(const Coords& a, const Coords& b) const {
        std::vector<__uint128_t> acc(2 * d - 1, 0);
        for (unsigned i = 0; i < d; ++i) {
            if (!a[i]) continue;
            for (unsigned j = 0; j < d; ++j) acc[i + j] += a[i] * b[j];
        }
        std::vector<uint64_t> t(2 * d - 1);
        for (size_t i = 0; i < acc.size(); ++i)
            t[i] = static_cast<uint64_t>(acc[i] % p);
        for (int i = static_cast<int>(2 * d - 2); i >= static_cast<int>(d); --i) {
            uint64_t c = t[i];
            if (!c) continue;
            t[i] = 0;
            for (unsigned j = 0; j < d; ++j) {
                if (!modulus[j]) continue;
                uint64_t sub = detail::mulmod_u64(c, modulus[j], p);
                uint64_t& v = t[i - d + j];
                v = (v + p - sub) % p;
            }
        }
        t.resize(d);
        return t;
    }

    Coords inv_c(const Coords& a) const {
        std::vector<uint64_t> ap(a);
        detail::fp_trim(ap);
        if (ap.empty()) throw bad_input("division by zero in field");
        std::vector<uint64_t> r0 = modulus, r1 = ap;
        std::vector<uint64_t> t0, t1{1};
        while (!r1.empty()) {
            std::vector<uint64_t> q_poly;
            {
                std::vector<uint64_t> rem = r0;
                int d1 = detail::fp_deg(r1);
                uint64_t li = detail::fp_inv(r1[d1], p);
                q_poly.assign(
                    static_cast<size_t>(std::max(0, detail::fp_deg(rem) - d1 + 1)), 0);
                while (detail::fp_deg(rem) >= d1) {
                    int dr = detail::fp_deg(rem);
                    uint64_t c = detail::mulmod_u64(rem[dr], li, p);
                    q_poly[dr - d1] = c;
                    for (int j = 0; j <= d1; ++j) {
                        uint64_t sub = detail::mulmod_u64(c, r1[j], p);
                        rem[dr - d1 + j] = (rem[dr - d1 + j] + p - sub) % p;
                    }
                    detail::fp_trim(rem);
                }
                r0 = r1;
                r1 = rem;
            }
            auto qt1 = detail::fp_mul(q_poly, t1, p);
            std::vector<uint64_t> t2(std::max(t0.size(), qt1.size()), 0);
            for (size_t i = 0; i < t0.size(); ++i) t2[i] = t0[i];
            for (size_t i = 0; i < qt1.size(); ++i) t2[i] = (t2[i] + p - qt1[i]) % p;
            detail::fp_trim(t2);
            t0 = t1;
            t1 = t2;
        }
        assert(detail::fp_deg(r0) == 0);
        uint64_t ginv = detail::fp_inv(r0[0], p);
        Coords out(d, 0);
        for (size_t i = 0; i < t0.size(); ++i)
            out[i] = detail::mulmod_u64(t0[i], ginv, p);
        return out;
    }

    Coords apply_matrix(const std::vector<uint64_t>& m, const Coords& a) const {
        Coords r(d, 0);
        for (unsigned i = 0; i < d; ++i) {
            __uint128_t acc = 0;
            const uint64_t* row = &m[size_t(i) * d];
            for (unsigned j = 0; j < d; ++j)
                acc += static_cast<__uint128_t>(row[j]) * a[j];
            r[i] = static_cast<uint64_t>(acc % p);
        }
        return r;
    }

    Coords coords_of_index(const mpz_class& idx) const {
        Coords c(d, 0);
        mpz_class t = idx;
        for (unsigned j = 0; j < d && t != 0; ++j) {
            c[j] = mpz_fdiv_ui(t.get_mpz_t(), static_cast<unsigned long>(p));
            t /= static_cast<unsigned long>(p);
        }
        return c;
    }

    mpz_class index_of_coords(const Coords& c) const {
        mpz_class idx = 0;
        for (unsigned j = d; j-- > 0;) {
            idx *= static_cast<unsigned long>(p);
            idx += static_cast<unsigned long>(c[j]);
        }
        return idx;
    }

    // lazily filled factorization of x^n - 1 over F_q
    mutable std::shared_ptr<const FactoredPoly> xn1_cache;
    mutable std::mutex cache_mu;
};

// ---------------------------------------------------------------------------
// elements
// ---------------------------------------------------------------------------

class FFElement {
  public:
    FFElement() = default;
    FFElement(Fld f, FieldCtx::Coords c) : f_(f), c_(std::move(c)) {}

    const FieldCtx& field() const { return *f_; }
    Fld fld() const { return f_; }
    const FieldCtx::Coords& coords() const { return c_; }

    bool is_zero() const {
        for (uint64_t v : c_)
            if (v) return false;
        return true;
    }

    bool operator==(const FFElement& o) const { return c_ == o.c_; }
    bool operator!=(const FFElement& o) const { return c_ != o.c_; }

    FFElement operator+(const FFElement& o) const { return {f_, f_->add_c(c_, o.c_)}; }
    FFElement operator-(const FFElement& o) const { return {f_, f_->sub_c(c_, o.c_)}; }
    FFElement operator*(const FFElement& o) const { return {f_, f_->mul_c(c_, o.c_)}; }
    FFElement operator-() const { return {f_, f_->neg_c(c_)}; }

    FFElement inverse() const { return {f_, f_->inv_c(c_)}; }

    FFElement pow(mpz_class e) const {
        if (e < 0) return inverse().pow(-e);
        FFElement r = one(f_), b = *this;
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) r = r * b;
            b = b * b;
            mpz_fdiv_q_2exp(e.get_mpz_t(), e.get_mpz_t(), 1);
        }
        return r;
    }

    FFElement frob_p() const { return {f_, f_->apply_matrix(f_->frob_p, c_)}; }
    FFElement frob_q() const { return {f_, f_->apply_matrix(f_->frob_q, c_)}; }

    FFElement frob_q_pow(unsigned k) const {
        FFElement r = *this;
        for (unsigned i = 0; i < k; ++i) r = r.frob_q();
        return r;
    }

    // membership in the embedded F_q: c^q = c
    bool in_subfield() const { return frob_q() == *this; }

    mpz_class index() const { return f_->index_of_coords(c_); }

    static FFElement zero(Fld f) { return {f, f->zero_c()}; }
    static FFElement one(Fld f) {
        auto c = f->zero_c();
        c[0] = 1 % f->p;
        return {f, std::move(c)};
    }
    static FFElement from_int(Fld f, uint64_t v) {
        auto c = f->zero_c();
        c[0] = v % f->p;
        return {f, std::move(c)};
    }
    static FFElement from_index(Fld f, const mpz_class& idx) {
        return {f, f->coords_of_index(idx)};
    }

  private:
    Fld f_ = nullptr;
    FieldCtx::Coords c_;
};

// absolute trace to F_p, returned as the integer residue
inline uint64_t trace_abs(const FFElement& a) {
    FFElement acc = a, pw = a;
    for (unsigned i = 1; i < a.field().d; ++i) {
        pw = pw.frob_p();
        acc = acc + pw;
    }
    for (unsigned i = 1; i < a.field().d; ++i) assert(acc.coords()[i] == 0);
    return acc.coords()[0];
}

// trace of F_{q^n} over F_q
inline FFElement trace_to_Fq(const FFElement& a) {
    FFElement acc = a, pw = a;
    for (unsigned i = 1; i < a.field().n; ++i) {
        pw = pw.frob_q();
        acc = acc + pw;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// polynomials over the big field
// ---------------------------------------------------------------------------

// dense, coefficients ascending, kept trimmed.  Polynomials "over F_q" are
// the same type with every coefficient passing in_subfield();
// fq_poly_checked() enforces that contract at the boundaries that need it.
struct FFPoly {
    Fld f = nullptr;
    std::vector<FFElement> c;

    FFPoly() = default;
    explicit FFPoly(Fld fld) : f(fld) {}
    FFPoly(Fld fld, std::vector<FFElement> cs) : f(fld), c(std::move(cs)) { trim(); }

    int deg() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }

    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }

    static FFPoly zero(Fld f) { return FFPoly(f); }
    static FFPoly one(Fld f) { return FFPoly(f, {FFElement::one(f)}); }
    static FFPoly x(Fld f) {
        return FFPoly(f, {FFElement::zero(f), FFElement::one(f)});
    }
    static FFPoly x_pow_minus_one(Fld f, unsigned n) {
        std::vector<FFElement> cs(n + 1, FFElement::zero(f));
        cs[0] = -FFElement::one(f);
        cs[n] = FFElement::one(f);
        return FFPoly(f, std::move(cs));
    }

    FFElement coeff(size_t i) const {
        return i < c.size() ? c[i] : FFElement::zero(f);
    }

    bool operator==(const FFPoly& o) const {
        if (c.size() != o.c.size()) return false;
        for (size_t i = 0; i < c.size(); ++i)
            if (c[i] != o.c[i]) return false;
        return true;
    }
    bool operator!=(const FFPoly& o) const { return !(*this == o); }

    FFPoly operator+(const FFPoly& o) const {
        std::vector<FFElement> r(std::max(c.size(), o.c.size()), FFElement::zero(f));
        for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) + o.coeff(i);
        return FFPoly(f, std::move(r));
    }
    FFPoly operator-(const FFPoly& o) const {
        std::vector<FFElement> r(std::max(c.size(), o.c.size()), FFElement::zero(f));
        for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) - o.coeff(i);
        return FFPoly(f, std::move(r));
    }
    FFPoly operator*(const FFPoly& o) const {
        if (is_zero() || o.is_zero()) return zero(f);
        std::vector<FFElement> r(c.size() + o.c.size() - 1, FFElement::zero(f));
        for (size_t i = 0; i < c.size(); ++i) {
            if (c[i].is_zero()) continue;
            for (size_t j = 0; j < o.c.size(); ++j)
                r[i + j] = r[i + j] + c[i] * o.c[j];
        }
        return FFPoly(f, std::move(r));
    }

    FFPoly scaled(const FFElement& k) const {
        std::vector<FFElement> r(c);
        for (auto& v : r) v = v * k;
        return FFPoly(f, std::move(r));
    }

    FFPoly monic() const {
        if (is_zero()) return *this;
        return scaled(c.back().inverse());
    }

    std::pair<FFPoly, FFPoly> divmod(const FFPoly& div) const {
        if (div.is_zero()) throw bad_input("polynomial division by zero");
        FFPoly rem = *this, quo(f);
        int dd = div.deg();
        FFElement li = div.c.back().inverse();
        if (rem.deg() >= dd) quo.c.assign(rem.deg() - dd + 1, FFElement::zero(f));
        while (rem.deg() >= dd) {
            int dr = rem.deg();
            FFElement k = rem.c.back() * li;
            quo.c[dr - dd] = k;
            for (int j = 0; j <= dd; ++j)
                rem.c[dr - dd + j] = rem.c[dr - dd + j] - k * div.c[j];
            rem.trim();
        }
        quo.trim();
        return {quo, rem};
    }

    FFPoly operator%(const FFPoly& div) const { return divmod(div).second; }
    FFPoly operator/(const FFPoly& div) const { return divmod(div).first; }

    FFElement eval(const FFElement& a) const {
        FFElement r = FFElement::zero(f);
        for (size_t i = c.size(); i-- > 0;) r = r * a + c[i];
        return r;
    }

    FFPoly derivative() const {
        if (c.size() <= 1) return zero(f);
        std::vector<FFElement> r(c.size() - 1, FFElement::zero(f));
        for (size_t i = 1; i < c.size(); ++i)
            r[i - 1] = c[i] * FFElement::from_int(f, i % f->p);
        return FFPoly(f, std::move(r));
    }

    // deterministic ordering key: (degree, coefficient indices low to high)
    bool key_less(const FFPoly& o) const {
        if (deg() != o.deg()) return deg() < o.deg();
        for (size_t i = 0; i < c.size(); ++i) {
            mpz_class a = c[i].index(), b = o.c[i].index();
            if (a != b) return a < b;
        }
        return false;
    }
};

inline FFPoly poly_gcd(FFPoly a, FFPoly b) {
    while (!b.is_zero()) {
        a = a % b;
        std::swap(a, b);
    }
    return a.monic();
}

inline FFPoly poly_powmod(FFPoly base, mpz_class e, const FFPoly& m) {
    FFPoly r = FFPoly::one(base.f);
    base = base % m;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = (r * base) % m;
        base = (base * base) % m;
        mpz_fdiv_q_2exp(e.get_mpz_t(), e.get_mpz_t(), 1);
    }
    return r;
}

inline bool is_fq_poly(const FFPoly& a) {
    for (const auto& v : a.c)
        if (!v.in_subfield()) return false;
    return true;
}

inline const FFPoly& fq_poly_checked(const FFPoly& a) {
    if (!is_fq_poly(a))
        throw bad_input("polynomial has coefficients outside the embedded F_q");
    return a;
}

// ---------------------------------------------------------------------------
// field construction
// ---------------------------------------------------------------------------

namespace detail {

// one root of a squarefree fully-splitting polynomial over the field, by
// equal-degree splitting (seeded, deterministic per seed)
inline FFElement find_root(FFPoly r, std::mt19937_64& rng) {
    const Fld f = r.f;
    const FieldCtx& K = *f;
    r = r.monic();
    while (r.deg() > 1) {
        FFPoly g(f);
        if (K.p != 2) {
            mpz_class half = K.units / 2;
            FFPoly base = FFPoly::x(f);
            base.c[0] = FFElement::from_index(f, mpz_class(rng()) % K.order);
            FFPoly w = poly_powmod(base, half, r);
            if (w.c.empty()) w.c.push_back(FFElement::zero(f));
            w.c[0] = w.c[0] - FFElement::one(f);
            w.trim();
            g = poly_gcd(w, r);
        } else {
            FFPoly ty = FFPoly::x(f).scaled(
                FFElement::from_index(f, mpz_class(rng()) % K.order));
            FFPoly w = ty % r, term = ty % r;
            for (unsigned i = 1; i < K.d; ++i) {
                term = (term * term) % r;
                w = w + term;
            }
            g = poly_gcd(w, r);
        }
        if (g.deg() > 0 && g.deg() < r.deg()) {
            FFPoly other = r / g;
            r = (g.deg() <= other.deg() ? g : other).monic();
        }
    }
    if (r.deg() != 1) throw error("root finding failed (degenerate input)");
    return -(r.c[0] * r.c[1].inverse());
}

} // namespace detail

// Builds F_{q^n}, q = p^e.  When a modulus is supplied it must be monic
// irreducible of degree e*n over F_p (ascending coefficients, length e*n+1);
// otherwise the lexicographically first irreducible is used.
inline FieldPtr make_field(uint64_t p, unsigned e, unsigned n, uint64_t seed = 1,
                           std::optional<std::vector<uint64_t>> modulus = std::nullopt) {
    if (!detail::is_prime_u64(p)) throw not_prime_power("p must be prime");
    if (p >> 31) throw bad_input("characteristic too large (p < 2^31 required)");
    if (e == 0 || n == 0) throw bad_input("e and n must be positive");
    auto ctx = std::make_shared<FieldCtx>();
    FieldCtx& K = *ctx;
    K.p = p;
    K.e = e;
    K.n = n;
    K.d = e * n;
    K.seed = seed;
    mpz_ui_pow_ui(K.q.get_mpz_t(), static_cast<unsigned long>(p), e);
    mpz_ui_pow_ui(K.order.get_mpz_t(), static_cast<unsigned long>(p), K.d);
    K.units = K.order - 1;

    if (modulus) {
        auto m = *modulus;
        if (m.size() != size_t(K.d) + 1)
            throw bad_input("modulus must have degree e*n");
        for (auto& cc : m) cc %= p;
        if (m.back() != 1) throw bad_input("modulus must be monic");
        if (!detail::fp_irreducible(m, p))
            throw reducible("supplied modulus is reducible over F_p");
        K.modulus = std::move(m);
    } else {
        K.modulus = detail::fp_first_irreducible(K.d, p);
    }

    // Frobenius matrices: columns of frob_p are coords of (x^j)^p = (x^p)^j
    {
        std::vector<uint64_t> xp = detail::fp_powmod(
            {0, 1}, mpz_class(static_cast<unsigned long>(p)), K.modulus, p);
        K.frob_p.assign(size_t(K.d) * K.d, 0);
        std::vector<uint64_t> cur{1};
        for (unsigned j = 0; j < K.d; ++j) {
            for (size_t i = 0; i < cur.size(); ++i)
                K.frob_p[i * K.d + j] = cur[i];
            if (j + 1 < K.d) cur = detail::fp_mulmod(cur, xp, K.modulus, p);
        }
        auto matmul = [&](const std::vector<uint64_t>& A,
                          const std::vector<uint64_t>& B) {
            std::vector<uint64_t> C(size_t(K.d) * K.d, 0);
            for (unsigned i = 0; i < K.d; ++i)
                for (unsigned k = 0; k < K.d; ++k) {
                    uint64_t a = A[size_t(i) * K.d + k];
                    if (!a) continue;
                    for (unsigned j2 = 0; j2 < K.d; ++j2) {
                        uint64_t prod = detail::mulmod_u64(a, B[size_t(k) * K.d + j2], p);
                        uint64_t& cc = C[size_t(i) * K.d + j2];
                        cc = (cc + prod) % p;
                    }
                }
            return C;
        };
        K.frob_q = K.frob_p;
        for (unsigned i = 1; i < e; ++i) K.frob_q = matmul(K.frob_q, K.frob_p);
    }

    // subfield generator s: root of the canonical degree-e irreducible
    if (e == 1) {
        K.subfield_min_poly = {p - 1, 1}; // x - 1, root s = 1
        K.s_powers.assign(1, K.zero_c());
        K.s_powers[0][0] = 1 % p;
    } else {
        K.subfield_min_poly = detail::fp_first_irreducible(e, p);
        FFPoly h(ctx.get());
        for (unsigned i = 0; i <= e; ++i)
            h.c.push_back(FFElement::from_int(ctx.get(), K.subfield_min_poly[i]));
        h.trim();
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        FFElement s = detail::find_root(h, rng);
        K.s_powers.assign(e, K.zero_c());
        FieldCtx::Coords cur = K.zero_c();
        cur[0] = 1;
        for (unsigned i = 0; i < e; ++i) {
            K.s_powers[i] = cur;
            if (i + 1 < e) cur = K.mul_c(cur, s.coords());
        }
    }
    return ctx;
}

// express a subfield element in the s-power basis: c = sum out[i] * s^i
inline std::vector<uint64_t> subfield_coords(const FFElement& c) {
    const FieldCtx& K = c.field();
    unsigned d = K.d, e = K.e;
    std::vector<std::vector<uint64_t>> m(d, std::vector<uint64_t>(e + 1, 0));
    for (unsigned j = 0; j < e; ++j)
        for (unsigned i = 0; i < d; ++i) m[i][j] = K.s_powers[j][i];
    for (unsigned i = 0; i < d; ++i) m[i][e] = c.coords()[i];
    unsigned row = 0;
    std::vector<int> pivot_row(e, -1);
    for (unsigned col = 0; col < e && row < d; ++col) {
        unsigned sel = row;
        while (sel < d && m[sel][col] == 0) ++sel;
        if (sel == d) continue;
        std::swap(m[sel], m[row]);
        uint64_t inv = detail::fp_inv(m[row][col], K.p);
        for (unsigned j = col; j <= e; ++j)
            m[row][j] = detail::mulmod_u64(m[row][j], inv, K.p);
        for (unsigned i = 0; i < d; ++i) {
            if (i == row || m[i][col] == 0) continue;
            uint64_t k = m[i][col];
            for (unsigned j = col; j <= e; ++j) {
                uint64_t sub = detail::mulmod_u64(k, m[row][j], K.p);
                m[i][j] = (m[i][j] + K.p - sub) % K.p;
            }
        }
        pivot_row[col] = static_cast<int>(row);
        ++row;
    }
    std::vector<uint64_t> out(e, 0);
    for (unsigned col = 0; col < e; ++col)
        if (pivot_row[col] >= 0) out[col] = m[pivot_row[col]][e];
    for (unsigned i = row; i < d; ++i)
        if (m[i][e] != 0)
            throw bad_input("element is not in the embedded subfield");
    return out;
}

// build a subfield element from s-power coordinates
inline FFElement subfield_element(Fld f, const std::vector<uint64_t>& cs) {
    const FieldCtx& K = *f;
    auto acc = K.zero_c();
    for (unsigned i = 0; i < K.e && i < cs.size(); ++i)
        acc = K.add_c(acc, K.scal_c(K.s_powers[i], cs[i]));
    return {f, acc};
}

// integer rank of a subfield element (base-p digits in the s-basis); used for
// deterministic tie-breaks and canonical "smaller lift" choices
inline mpz_class subfield_rank(const FFElement& c) {
    auto cs = subfield_coords(c);
    mpz_class r = 0;
    for (size_t i = cs.size(); i-- > 0;) {
        r *= static_cast<unsigned long>(c.field().p);
        r += static_cast<unsigned long>(cs[i]);
    }
    return r;
}

// minimal polynomial of a over F_p (ascending, monic), via p-conjugates
inline std::vector<uint64_t> minimal_poly_over_Fp(const FFElement& a) {
    Fld f = a.fld();
    std::vector<FFElement> conj{a};
    FFElement cur = a.frob_p();
    while (cur != a) {
        conj.push_back(cur);
        cur = cur.frob_p();
    }
    FFPoly m = FFPoly::one(f);
    for (const auto& r : conj) m = m * FFPoly(f, {-r, FFElement::one(f)});
    std::vector<uint64_t> out(m.c.size());
    for (size_t i = 0; i < m.c.size(); ++i) {
        const auto& cc = m.c[i].coords();
        for (size_t j = 1; j < cc.size(); ++j)
            if (cc[j] != 0)
                throw error("minimal polynomial has a non-prime-field coefficient");
        out[i] = cc[0];
    }
    return out;
}

} // namespace knf
