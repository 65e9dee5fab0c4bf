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

#include "knforge/fqfactor.hpp"

namespace knf {

// Linearized polynomial calculus.  For f = sum a_i x^i over F_q, the
// q-associate acts on F_{q^n} by L_f(alpha) = sum a_i alpha^{q^i}; it is
// F_q-linear, and L_{fg} = L_f composed with L_g.  For fg = x^n - 1,
// alpha lies in the image of L_f exactly when L_g(alpha) = 0, and Ker L_g
// has exactly q^{deg g} elements.

inline FFElement q_associate_eval(const FFPoly& f, const FFElement& alpha) {
    fq_poly_checked(f);
    Fld F = alpha.fld();
    FFElement acc = FFElement::zero(F);
    FFElement cur = alpha;
    for (size_t i = 0; i < f.c.size(); ++i) {
        if (!f.c[i].is_zero()) acc = acc + f.c[i] * cur;
        if (i + 1 < f.c.size()) cur = cur.frob_q();
    }
    return acc;
}

// g_alpha(x) = sum_{i=0}^{n-1} alpha^{q^i} x^{n-1-i}
inline FFPoly g_alpha(const FFElement& alpha) {
    Fld F = alpha.fld();
    unsigned n = F->n;
    std::vector<FFElement> c(n, FFElement::zero(F));
    FFElement cur = alpha;
    for (unsigned i = 0; i < n; ++i) {
        c[n - 1 - i] = cur;
        if (i + 1 < n) cur = cur.frob_q();
    }
    return FFPoly(F, std::move(c));
}

// k such that gcd(x^n - 1, g_alpha) has degree k, the gcd taken in
// F_{q^n}[x]; alpha = 0 yields k = n by convention (the zero element is
// annihilated by everything)
inline unsigned k_normality(const FFElement& alpha) {
    Fld F = alpha.fld();
    if (alpha.is_zero()) return F->n;
    FFPoly d = poly_gcd(FFPoly::x_pow_minus_one(F, F->n), g_alpha(alpha));
    return static_cast<unsigned>(d.deg());
}

struct FqOrderResult {
    FFPoly order_poly; // minimal monic divisor D of x^n - 1 with L_D(alpha) = 0
    unsigned k;        // n - deg(order_poly)
};

// minimal annihilating divisor, by scanning the divisor lattice of x^n - 1
// in nondecreasing degree (deterministic order); the last divisor x^n - 1
// always annihilates, so the scan terminates
inline FqOrderResult fq_order(const FFElement& alpha) {
    Fld F = alpha.fld();
    const auto& fac = factor_xn_minus_1(F);
    for (const auto& D : divisors_of(fac)) {
        if (q_associate_eval(D, alpha).is_zero())
            return {D, F->n - static_cast<unsigned>(D.deg())};
    }
    throw error("x^n - 1 does not annihilate the element (internal)");
}

// M-freeness: alpha = L_h(beta) with monic h | M forces h = 1.  Via the
// image/kernel duality this reduces to L_{(x^n-1)/h}(alpha) != 0 for every
// irreducible h | M.
inline bool is_poly_free(const FFElement& alpha, const FFPoly& M) {
    Fld F = alpha.fld();
    fq_poly_checked(M);
    if (M.is_zero())
        throw not_a_divisor("the zero polynomial does not divide x^n - 1");
    FFPoly xn1 = FFPoly::x_pow_minus_one(F, F->n);
    if (!(xn1 % M).is_zero()) throw not_a_divisor("M does not divide x^n - 1");
    if (M.deg() == 0) return true;
    for (const auto& [h, mult] : factor_xn_minus_1(F).factors) {
        if (!(M % h).is_zero()) continue;
        if (q_associate_eval(xn1 / h, alpha).is_zero()) return false;
    }
    return true;
}

// F_p-basis of Ker L_g = { alpha : L_g(alpha) = 0 }; the kernel is an
// F_q-space of dimension deg g, hence an F_p-space of dimension e * deg g
inline std::vector<FFElement> linearized_kernel_basis(const FFPoly& g) {
    fq_poly_checked(g);
    Fld F = g.f;
    const unsigned d = F->d;
    const uint64_t p = F->p;
    // columns are the images of the power basis under L_g
    std::vector<std::vector<uint64_t>> A(d, std::vector<uint64_t>(d, 0));
    for (unsigned j = 0; j < d; ++j) {
        auto bj = F->zero_c();
        bj[j] = 1;
        FFElement img = q_associate_eval(g, FFElement(F, bj));
        for (unsigned i = 0; i < d; ++i) A[i][j] = img.coords()[i];
    }
    // reduced row echelon form
    std::vector<int> pivot_of_col(d, -1);
    unsigned row = 0;
    for (unsigned col = 0; col < d && row < d; ++col) {
        unsigned sel = row;
        while (sel < d && A[sel][col] == 0) ++sel;
        if (sel == d) continue;
        std::swap(A[sel], A[row]);
        uint64_t inv = detail::fp_inv(A[row][col], p);
        for (unsigned j = col; j < d; ++j)
            A[row][j] = detail::mulmod_u64(A[row][j], inv, p);
        for (unsigned i = 0; i < d; ++i) {
            if (i == row || A[i][col] == 0) continue;
            uint64_t k = A[i][col];
            for (unsigned j = col; j < d; ++j) {
                uint64_t sub = detail::mulmod_u64(k, A[row][j], p);
                A[i][j] = (A[i][j] + p - sub) % p;
            }
        }
        pivot_of_col[col] = static_cast<int>(row);
        ++row;
    }
    std::vector<FFElement> basis;
    for (unsigned j = 0; j < d; ++j) {
        if (pivot_of_col[j] >= 0) continue; // pivot column
        auto v = F->zero_c();
        v[j] = 1;
        for (unsigned col = 0; col < d; ++col) {
            if (pivot_of_col[col] < 0) continue;
            uint64_t a = A[pivot_of_col[col]][j];
            v[col] = a ? p - a : 0;
        }
        basis.emplace_back(F, std::move(v));
    }
    return basis;
}

// all p^(basis size) kernel elements; guarded against runaway enumerations
inline std::vector<FFElement> kernel_elements(const FFPoly& g,
                                              uint64_t limit = (1u << 22)) {
    auto basis = linearized_kernel_basis(g);
    Fld F = g.f;
    mpz_class total;
    mpz_ui_pow_ui(total.get_mpz_t(), static_cast<unsigned long>(F->p),
                  basis.size());
    if (total > limit)
        throw range_too_large("kernel too large to enumerate");
    std::vector<FFElement> out;
    out.reserve(total.get_ui());
    std::vector<uint64_t> digits(basis.size(), 0);
    while (true) {
        FFElement acc = FFElement::zero(F);
        for (size_t i = 0; i < basis.size(); ++i)
            if (digits[i])
                acc = acc + FFElement(F, F->scal_c(basis[i].coords(), digits[i]));
        out.push_back(acc);
        size_t i = 0;
        while (i < digits.size() && digits[i] == F->p - 1) digits[i++] = 0;
        if (i == digits.size()) break;
        ++digits[i];
    }
    return out;
}

} // namespace knf
