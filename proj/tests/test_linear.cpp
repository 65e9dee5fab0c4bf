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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "knforge/linear.hpp"

using namespace knf;

namespace {

std::vector<FFElement> all_elements(const FieldPtr& f) {
    std::vector<FFElement> out;
    for (mpz_class i = 0; i < f->order; ++i)
        out.push_back(FFElement::from_index(f.get(), i));
    return out;
}

FFPoly lift_fp_poly(Fld f, const std::vector<uint64_t>& v) {
    FFPoly g(f);
    for (uint64_t c : v) g.c.push_back(FFElement::from_int(f, c));
    g.trim();
    return g;
}

// random polynomial with coefficients in the embedded F_q
FFPoly random_fq_poly(Fld f, unsigned deg, std::mt19937_64& rng) {
    FFPoly g(f);
    for (unsigned i = 0; i <= deg; ++i) {
        std::vector<uint64_t> cs(f->e);
        for (auto& c : cs) c = rng() % f->p;
        g.c.push_back(subfield_element(f, cs));
    }
    g.trim();
    return g;
}

FFElement random_element(Fld f, std::mt19937_64& rng) {
    return FFElement::from_index(f, mpz_class(rng()) % f->order);
}

} // namespace

TEST_CASE("the q-associate of x - 1 detects the subfield") {
    auto f = make_field(2, 2, 2); // F_16 over F_4
    auto xm1 = FFPoly::x(f.get()) - FFPoly::one(f.get());
    for (const auto& a : all_elements(f)) {
        auto v = q_associate_eval(xm1, a);
        CHECK(v == a.frob_q() - a);
        CHECK(v.is_zero() == a.in_subfield());
    }
}

TEST_CASE("q-associates of explicit quadratics match their closed forms") {
    std::mt19937_64 rng(2024);
    for (auto f : {make_field(3, 1, 4), make_field(2, 2, 2)}) {
        auto one = FFElement::one(f.get());
        for (int iter = 0; iter < 50; ++iter) {
            std::vector<uint64_t> cs(f->e);
            for (auto& c : cs) c = rng() % f->p;
            FFElement b = subfield_element(f.get(), cs);
            FFElement a = random_element(f.get(), rng);
            // (x + 1)(x + b) = x^2 + (b+1)x + b
            FFPoly fb(f.get(), {b, b + one, one});
            CHECK(q_associate_eval(fb, a) ==
                  a.frob_q_pow(2) + (b + one) * a.frob_q() + b * a);
            // x^2 - bx + 1
            FFPoly gb(f.get(), {one, -b, one});
            CHECK(q_associate_eval(gb, a) ==
                  a.frob_q_pow(2) - b * a.frob_q() + a);
        }
    }
}

TEST_CASE("q-associates are additive and compose multiplicatively") {
    auto f = make_field(3, 1, 6);
    std::mt19937_64 rng(777);
    for (int iter = 0; iter < 100; ++iter) {
        FFPoly u = random_fq_poly(f.get(), 1 + rng() % 5, rng);
        FFPoly v = random_fq_poly(f.get(), 1 + rng() % 5, rng);
        FFElement a = random_element(f.get(), rng);
        CHECK(q_associate_eval(u + v, a) ==
              q_associate_eval(u, a) + q_associate_eval(v, a));
        CHECK(q_associate_eval(u * v, a) ==
              q_associate_eval(u, q_associate_eval(v, a)));
        // F_q-linearity
        std::vector<uint64_t> cs(f->e);
        for (auto& c : cs) c = rng() % f->p;
        FFElement s = subfield_element(f.get(), cs);
        CHECK(q_associate_eval(u, s * a) == s * q_associate_eval(u, a));
    }
}

TEST_CASE("the conjugate-coefficient polynomial of alpha behaves") {
    auto f = make_field(2, 2, 3); // F_64 over F_4, n = 3
    // subfield alpha: all conjugates coincide
    for (const auto& a : all_elements(f)) {
        if (!a.in_subfield() || a.is_zero()) continue;
        FFPoly g = g_alpha(a);
        REQUIRE(g.deg() == 2);
        for (int i = 0; i <= 2; ++i) CHECK(g.coeff(i) == a);
    }
    CHECK(g_alpha(FFElement::zero(f.get())).is_zero());

    // g_{alpha^q}(x) = x * g_alpha(x) mod x^n - 1
    auto f16 = make_field(2, 1, 4);
    auto xn1 = FFPoly::x_pow_minus_one(f16.get(), 4);
    for (const auto& a : all_elements(f16)) {
        FFPoly lhs = g_alpha(a.frob_q());
        FFPoly rhs = (FFPoly::x(f16.get()) * g_alpha(a)) % xn1;
        CHECK(lhs == rhs);
    }
}

TEST_CASE("k-normality of distinguished elements") {
    // root of the quartic used as a defining modulus: exactly 2-normal
    auto f5 = make_field(5, 1, 4, 1, std::vector<uint64_t>{2, 4, 4, 0, 1});
    auto x = FFElement::from_index(f5.get(), mpz_class(5));
    CHECK(k_normality(x) == 2);
    CHECK(fq_order(x).k == 2);
    CHECK(fq_order(x).order_poly.deg() == 2);

    // alpha = 1 has F_q-order x - 1, so k = n - 1 (when p does not divide n)
    for (auto f : {make_field(2, 1, 3), make_field(3, 1, 4), make_field(5, 1, 4)}) {
        auto one = FFElement::one(f.get());
        CHECK(k_normality(one) == f->n - 1);
        auto r = fq_order(one);
        CHECK(r.order_poly == FFPoly::x(f.get()) - FFPoly::one(f.get()));
        CHECK(r.k == f->n - 1);
    }

    // alpha = 0
    auto f = make_field(3, 1, 4);
    CHECK(k_normality(FFElement::zero(f.get())) == 4);
    auto r0 = fq_order(FFElement::zero(f.get()));
    CHECK(r0.order_poly == FFPoly::one(f.get()));
    CHECK(r0.k == 4);
}

TEST_CASE("order degree and gcd degree agree everywhere") {
    for (auto f : {make_field(2, 1, 6), make_field(3, 1, 4)}) {
        for (const auto& a : all_elements(f)) {
            auto r = fq_order(a);
            CHECK(r.k == k_normality(a));
            CHECK(r.k == f->n - static_cast<unsigned>(r.order_poly.deg()));
            CHECK(q_associate_eval(r.order_poly, a).is_zero());
        }
    }
    // seeded random samples in a larger field
    auto f = make_field(3, 1, 6);
    std::mt19937_64 rng(20260816);
    for (int i = 0; i < 200; ++i) {
        FFElement a = random_element(f.get(), rng);
        CHECK(fq_order(a).k == k_normality(a));
    }
}

TEST_CASE("kernels of q-associates have exactly q^deg elements") {
    for (auto f : {make_field(2, 1, 6), make_field(3, 1, 4), make_field(2, 2, 3),
                   make_field(3, 2, 2), make_field(3, 1, 8)}) {
        auto el = all_elements(f);
        for (const auto& g : divisors_of(factor_xn_minus_1(f.get()))) {
            mpz_class expect;
            mpz_pow_ui(expect.get_mpz_t(), f->q.get_mpz_t(),
                       static_cast<unsigned>(g.deg()));
            uint64_t count = 0;
            for (const auto& a : el)
                if (q_associate_eval(g, a).is_zero()) ++count;
            CHECK(count == expect);
            // basis spans the same kernel
            auto basis = linearized_kernel_basis(g);
            CHECK(basis.size() == f->e * static_cast<unsigned>(g.deg()));
            auto span = kernel_elements(g);
            CHECK(mpz_class(span.size()) == expect);
            std::set<mpz_class> distinct;
            for (const auto& a : span) {
                distinct.insert(a.index());
                CHECK(q_associate_eval(g, a).is_zero());
            }
            CHECK(distinct.size() == span.size());
        }
    }
}

TEST_CASE("freeness ignores multiplicity") {
    // x^4 - 1 = (x+1)^4 over F_2
    auto f = make_field(2, 1, 4);
    auto xp1 = lift_fp_poly(f.get(), {1, 1});
    auto pow2 = xp1 * xp1;
    auto pow3 = pow2 * xp1;
    for (const auto& a : all_elements(f)) {
        bool base = is_poly_free(a, xp1);
        CHECK(is_poly_free(a, pow2) == base);
        CHECK(is_poly_free(a, pow3) == base);
    }
    // x^6 - 1 = (x-1)^3 (x+1)^3 over F_3
    auto f3 = make_field(3, 1, 6);
    const auto& fac = factor_xn_minus_1(f3.get());
    REQUIRE(fac.factors.size() == 2);
    auto el3 = all_elements(f3);
    for (unsigned e1 = 0; e1 <= 3; ++e1)
        for (unsigned e2 = 0; e2 <= 3; ++e2) {
            if (!e1 && !e2) continue;
            auto g = sub_factored(fac, {e1, e2}).poly;
            auto g0 = sub_factored(fac, {e1 ? 1u : 0u, e2 ? 1u : 0u}).poly;
            for (const auto& a : el3)
                CHECK(is_poly_free(a, g) == is_poly_free(a, g0));
        }
}

TEST_CASE("kernel test for freeness matches the definitional brute force") {
    auto f = make_field(2, 1, 4);
    auto el = all_elements(f);
    auto divs = divisors_of(factor_xn_minus_1(f.get()));
    for (const auto& M : divs) {
        for (const auto& a : el) {
            // brute force: a is M-free unless a = L_h(beta) for some monic
            // divisor h != 1 of M
            bool brute = true;
            for (const auto& h : divs) {
                if (h.deg() < 1 || !(M % h).is_zero()) continue;
                for (const auto& b : el)
                    if (q_associate_eval(h, b) == a) {
                        brute = false;
                        break;
                    }
                if (!brute) break;
            }
            CHECK(is_poly_free(a, M) == brute);
        }
    }
}

TEST_CASE("normal elements are exactly the full-modulus-free ones") {
    auto f = make_field(2, 1, 4);
    auto xn1 = FFPoly::x_pow_minus_one(f.get(), 4);
    unsigned normals = 0;
    for (const auto& a : all_elements(f)) {
        bool free_full = is_poly_free(a, xn1);
        CHECK(free_full == (k_normality(a) == 0));
        if (free_full) ++normals;
    }
    CHECK(normals == 8); // Phi_2((x+1)^4) = 2^4 - 2^3
}

TEST_CASE("freeness argument validation") {
    auto f = make_field(2, 1, 4);
    auto a = FFElement::from_index(f.get(), mpz_class(7));
    CHECK(is_poly_free(a, FFPoly::one(f.get())));
    CHECK_THROWS_AS(is_poly_free(a, lift_fp_poly(f.get(), {1, 1, 1})),
                    not_a_divisor);
    CHECK_THROWS_AS(is_poly_free(a, FFPoly::zero(f.get())), not_a_divisor);
    // zero element is never free of anything beyond 1
    CHECK_FALSE(is_poly_free(FFElement::zero(f.get()),
                             lift_fp_poly(f.get(), {1, 1})));
}
