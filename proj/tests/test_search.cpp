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

#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "knforge/search.hpp"

using namespace knf;

namespace {

FFPoly lift_poly(Fld F, const std::vector<uint64_t>& cs) {
    std::vector<FFElement> es;
    es.reserve(cs.size());
    for (auto c : cs) es.push_back(FFElement::from_int(F, c));
    return FFPoly(F, std::move(es));
}

} // namespace

TEST_CASE("normal element search", "[search]") {
    FieldPtr Hp = make_field(2, 1, 2);
    Fld H = Hp.get();
    FFElement w = find_normal(H, SearchStrategy::exhaustive);
    REQUIRE(w.coords() == std::vector<uint64_t>{0, 1});
    REQUIRE(k_normality(w) == 0);
    // the normal elements of F_4 over F_2 are exactly the two outside F_2
    std::set<uint64_t> normal_idx;
    for (uint64_t i = 1; i < 4; ++i)
        if (k_normality(FFElement::from_index(H, i)) == 0) normal_idx.insert(i);
    REQUIRE(normal_idx == std::set<uint64_t>{2, 3});

    FieldPtr Fp = make_field(2, 1, 6);
    Fld F = Fp.get();
    FFPoly xn1 = FFPoly::x_pow_minus_one(F, 6);
    FFElement a = find_normal(F);
    REQUIRE(k_normality(a) == 0);
    REQUIRE(is_poly_free(a, xn1));
    REQUIRE(find_normal(F) == a); // replayable
    FFElement b = find_normal(F, SearchStrategy::exhaustive);
    REQUIRE(k_normality(b) == 0);
    REQUIRE(is_poly_free(b, xn1));

    // census agrees with the closed-form count and the polynomial totient
    uint64_t census = 0;
    for (uint64_t i = 1; i < 64; ++i)
        if (k_normality(FFElement::from_index(F, i)) == 0) ++census;
    REQUIRE(census == 24);
    REQUIRE(count_k_normal(2, 6, 0) == census);
    REQUIRE(phi_q(factor_xn_minus_1(F)) == census);

    REQUIRE_THROWS_AS(find_normal(F, SearchStrategy::seeded_random, 0),
                      bad_input);
    // index 1 is the unit 1, which is not normal, so a budget of one misses
    REQUIRE_THROWS_AS(find_normal(F, SearchStrategy::exhaustive, 1),
                      budget_exhausted);
}

TEST_CASE("k-normal construction", "[search]") {
    FieldPtr Fp = make_field(5, 1, 4);
    Fld F = Fp.get();
    auto one = FFElement::one(F);

    // f = 1 hands back the base normal element unchanged
    FFElement base = construct_k_normal(F, FFPoly::one(F));
    REQUIRE(base == find_normal(F, SearchStrategy::exhaustive));
    REQUIRE(k_normality(base) == 0);

    // f = (x+1)(x+b) with b = 2, the smaller-lift square root of -1
    FFElement b = FFElement::from_int(F, 2);
    FFPoly f(F, {b, b + one, one});
    FFElement beta = construct_k_normal(F, f);
    REQUIRE(k_normality(beta) == 2);
    REQUIRE(beta.frob_q_pow(2) != beta); // not in F_{q^2}

    FieldPtr Gp = make_field(2, 1, 6);
    Fld G = Gp.get();
    FFPoly sq = lift_poly(G, {1, 0, 1}); // (x+1)^2 in characteristic 2
    FFElement gamma = construct_k_normal(G, sq);
    REQUIRE(k_normality(gamma) == 2);
    REQUIRE(fq_order(gamma).k == 2);
    REQUIRE(fq_order(gamma).order_poly.deg() == 4);

    // composition: the f1*f2 construction is L_{f1} of the f2 construction
    FFPoly f1 = lift_poly(G, {1, 1});    // x + 1
    FFPoly f2 = lift_poly(G, {1, 1, 1}); // x^2 + x + 1
    REQUIRE(construct_k_normal(G, f1 * f2) ==
            q_associate_eval(f1, construct_k_normal(G, f2)));
    FieldPtr Pp = make_field(13, 1, 4);
    Fld P = Pp.get();
    FFPoly g1 = lift_poly(P, {12, 1}); // x - 1
    FFPoly g2 = lift_poly(P, {1, 1});  // x + 1
    REQUIRE(construct_k_normal(P, g1 * g2) ==
            q_associate_eval(g1, construct_k_normal(P, g2)));

    REQUIRE_THROWS_AS(construct_k_normal(G, lift_poly(G, {1, 1, 0, 1})),
                      not_a_divisor);
    REQUIRE_THROWS_AS(construct_k_normal(G, FFPoly::zero(G)), not_a_divisor);
}

TEST_CASE("additive orbit test, degree five", "[search]") {
    auto c11 = test_explicit5(11);
    REQUIRE(c11.has_value());
    REQUIRE(c11->k == 2);
    std::string why;
    REQUIRE(verify_certificate(*c11, &why));
    REQUIRE(c11->order == mpz_class(11) * 11 * 11 * 11 * 11 - 1);
    auto again = test_explicit5(11);
    REQUIRE(again.has_value());
    REQUIRE(again->coords == c11->coords); // replayable

    REQUIRE(test_explicit5(31).has_value());

    // the q = 25 and q = 64 orbits miss at the default seed; both claims
    // replay exactly, and for 25 a wider search still finds a witness
    REQUIRE_FALSE(test_explicit5(25).has_value());
    REQUIRE_FALSE(test_explicit5(64).has_value());
    FieldPtr Wp = make_field(5, 2, 5);
    auto wide = search_primitive_k_normal(Wp.get(), 2,
                                          SearchStrategy::seeded_random);
    REQUIRE(wide.has_value());
    REQUIRE(verify_certificate(*wide));

    REQUIRE_THROWS_AS(test_explicit5(7), bad_residue);
    REQUIRE_THROWS_AS(test_explicit5(12), not_prime_power);

    // with beta built from a normal element, at most one shift j breaks
    // 2-normality
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        FieldPtr Fp = make_field(11, 1, 5, seed);
        Fld F = Fp.get();
        FFElement a = find_normal(F);
        FFPoly f = factor_x5_special(F).factors[1];
        FFElement beta = q_associate_eval(f, a);
        unsigned bad = 0;
        for (uint64_t j = 0; j < 11; ++j)
            if (k_normality(beta + FFElement::from_int(F, j)) != 2) ++bad;
        REQUIRE(bad <= 1);
    }
}

TEST_CASE("additive orbit test, degree four", "[search]") {
    // q = 5: the whole image of L_f is primitive-free, so the miss is forced
    {
        FieldPtr Fp = make_field(5, 1, 4);
        Fld F = Fp.get();
        auto one = FFElement::one(F);
        FFElement b = detail::root_of_x2_plus_1(F);
        REQUIRE(subfield_rank(b) == 2);
        FFPoly g(F, {b, -(b + one), one}); // (x-1)(x-b), the complement of f
        auto fac = factor_qn_minus_1(5, 4);
        for (const auto& el : kernel_elements(g)) {
            if (el.is_zero()) continue;
            REQUIRE_FALSE(is_primitive(el, fac));
        }
        REQUIRE_FALSE(test_explicit4(5).has_value());
    }

    auto c29 = test_explicit4(29);
    REQUIRE(c29.has_value());
    REQUIRE(c29->k == 2);
    REQUIRE(verify_certificate(*c29));

    // replayable default-seed verdicts for the small orbit scans
    REQUIRE_FALSE(test_explicit4(13).has_value());
    REQUIRE_FALSE(test_explicit4(13).has_value());
    REQUIRE(test_explicit4(9).has_value());
    REQUIRE(test_explicit4(17).has_value());

    REQUIRE_THROWS_AS(test_explicit4(3), bad_residue);
    REQUIRE_THROWS_AS(test_explicit4(8), bad_residue);
    REQUIRE_THROWS_AS(test_explicit4(15), not_prime_power);
}

TEST_CASE("primitive k-normal scan", "[search]") {
    {
        FieldPtr Fp = make_field(7, 1, 5);
        REQUIRE_THROWS_AS(search_primitive_k_normal(Fp.get(), 2),
                          no_degree_k_divisor);
    }
    {
        FieldPtr Fp = make_field(2, 1, 6);
        Fld F = Fp.get();
        auto cert = search_primitive_k_normal(F, 2);
        REQUIRE(cert.has_value());
        REQUIRE(cert->min_poly == std::vector<uint64_t>{1, 0, 1, 1, 0, 1, 1});
        REQUIRE(verify_certificate(*cert));
        // lowest-index hit of the documented ascending scan
        REQUIRE(cert->coords == FFElement::from_index(F, 34).coords());
        // a budget that ends before the first hit is a hard stop, not "none"
        REQUIRE_THROWS_AS(
            search_primitive_k_normal(F, 2, SearchStrategy::exhaustive, 20),
            budget_exhausted);
        auto three = search_primitive_k_normal(F, 2,
                                               SearchStrategy::exhaustive,
                                               1u << 22, 3);
        REQUIRE(three.has_value());
        REQUIRE(three->coords == cert->coords);
        // only the unit 1 is 5-normal here and it is not primitive
        REQUIRE_FALSE(search_primitive_k_normal(F, 5).has_value());
    }
    {
        // no primitive 2-normal element exists over F_2 at degree 4
        FieldPtr Fp = make_field(2, 1, 4);
        REQUIRE_FALSE(search_primitive_k_normal(Fp.get(), 2).has_value());
        REQUIRE_THROWS_AS(
            search_primitive_k_normal(Fp.get(), 2,
                                      SearchStrategy::exhaustive, 5),
            budget_exhausted);
    }
    {
        FieldPtr Fp = make_field(5, 1, 4);
        Fld F = Fp.get();
        auto one_job = search_primitive_k_normal(F, 2);
        auto four_jobs = search_primitive_k_normal(
            F, 2, SearchStrategy::exhaustive, 1u << 22, 4);
        REQUIRE(one_job.has_value());
        REQUIRE(four_jobs.has_value());
        REQUIRE(one_job->coords == four_jobs->coords);
        auto seeded = search_primitive_k_normal(
            F, 2, SearchStrategy::seeded_random);
        REQUIRE(seeded.has_value());
        REQUIRE(verify_certificate(*seeded));
        REQUIRE(seeded->k == 2);
        auto seeded2 = search_primitive_k_normal(
            F, 2, SearchStrategy::seeded_random);
        REQUIRE(seeded2->coords == seeded->coords);
    }
    {
        // k = 0 asks for a primitive normal element
        FieldPtr Fp = make_field(2, 1, 2);
        auto cert = search_primitive_k_normal(Fp.get(), 0);
        REQUIRE(cert.has_value());
        REQUIRE(cert->k == 0);
        REQUIRE(cert->order == 3);
        REQUIRE(cert->coords == std::vector<uint64_t>{0, 1});
    }
}

TEST_CASE("table witness verification", "[search]") {
    REQUIRE(verify_table_entry(5, 4, {2, 4, 4, 0, 1}));
    REQUIRE(verify_table_entry(13, 4, {11, 6, 8, 11, 1}));
    REQUIRE(verify_table_entry(9, 4, {2, 2, 2, 2, 1, 2, 2, 0, 1}));
    REQUIRE(verify_table_entry(23, 6, {11, 6, 0, 12, 20, 3, 1}));
    REQUIRE(verify_table_entry(
        27, 6, {2, 1, 2, 0, 1, 2, 1, 2, 1, 1, 1, 0, 0, 2, 2, 0, 1, 0, 1}));
    REQUIRE(verify_table_entry(
        64, 5, {1, 1, 0, 1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 0, 1, 0, 1, 0, 0,
                0, 0, 1, 1, 1, 0, 0, 1, 1, 0, 0, 1}));
    // x^6 + x + 1 is primitive over F_2 but its root is not 2-normal
    REQUIRE_FALSE(verify_table_entry(2, 6, {1, 1, 0, 0, 0, 0, 1}));
    // x^4 + 1 splits over F_5
    REQUIRE_THROWS_AS(verify_table_entry(5, 4, {1, 0, 0, 0, 1}), reducible);
    REQUIRE_THROWS_AS(verify_table_entry(5, 4, {2, 4, 4, 1}), bad_input);
}

TEST_CASE("image of L_f is the kernel of its complement", "[search]") {
    FieldPtr Fp = make_field(13, 1, 4);
    Fld F = Fp.get();
    auto one = FFElement::one(F);
    FFElement b = detail::root_of_x2_plus_1(F);
    REQUIRE(subfield_rank(b) == 5);
    FFPoly f(F, {b, b + one, one});
    FFPoly g(F, {b, -(b + one), one});
    REQUIRE(f * g == FFPoly::x_pow_minus_one(F, 4));
    // so L_g(u L_f(alpha) + v) = u L_g(L_f(alpha)) = 0 for any alpha, u, v
    std::mt19937_64 rng(99);
    for (int t = 0; t < 50; ++t) {
        FFElement alpha =
            FFElement::from_index(F, detail::draw_index(rng, F->order));
        REQUIRE(q_associate_eval(g, q_associate_eval(f, alpha)).is_zero());
    }
    // exhaustively over that kernel: primitive implies 2-normal
    auto fac = factor_qn_minus_1(13, 4);
    uint64_t prim = 0;
    for (const auto& el : kernel_elements(g)) {
        if (el.is_zero() || !is_primitive(el, fac)) continue;
        ++prim;
        REQUIRE(k_normality(el) == 2);
    }
    REQUIRE(prim == 32);
}
