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

#include "knforge/gf.hpp"

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

FFPoly random_poly(Fld f, int deg, std::mt19937_64& rng) {
    FFPoly g(f);
    for (int i = 0; i <= deg; ++i) {
        mpz_class idx = mpz_class(rng()) % f->order;
        g.c.push_back(FFElement::from_index(f, idx));
    }
    g.trim();
    return g;
}

} // namespace

TEST_CASE("canonical moduli are the lexicographically first irreducibles") {
    CHECK(make_field(2, 1, 2)->modulus == std::vector<uint64_t>{1, 1, 1});
    CHECK(make_field(3, 1, 2)->modulus == std::vector<uint64_t>{1, 0, 1});
    CHECK(make_field(2, 1, 4)->modulus == std::vector<uint64_t>{1, 1, 0, 0, 1});
    CHECK(make_field(2, 1, 6)->modulus ==
          std::vector<uint64_t>{1, 1, 0, 0, 0, 0, 1});
    // q = 4 realized as degree 4 over F_2
    auto f16 = make_field(2, 2, 2);
    CHECK(f16->d == 4);
    CHECK(f16->modulus == std::vector<uint64_t>{1, 1, 0, 0, 1});
    CHECK(f16->q == 4);
    CHECK(f16->order == 16);
}

TEST_CASE("field axioms hold exhaustively in small fields") {
    for (auto f : {make_field(3, 1, 2), make_field(2, 2, 2)}) {
        auto el = all_elements(f);
        auto one = FFElement::one(f.get());
        auto zero = FFElement::zero(f.get());
        for (const auto& a : el) {
            CHECK(a + zero == a);
            CHECK(a * one == a);
            CHECK(a - a == zero);
            CHECK(a + (-a) == zero);
            if (!a.is_zero()) {
                CHECK(a * a.inverse() == one);
                CHECK(a.pow(f->units) == one);
            }
            CHECK(a.pow(f->order) == a);
        }
        for (const auto& a : el)
            for (const auto& b : el) {
                CHECK(a * b == b * a);
                CHECK(a + b == b + a);
            }
        for (const auto& a : el)
            for (const auto& b : el)
                for (const auto& c : el) {
                    CHECK((a * b) * c == a * (b * c));
                    CHECK(a * (b + c) == a * b + a * c);
                }
    }
}

TEST_CASE("element indices are a bijection onto [0, order)") {
    auto f = make_field(3, 1, 2);
    std::set<mpz_class> seen;
    for (const auto& a : all_elements(f)) seen.insert(a.index());
    CHECK(seen.size() == 9);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 8);
    // round trip
    for (mpz_class i = 0; i < f->order; ++i)
        CHECK(FFElement::from_index(f.get(), i).index() == i);
}

TEST_CASE("Frobenius matrices agree with powering") {
    auto f = make_field(2, 2, 3); // F_64 over F_4, d = 6
    for (const auto& a : all_elements(f)) {
        CHECK(a.frob_p() == a.pow(mpz_class(2)));
        CHECK(a.frob_q() == a.pow(mpz_class(4)));
        CHECK(a.frob_q_pow(f->n) == a);
    }
}

TEST_CASE("subfield membership count equals q and the subfield is closed") {
    struct Case {
        uint64_t p;
        unsigned e, n;
    };
    for (auto cs : {Case{2, 2, 2}, Case{3, 2, 2}, Case{2, 1, 3}, Case{2, 3, 2}}) {
        auto f = make_field(cs.p, cs.e, cs.n);
        std::vector<FFElement> sub;
        for (const auto& a : all_elements(f))
            if (a.in_subfield()) sub.push_back(a);
        CHECK(mpz_class(sub.size()) == f->q);
        for (const auto& a : sub)
            for (const auto& b : sub) {
                CHECK((a + b).in_subfield());
                CHECK((a * b).in_subfield());
            }
        // the generator's powers span exactly this set
        std::set<mpz_class> from_basis, direct;
        for (const auto& a : sub) direct.insert(a.index());
        std::vector<uint64_t> cs_vec(f->e, 0);
        mpz_class total;
        mpz_ui_pow_ui(total.get_mpz_t(), static_cast<unsigned long>(f->p), f->e);
        for (mpz_class i = 0; i < total; ++i) {
            mpz_class t = i;
            for (unsigned j = 0; j < f->e; ++j) {
                cs_vec[j] =
                    mpz_fdiv_ui(t.get_mpz_t(), static_cast<unsigned long>(f->p));
                t /= static_cast<unsigned long>(f->p);
            }
            from_basis.insert(subfield_element(f.get(), cs_vec).index());
        }
        CHECK(from_basis == direct);
    }
}

TEST_CASE("subfield generator satisfies its canonical minimal polynomial") {
    auto f = make_field(2, 3, 2); // F_64 over F_8
    REQUIRE(f->subfield_min_poly.size() == 4);
    auto s = subfield_element(f.get(), {0, 1});
    CHECK(s.in_subfield());
    auto h = lift_fp_poly(f.get(), f->subfield_min_poly);
    CHECK(h.eval(s).is_zero());
    CHECK(minimal_poly_over_Fp(s) == f->subfield_min_poly);

    // e = 1: generator is 1 with minimal polynomial x - 1
    auto g = make_field(5, 1, 2);
    CHECK(subfield_element(g.get(), {1}) == FFElement::one(g.get()));
    CHECK(g->subfield_min_poly == std::vector<uint64_t>{4, 1});
}

TEST_CASE("subfield coordinates round trip and reject outsiders") {
    auto f = make_field(3, 2, 2); // F_81 over F_9
    unsigned in = 0, out = 0;
    for (const auto& a : all_elements(f)) {
        if (a.in_subfield()) {
            auto cs = subfield_coords(a);
            REQUIRE(cs.size() == 2);
            CHECK(subfield_element(f.get(), cs) == a);
            ++in;
        } else {
            CHECK_THROWS_AS(subfield_coords(a), bad_input);
            ++out;
        }
    }
    CHECK(in == 9);
    CHECK(out == 72);
    // subfield_rank is a bijection onto [0, q)
    std::set<mpz_class> ranks;
    for (const auto& a : all_elements(f))
        if (a.in_subfield()) ranks.insert(subfield_rank(a));
    CHECK(ranks.size() == 9);
    CHECK(*ranks.begin() == 0);
    CHECK(*ranks.rbegin() == 8);
}

TEST_CASE("traces have the expected fibers") {
    auto f = make_field(2, 1, 4); // F_16 over F_2
    unsigned zero_fiber = 0;
    for (const auto& a : all_elements(f)) {
        uint64_t t = trace_abs(a);
        CHECK(t < 2);
        if (t == 0) ++zero_fiber;
    }
    CHECK(zero_fiber == 8);

    auto g = make_field(2, 2, 2); // F_16 over F_4
    std::map<mpz_class, unsigned> fiber;
    for (const auto& a : all_elements(g)) {
        auto t = trace_to_Fq(a);
        CHECK(t.in_subfield());
        fiber[t.index()]++;
    }
    REQUIRE(fiber.size() == 4);
    for (const auto& [k, v] : fiber) CHECK(v == 4);

    // additivity
    auto el = all_elements(f);
    for (const auto& a : el)
        for (const auto& b : el)
            CHECK(trace_abs(a + b) == (trace_abs(a) + trace_abs(b)) % 2);
}

TEST_CASE("minimal polynomials over the prime field are correct") {
    auto f = make_field(2, 1, 4);
    auto x = FFElement::from_index(f.get(), mpz_class(2));
    CHECK(minimal_poly_over_Fp(x) == f->modulus);
    CHECK(minimal_poly_over_Fp(FFElement::zero(f.get())) ==
          std::vector<uint64_t>({0, 1}));
    CHECK(minimal_poly_over_Fp(FFElement::one(f.get())) ==
          std::vector<uint64_t>({1, 1}));
    for (const auto& a : all_elements(f)) {
        auto mp = minimal_poly_over_Fp(a);
        unsigned deg = static_cast<unsigned>(mp.size() - 1);
        CHECK(f->d % deg == 0);
        CHECK(lift_fp_poly(f.get(), mp).eval(a).is_zero());
        CHECK(detail::fp_irreducible(mp, f->p));
    }
}

TEST_CASE("construction is deterministic for a fixed seed") {
    auto a = make_field(3, 2, 3, 7);
    auto b = make_field(3, 2, 3, 7);
    CHECK(a->modulus == b->modulus);
    CHECK(a->subfield_min_poly == b->subfield_min_poly);
    CHECK(a->s_powers == b->s_powers);
    CHECK(a->frob_q == b->frob_q);
}

TEST_CASE("supplied moduli are validated") {
    // monic irreducible quartic over F_5, accepted as given
    std::vector<uint64_t> m{2, 4, 4, 0, 1};
    auto f = make_field(5, 1, 4, 1, m);
    CHECK(f->modulus == m);
    CHECK(f->order == 625);
    auto x = FFElement::from_index(f.get(), mpz_class(5));
    CHECK(lift_fp_poly(f.get(), m).eval(x).is_zero());

    CHECK_THROWS_AS(make_field(5, 1, 4, 1, std::vector<uint64_t>{0, 0, 0, 0, 1}),
                    reducible);
    CHECK_THROWS_AS(make_field(5, 1, 4, 1, std::vector<uint64_t>{2, 4, 4, 1}),
                    bad_input);
    CHECK_THROWS_AS(make_field(5, 1, 4, 1, std::vector<uint64_t>{2, 4, 4, 0, 2}),
                    bad_input);
}

TEST_CASE("construction rejects bad parameters") {
    CHECK_THROWS_AS(make_field(4, 1, 2), not_prime_power);
    CHECK_THROWS_AS(make_field(1, 1, 2), not_prime_power);
    CHECK_THROWS_AS(make_field(2147483659ull, 1, 2), bad_input);
    CHECK_THROWS_AS(make_field(2, 0, 2), bad_input);
    CHECK_THROWS_AS(make_field(2, 1, 0), bad_input);
}

TEST_CASE("polynomial division, gcd and powering satisfy their identities") {
    auto f = make_field(3, 1, 2); // F_9
    std::mt19937_64 rng(987654321);
    for (int iter = 0; iter < 200; ++iter) {
        FFPoly a = random_poly(f.get(), 1 + int(rng() % 6), rng);
        FFPoly b = random_poly(f.get(), 1 + int(rng() % 4), rng);
        if (b.is_zero()) continue;
        auto [q, r] = a.divmod(b);
        CHECK(q * b + r == a);
        CHECK(r.deg() < b.deg());
    }
    for (int iter = 0; iter < 50; ++iter) {
        FFPoly g = random_poly(f.get(), 1 + int(rng() % 3), rng);
        FFPoly u = random_poly(f.get(), 1 + int(rng() % 3), rng);
        FFPoly v = random_poly(f.get(), 1 + int(rng() % 3), rng);
        if (g.is_zero() || u.is_zero() || v.is_zero()) continue;
        FFPoly d = poly_gcd(g * u, g * v);
        // g divides gcd(gu, gv) always
        CHECK((d % g.monic()).is_zero());
        if (!d.is_zero()) CHECK(d.c.back() == FFElement::one(f.get()));
    }
    // powmod against naive repeated multiplication
    FFPoly m = random_poly(f.get(), 5, rng);
    while (m.deg() < 5) m = random_poly(f.get(), 5, rng);
    FFPoly base = random_poly(f.get(), 3, rng);
    FFPoly naive = FFPoly::one(f.get());
    for (int k = 0; k <= 20; ++k) {
        CHECK(poly_powmod(base, mpz_class(k), m) == naive);
        naive = (naive * base) % m;
    }
    CHECK_THROWS_AS(FFPoly::one(f.get()).divmod(FFPoly::zero(f.get())), bad_input);
}

TEST_CASE("binomial helpers and coefficient-field checks behave") {
    auto f = make_field(2, 2, 3); // F_64 over F_4
    auto t = FFPoly::x_pow_minus_one(f.get(), 3);
    CHECK(t.deg() == 3);
    CHECK(t.eval(FFElement::one(f.get())).is_zero());
    CHECK(is_fq_poly(t));

    FFPoly bad(f.get());
    // pick an element outside F_4 as a coefficient
    FFElement outsider = FFElement::zero(f.get());
    for (const auto& a : all_elements(f))
        if (!a.in_subfield()) {
            outsider = a;
            break;
        }
    bad.c = {outsider, FFElement::one(f.get())};
    CHECK_FALSE(is_fq_poly(bad));
    CHECK_THROWS_AS(fq_poly_checked(bad), bad_input);
    CHECK(&fq_poly_checked(t) == &t);

    // deterministic ordering key
    auto x2 = FFPoly::x(f.get()) * FFPoly::x(f.get());
    auto x2p1 = x2 + FFPoly::one(f.get());
    CHECK(x2.key_less(x2p1));
    CHECK_FALSE(x2p1.key_less(x2));
    CHECK(FFPoly::x(f.get()).key_less(x2));
}
