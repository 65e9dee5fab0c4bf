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

#include <random>
#include <sstream>

#include "knforge/numth.hpp"

using namespace knf;

// independent trial-division oracle, deliberately naive
static std::vector<std::pair<uint64_t, unsigned>> oracle_factor(uint64_t n) {
    std::vector<std::pair<uint64_t, unsigned>> out;
    for (uint64_t d = 2; d * d <= n; ++d) {
        unsigned e = 0;
        while (n % d == 0) n /= d, ++e;
        if (e) out.emplace_back(d, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

static bool matches_oracle(uint64_t n) {
    auto got = factor_u64(n);
    auto want = oracle_factor(n);
    if (!got.complete || got.factors.size() != want.size()) return false;
    for (size_t i = 0; i < want.size(); ++i) {
        if (got.factors[i].prime != mpz_class(static_cast<unsigned long>(want[i].first)))
            return false;
        if (got.factors[i].exp != want[i].second) return false;
        if (!got.factors[i].certified) return false;
    }
    return true;
}

TEST_CASE("factor_int matches trial-division oracle", "[numth]") {
    for (uint64_t n = 1; n <= 20000; ++n) REQUIRE(matches_oracle(n));
    std::mt19937_64 gen(12345); // fixed seed

    for (int i = 0; i < 2000; ++i) {
        uint64_t n = gen() % 1000000000ull + 2;
        REQUIRE(matches_oracle(n));
    }
}

TEST_CASE("factor_int recovers structured big values", "[numth]") {
    // 2^64 - 1 = 3 * 5 * 17 * 257 * 641 * 65537 * 6700417
    mpz_class v;
    mpz_ui_pow_ui(v.get_mpz_t(), 2, 64);
    v -= 1;
    auto f = factor_int(v);
    REQUIRE(f.complete);
    std::vector<unsigned long> want = {3, 5, 17, 257, 641, 65537, 6700417};
    REQUIRE(f.factors.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i) {
        REQUIRE(f.factors[i].prime == mpz_class(want[i]));
        REQUIRE(f.factors[i].exp == 1u);
    }

    // 27^7 - 1 = 2 * 13 * 1093 * 368089
    mpz_class w;
    mpz_ui_pow_ui(w.get_mpz_t(), 27, 7);
    w -= 1;
    auto g = factor_int(w);
    REQUIRE(g.complete);
    REQUIRE(g.factors.size() == 4);
    REQUIRE(g.factors[0].prime == 2);
    REQUIRE(g.factors[1].prime == 13);
    REQUIRE(g.factors[2].prime == 1093);
    REQUIRE(g.factors[3].prime == 368089);
    mpz_class back = 1;
    for (auto& pf : g.factors)
        for (unsigned i = 0; i < pf.exp; ++i) back *= pf.prime;
    REQUIRE(back == w);
}

TEST_CASE("euler_phi and moebius match sieve oracles", "[numth]") {
    const int N = 10000;
    std::vector<int> phi(N + 1), mu(N + 1, 1);
    for (int i = 0; i <= N; ++i) phi[i] = i;
    std::vector<bool> comp(N + 1, false);
    for (int p = 2; p <= N; ++p) {
        if (comp[p]) continue;
        for (int j = p; j <= N; j += p) {
            if (j > p) comp[j] = true;
            phi[j] -= phi[j] / p;
            mu[j] = (j / p) % p == 0 ? 0 : -mu[j];
        }
    }
    for (int n = 1; n <= N; ++n) {
        auto f = factor_u64(n);
        REQUIRE(euler_phi(f) == phi[n]);
        REQUIRE(moebius(f) == mu[n]);
    }
    // sum over divisors of phi(d) = n, spot checks
    for (int n : {1, 12, 360, 9973, 4096}) {
        mpz_class s = 0;
        for (int d = 1; d <= n; ++d)
            if (n % d == 0) s += euler_phi(factor_u64(d));
        REQUIRE(s == n);
    }
}

TEST_CASE("w_int and rad_int", "[numth]") {
    auto f = factor_u64(360); // 2^3 * 3^2 * 5
    REQUIRE(w_int(f) == 8);
    REQUIRE(rad_int(f) == 30);
    REQUIRE(w_int(factor_u64(1)) == 1);
    REQUIRE(rad_int(factor_u64(1)) == 1);
}

TEST_CASE("primality classification and the certainty flag", "[numth]") {
    REQUIRE(classify_prime(mpz_class(2)) == Primality::certified_prime);
    REQUIRE(classify_prime(mpz_class(1)) == Primality::composite);
    mpz_class m61;
    mpz_ui_pow_ui(m61.get_mpz_t(), 2, 61);
    m61 -= 1;
    REQUIRE(classify_prime(m61) == Primality::certified_prime);
    // 2^89-1 is prime but sits above the deterministic-base bound
    mpz_class m89;
    mpz_ui_pow_ui(m89.get_mpz_t(), 2, 89);
    m89 -= 1;
    REQUIRE(classify_prime(m89) == Primality::probable_prime);
    auto f = factor_int(m89);
    REQUIRE(f.complete);
    REQUIRE(f.factors.size() == 1);
    REQUIRE_FALSE(f.factors[0].certified);
    REQUIRE_FALSE(f.all_certified());
}

TEST_CASE("prime power split", "[numth]") {
    auto [p, e] = prime_power_split(mpz_class(78125));
    REQUIRE(p == 5);
    REQUIRE(e == 7u);
    auto [p2, e2] = prime_power_split(mpz_class(2));
    REQUIRE(p2 == 2);
    REQUIRE(e2 == 1u);
    auto [p3, e3] = prime_power_split(mpz_class(729));
    REQUIRE(p3 == 3);
    REQUIRE(e3 == 6u);
    REQUIRE_THROWS_AS(prime_power_split(mpz_class(12)), not_prime_power);
    REQUIRE_THROWS_AS(prime_power_split(mpz_class(1)), not_prime_power);
    REQUIRE(is_prime_power(mpz_class(1024)));
    REQUIRE_FALSE(is_prime_power(mpz_class(1000)));
}

TEST_CASE("primes_in_range and range_stats", "[numth]") {
    // pi(2^16) = 6542 and pi(64) = 18 are classical anchor values
    auto below = primes_in_range(1.5, 65536.0);
    REQUIRE(below.size() == 6542);
    auto mid = primes_in_range(64.0, 65536.0);
    REQUIRE(mid.size() == 6542 - 18);
    REQUIRE(mid.front() == 67);
    REQUIRE(mid.back() == 65521);

    auto st = range_stats(6.0, 10.0);
    REQUIRE(st.count == 6524);
    // upward-rounded sum stays above the plain double sum and under the
    // published ceiling
    long double plain = 0;
    for (uint64_t p : mid) plain += 1.0L / p;
    REQUIRE(st.inv_sum >= double(plain) * (1 - 1e-12));
    REQUIRE(st.inv_sum < 0.95397);
    REQUIRE(st.inv_sum > 0.95);

    REQUIRE_THROWS_AS(primes_in_range(2.0, 1e9), range_too_large);
}

TEST_CASE("class_prime_prefix picks the right classes", "[numth]") {
    auto c6 = class_prime_prefix(6, 1, 5);
    REQUIRE(c6.primes == std::vector<uint64_t>{7, 13, 19, 31, 37});
    auto two = class_prime_prefix(6, 1, 2);
    REQUIRE(two.inv_sum == mpq_class(20, 91));
    REQUIRE(two.product == 91);

    auto c4 = class_prime_prefix(4, 1, 4);
    REQUIRE(c4.primes == std::vector<uint64_t>{5, 13, 17, 29});

    auto c5 = class_prime_prefix(5, 1, 3);
    REQUIRE(c5.primes == std::vector<uint64_t>{11, 31, 41});

    auto gt = class_prime_prefix(1, 5, 4);
    REQUIRE(gt.primes == std::vector<uint64_t>{7, 11, 13, 17});
    REQUIRE(gt.product == 7 * 11 * 13 * 17);

    auto none = class_prime_prefix(4, 1, 0);
    REQUIRE(none.primes.empty());
    REQUIRE(none.product == 1);
    REQUIRE(none.inv_sum == 0);
}

TEST_CASE("hints are parsed and re-verified", "[numth]") {
    std::istringstream in(
        "# comment line\n"
        "91: 7 13\n"
        "1000003: 1000003\n"
        "100000001			: 17 5882353\n"
        "burp\n"
        "15: 4 5 7\n"); // 4 is not prime, 7 does not divide; both must be dropped
    auto hints = parse_hints(in);
    REQUIRE(hints.size() == 4);
    REQUIRE(hints.at("91").size() == 2);

    FactorOptions opt;
    opt.hints = &hints;
    auto f = factor_int(mpz_class(91), opt);
    REQUIRE(f.complete);
    REQUIRE(f.factors.size() == 2);

    auto g = factor_int(mpz_class(15), opt);
    REQUIRE(g.complete); // bad hints ignored, normal path still factors
    REQUIRE(g.factors.size() == 2);
    REQUIRE(g.factors[0].prime == 3);
    REQUIRE(g.factors[1].prime == 5);
}

TEST_CASE("rho budget exhaustion is reported, hints rescue it", "[numth]") {
    // product of two 31-bit primes; with a crippled budget and no trial range
    // the composite must survive and be reported as incomplete
    mpz_class a(2147483647), b(2147483629); // both prime
    mpz_class n = a * b;
    FactorOptions tiny;
    tiny.trial_limit = 3;
    tiny.rho_budget = 0;
    auto f = factor_int(n, tiny);
    REQUIRE_FALSE(f.complete);
    REQUIRE(f.cofactor() == n);
    REQUIRE_THROWS_AS(euler_phi(f), incomplete_factorization);

    FactorHints h;
    h[n.get_str()] = {a};
    tiny.hints = &h;
    auto g = factor_int(n, tiny);
    REQUIRE(g.complete);
    REQUIRE(g.factors.size() == 2);
    REQUIRE(g.factors[0].prime == b);
    REQUIRE(g.factors[1].prime == a);
}
