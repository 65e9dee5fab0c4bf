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
#include <cmath>
#include <complex>
#include <string>
#include <thread>

#include <json.hpp>

#include "knforge/linear.hpp"

namespace knf {

// Multiplicative structure: orders, primitivity, m-freeness, k-normal
// counting, the existence predicate, and a character-sum oracle for tiny
// fields.

// ---------------------------------------------------------------------------
// multiplicative order machinery
// ---------------------------------------------------------------------------

namespace detail {

inline void check_units_evidence(const FFElement& a, const FactoredInt& fac) {
    if (!fac.complete)
        throw incomplete_factorization("order evidence must be a complete factorization");
    if (fac.value != a.field().units)
        throw bad_input("factorization evidence is not for q^n - 1");
}

} // namespace detail

// exact multiplicative order by exponent reduction: start from q^n - 1 and
// strip every prime power that keeps alpha at 1
inline mpz_class mult_order(const FFElement& a, const FactoredInt& fac) {
    if (a.is_zero()) throw zero_element("the zero element has no multiplicative order");
    detail::check_units_evidence(a, fac);
    mpz_class ord = fac.value;
    const FFElement one = FFElement::one(a.fld());
    for (const auto& pf : fac.factors) {
        for (unsigned i = 0; i < pf.exp; ++i) {
            if (!mpz_divisible_p(ord.get_mpz_t(), pf.prime.get_mpz_t())) break;
            mpz_class cand = ord / pf.prime;
            if (a.pow(cand) == one)
                ord = cand;
            else
                break;
        }
    }
    return ord;
}

inline bool is_primitive(const FFElement& a, const FactoredInt& fac) {
    if (a.is_zero()) return false;
    detail::check_units_evidence(a, fac);
    const FFElement one = FFElement::one(a.fld());
    for (const auto& pf : fac.factors)
        if (a.pow(fac.value / pf.prime) == one) return false;
    return true;
}

// m-freeness: alpha = beta^d with d | m forces d = 1; equivalently
// alpha^{(q^n-1)/l} != 1 for every prime l | m
inline bool is_m_free(const FFElement& a, const mpz_class& m,
                      const FactoredInt& fac) {
    detail::check_units_evidence(a, fac);
    if (m <= 0 || !mpz_divisible_p(fac.value.get_mpz_t(), m.get_mpz_t()))
        throw not_a_divisor("m does not divide q^n - 1");
    if (a.is_zero()) return m == 1; // 0 = 0^d for every d
    const FFElement one = FFElement::one(a.fld());
    for (const auto& pf : fac.factors) {
        if (!mpz_divisible_p(m.get_mpz_t(), pf.prime.get_mpz_t())) continue;
        if (a.pow(fac.value / pf.prime) == one) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// counting k-normal elements
// ---------------------------------------------------------------------------

// number of k-normal elements of F_{q^n}: sum of Phi_q(h) over monic
// h | x^n - 1 of degree n - k, evaluated by dynamic programming over the
// degree profile (no field construction)
inline mpz_class count_k_normal(const mpz_class& q, unsigned n, unsigned k) {
    if (n == 0) throw bad_input("n must be positive");
    if (k > n) throw bad_input("k must lie in [0, n]");
    auto [p, e] = prime_power_split(q);
    auto shape = xn1_shape(q, p, n);
    const unsigned target = n - k;
    std::vector<mpz_class> dp(target + 1, 0);
    dp[0] = 1;
    for (const auto& [r, cnt] : shape.degree_counts) {
        // precompute per-exponent weights q^{jr} - q^{(j-1)r}
        uint64_t jmax = std::min<uint64_t>(shape.multiplicity, target / r);
        std::vector<mpz_class> weight(jmax + 1, 0);
        for (uint64_t j = 1; j <= jmax; ++j) {
            mpz_class hi, lo;
            mpz_pow_ui(hi.get_mpz_t(), q.get_mpz_t(), j * r);
            mpz_pow_ui(lo.get_mpz_t(), q.get_mpz_t(), (j - 1) * r);
            weight[j] = hi - lo;
        }
        for (uint64_t c = 0; c < cnt; ++c) {
            std::vector<mpz_class> nx(target + 1, 0);
            for (unsigned deg = 0; deg <= target; ++deg) {
                if (dp[deg] == 0) continue;
                nx[deg] += dp[deg];
                for (uint64_t j = 1; j <= jmax; ++j) {
                    uint64_t add = j * r;
                    if (deg + add > target) break;
                    nx[deg + add] += dp[deg] * weight[j];
                }
            }
            dp = std::move(nx);
        }
    }
    return dp[target];
}

// independent oracle: scan every element of the field; workers take strided
// index classes so the partition is deterministic
inline mpz_class brute_force_count(Fld F, unsigned k,
                                   const mpz_class& limit = mpz_class(1) << 20,
                                   unsigned jobs = 1) {
    if (F->order > limit)
        throw range_too_large("field too large for brute-force counting");
    const uint64_t size = F->order.get_ui();
    if (jobs < 2) {
        uint64_t count = 0;
        for (uint64_t i = 0; i < size; ++i)
            if (k_normality(FFElement::from_index(F, mpz_class(i))) == k) ++count;
        return count;
    }
    factor_xn_minus_1(F); // warm the cache before threads share it
    std::vector<uint64_t> partial(jobs, 0);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
            uint64_t c = 0;
            for (uint64_t i = w; i < size; i += jobs)
                if (k_normality(FFElement::from_index(F, mpz_class(i))) == k) ++c;
            partial[w] = c;
        });
    for (auto& t : pool) t.join();
    uint64_t count = 0;
    for (auto c : partial) count += c;
    return count;
}

// ---------------------------------------------------------------------------
// existence of primitive 2-normal elements
// ---------------------------------------------------------------------------

// the closed-form existence predicate: such elements exist exactly when
// n >= 5 and gcd(q^3 - q, n) != 1, or n = 4 and q = 1 mod 4
inline bool exists_primitive_2normal(const mpz_class& q, unsigned n) {
    if (!is_prime_power(q)) throw not_prime_power("q must be a prime power");
    if (n == 0) throw bad_input("n must be positive");
    if (n >= 5) {
        mpz_class w = q * q * q - q, nz(static_cast<unsigned long>(n)), g;
        mpz_gcd(g.get_mpz_t(), w.get_mpz_t(), nz.get_mpz_t());
        return g != 1;
    }
    if (n == 4) return mpz_fdiv_ui(q.get_mpz_t(), 4) == 1;
    return false;
}

// definitional oracle: scan every element and test primitivity plus
// 2-normality; primitivity first because it is the cheaper filter
inline bool brute_force_exists_primitive_2normal(
    Fld F, const FactoredInt& units_fac,
    const mpz_class& limit = mpz_class(1) << 20, unsigned jobs = 1) {
    if (F->order > limit)
        throw range_too_large("field too large for brute-force existence scan");
    const uint64_t size = F->order.get_ui();
    if (jobs < 2) {
        for (uint64_t i = 1; i < size; ++i) {
            FFElement a = FFElement::from_index(F, mpz_class(i));
            if (!is_primitive(a, units_fac)) continue;
            if (k_normality(a) == 2) return true;
        }
        return false;
    }
    factor_xn_minus_1(F); // warm the cache before threads share it
    std::atomic<bool> found{false};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
            for (uint64_t i = 1 + w; i < size; i += jobs) {
                if (found.load(std::memory_order_relaxed)) return;
                FFElement a = FFElement::from_index(F, mpz_class(i));
                if (!is_primitive(a, units_fac)) continue;
                if (k_normality(a) == 2) {
                    found.store(true, std::memory_order_relaxed);
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    return found.load();
}

// ---------------------------------------------------------------------------
// character-sum oracle (tiny fields)
// ---------------------------------------------------------------------------

// Discrete-log table over a field with q^n <= 2^16.  Multiplicative
// characters of order d send g^j to exp(2 pi i j t / d) for gcd(t, d) = 1;
// additive characters are chi_beta(alpha) = exp(2 pi i Tr(beta alpha) / p),
// and chi_beta inherits the F_q-order of beta.
class CharTable {
  public:
    explicit CharTable(Fld F) : F_(F) {
        if (F->order > (1u << 16))
            throw range_too_large("character table limited to q^n <= 2^16");
        size_ = static_cast<uint64_t>(F->order.get_ui());
        units_fac_ = factor_int(F->units);
        elements_.reserve(size_);
        for (uint64_t i = 0; i < size_; ++i)
            elements_.push_back(FFElement::from_index(F, mpz_class(i)));
        // generator: first element in index order that is primitive
        uint64_t gi = 0;
        for (uint64_t i = 1; i < size_; ++i)
            if (is_primitive(elements_[i], units_fac_)) {
                gi = i;
                break;
            }
        if (!gi) throw error("no generator found (internal)");
        gen_ = elements_[gi];
        log_of_index_.assign(size_, -1);
        FFElement cur = FFElement::one(F);
        for (uint64_t j = 0; j + 1 < size_; ++j) {
            log_of_index_[cur.index().get_ui()] = static_cast<int64_t>(j);
            cur = cur * gen_;
        }
        divisors_ = divisors_of(factor_xn_minus_1(F));
        order_class_.assign(size_, 0);
        for (uint64_t i = 0; i < size_; ++i) {
            auto D = fq_order(elements_[i]).order_poly;
            size_t id = 0;
            while (id < divisors_.size() && !(divisors_[id] == D)) ++id;
            order_class_[i] = id;
        }
    }

    Fld field() const { return F_; }
    uint64_t size() const { return size_; }
    const FactoredInt& units_fac() const { return units_fac_; }
    const FFElement& generator() const { return gen_; }
    const std::vector<FFElement>& elements() const { return elements_; }
    const std::vector<FFPoly>& divisors() const { return divisors_; }

    // log of a nonzero element's index
    int64_t log_at(uint64_t index) const { return log_of_index_[index]; }
    size_t order_class_at(uint64_t index) const { return order_class_[index]; }

    size_t divisor_id(const FFPoly& D) const {
        for (size_t i = 0; i < divisors_.size(); ++i)
            if (divisors_[i] == D) return i;
        throw not_a_divisor("polynomial is not a divisor of x^n - 1");
    }

  private:
    Fld F_;
    uint64_t size_ = 0;
    FactoredInt units_fac_;
    FFElement gen_;
    std::vector<FFElement> elements_;
    std::vector<int64_t> log_of_index_;
    std::vector<FFPoly> divisors_;
    std::vector<size_t> order_class_;
};

namespace detail {

// value of the order-d character with parameter t at a field element
inline std::complex<double> mult_char_value(const CharTable& ct, uint64_t d,
                                            uint64_t t, const FFElement& a) {
    if (a.is_zero()) return d == 1 ? 1.0 : 0.0; // eta(0) = 1 only if trivial
    int64_t lg = ct.log_at(a.index().get_ui());
    double ang = 2.0 * M_PI * double((__uint128_t(lg) * t) % d) / double(d);
    return {std::cos(ang), std::sin(ang)};
}

inline std::complex<double> add_char_value(const FFElement& beta,
                                           const FFElement& a) {
    uint64_t t = trace_abs(beta * a);
    double p = double(beta.field().p);
    double ang = 2.0 * M_PI * double(t) / p;
    return {std::cos(ang), std::sin(ang)};
}

} // namespace detail

// w_m(alpha) = theta(m) * sum_{d | m} mu(d)/phi(d) * sum_{eta of order d}
// eta(alpha); equals 1 on m-free elements, theta(m) at 0, else 0
inline std::complex<double> w_m_pointwise(const CharTable& ct,
                                          const mpz_class& m,
                                          const FFElement& a) {
    const mpz_class& units = ct.field()->units;
    if (m <= 0 || !mpz_divisible_p(units.get_mpz_t(), m.get_mpz_t()))
        throw not_a_divisor("m does not divide q^n - 1");
    auto mf = factor_int(m);
    if (!mf.complete) throw incomplete_factorization("m must factor completely");
    std::vector<uint64_t> primes;
    for (const auto& pf : mf.factors) primes.push_back(pf.prime.get_ui());
    double theta = euler_phi(mf).get_d() / m.get_d();
    std::complex<double> acc = 0.0;
    for (uint64_t mask = 0; mask < (1ull << primes.size()); ++mask) {
        uint64_t d = 1;
        double phi_d = 1;
        int mu = 1;
        for (size_t i = 0; i < primes.size(); ++i)
            if (mask & (1ull << i)) {
                d *= primes[i];
                phi_d *= double(primes[i] - 1);
                mu = -mu;
            }
        std::complex<double> inner = 0.0;
        for (uint64_t t = 1; t <= d; ++t) {
            if (std::gcd(t, d) != 1) continue;
            inner += detail::mult_char_value(ct, d, t, a);
        }
        acc += (double(mu) / phi_d) * inner;
    }
    return theta * acc;
}

// Omega_T(alpha) = Theta(T) * sum_{D | T} mu_q(D)/Phi_q(D) *
// sum_{beta of F_q-order D} chi_beta(alpha); equals 1 exactly on T-free
// elements
inline std::complex<double> omega_T_pointwise(const CharTable& ct,
                                              const FFPoly& T,
                                              const FFElement& a) {
    Fld F = ct.field();
    fq_poly_checked(T);
    FFPoly xn1 = FFPoly::x_pow_minus_one(F, F->n);
    if (T.is_zero() || !(xn1 % T).is_zero())
        throw not_a_divisor("T does not divide x^n - 1");
    const auto& fac = factor_xn_minus_1(F);
    // exponents of T against the factor base
    std::vector<unsigned> exps(fac.factors.size(), 0);
    {
        FFPoly rest = T.monic();
        for (size_t i = 0; i < fac.factors.size(); ++i) {
            while (rest.deg() > 0) {
                auto [quo, rem] = rest.divmod(fac.factors[i].first);
                if (!rem.is_zero()) break;
                ++exps[i];
                rest = quo;
            }
        }
    }
    const mpz_class& q = F->q;
    // Theta(T) = Phi_q(T) / q^{deg T}
    double theta;
    {
        FactoredPoly tf;
        tf.poly = T.monic();
        for (size_t i = 0; i < exps.size(); ++i)
            if (exps[i]) tf.factors.emplace_back(fac.factors[i].first, exps[i]);
        mpz_class denom;
        mpz_pow_ui(denom.get_mpz_t(), q.get_mpz_t(),
                   static_cast<unsigned>(T.deg()));
        theta = phi_q(tf).get_d() / denom.get_d();
    }
    // squarefree divisors D | T: subsets of the distinct factors of T
    std::vector<size_t> present;
    for (size_t i = 0; i < exps.size(); ++i)
        if (exps[i]) present.push_back(i);
    std::complex<double> acc = 0.0;
    for (uint64_t mask = 0; mask < (1ull << present.size()); ++mask) {
        FFPoly D = FFPoly::one(F);
        int mu = 1;
        mpz_class phi_D = 1;
        for (size_t i = 0; i < present.size(); ++i)
            if (mask & (1ull << i)) {
                const FFPoly& h = fac.factors[present[i]].first;
                D = D * h;
                mu = -mu;
                mpz_class t;
                mpz_pow_ui(t.get_mpz_t(), q.get_mpz_t(),
                           static_cast<unsigned>(h.deg()));
                phi_D *= t - 1;
            }
        size_t id = ct.divisor_id(D);
        std::complex<double> inner = 0.0;
        for (uint64_t i = 0; i < ct.size(); ++i) {
            if (ct.order_class_at(i) != id) continue;
            inner += detail::add_char_value(ct.elements()[i], a);
        }
        acc += (double(mu) / phi_D.get_d()) * inner;
    }
    return theta * acc;
}

// max over characters eta of order exactly d and chi of F_q-order exactly D
// of |sum_alpha eta(L_f(alpha)) chi(alpha)|
inline double char_sum_oracle(const CharTable& ct, const mpz_class& d,
                              const FFPoly& D, const FFPoly& f) {
    Fld F = ct.field();
    const mpz_class& units = F->units;
    if (d <= 0 || !mpz_divisible_p(units.get_mpz_t(), d.get_mpz_t()))
        throw not_a_divisor("d does not divide q^n - 1");
    if (D.is_zero()) throw not_a_divisor("zero polynomial is not a divisor");
    size_t class_id = ct.divisor_id(D.monic());
    uint64_t du = d.get_ui();
    const uint64_t size = ct.size();
    const double p = double(F->p);
    // logs of L_f at every element (-1 where L_f vanishes)
    std::vector<int64_t> lf_log(size);
    for (uint64_t i = 0; i < size; ++i) {
        FFElement v = q_associate_eval(f, ct.elements()[i]);
        lf_log[i] = v.is_zero() ? -1 : ct.log_at(v.index().get_ui());
    }
    double best = 0.0;
    std::vector<uint64_t> tr(size);
    for (uint64_t bi = 0; bi < size; ++bi) {
        if (ct.order_class_at(bi) != class_id) continue;
        const FFElement& beta = ct.elements()[bi];
        for (uint64_t i = 0; i < size; ++i)
            tr[i] = trace_abs(beta * ct.elements()[i]);
        for (uint64_t t = 1; t <= du; ++t) {
            if (std::gcd(t, du) != 1) continue;
            std::complex<double> s = 0.0;
            for (uint64_t i = 0; i < size; ++i) {
                if (lf_log[i] < 0) {
                    // eta(0) = 1 only for the trivial character
                    if (du != 1) continue;
                    double ang = 2.0 * M_PI * double(tr[i]) / p;
                    s += std::complex<double>(std::cos(ang), std::sin(ang));
                    continue;
                }
                uint64_t r = (__uint128_t(uint64_t(lf_log[i])) * t) % du;
                double ang =
                    2.0 * M_PI * (double(r) / double(du) + double(tr[i]) / p);
                s += std::complex<double>(std::cos(ang), std::sin(ang));
            }
            best = std::max(best, std::abs(s));
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// certificates
// ---------------------------------------------------------------------------

// Self-contained evidence that a specific element of a specific field
// realization has the claimed multiplicative order and k-normality.  The
// factorization of q^n - 1 is embedded so verification never refactors.
struct Certificate {
    uint64_t p = 0;
    unsigned e = 0, n = 0;
    std::vector<uint64_t> modulus;  // defining polynomial over F_p, ascending
    std::vector<uint64_t> coords;   // element coordinates in the power basis
    std::vector<uint64_t> min_poly; // minimal polynomial of the element over F_p
    mpz_class order;                // claimed multiplicative order
    unsigned k = 0;                 // claimed k-normality
    FactoredInt units_fac;          // factorization of q^n - 1
    std::vector<std::string> checks_passed;
};

inline Certificate make_certificate(const FFElement& a,
                                    const FactoredInt& units_fac) {
    if (a.is_zero()) throw zero_element("cannot certify the zero element");
    detail::check_units_evidence(a, units_fac);
    const FieldCtx& F = a.field();
    Certificate c;
    c.p = F.p;
    c.e = F.e;
    c.n = F.n;
    c.modulus = F.modulus;
    c.coords = a.coords();
    c.min_poly = minimal_poly_over_Fp(a);
    c.order = mult_order(a, units_fac);
    c.k = k_normality(a);
    c.units_fac = units_fac;
    c.checks_passed = {"modulus-irreducible", "element-nonzero",
                       "factorization-complete", "order-exact", "k-normality"};
    if (c.order == F.units) c.checks_passed.push_back("primitive");
    return c;
}

// re-run every check from the certificate data alone
inline bool verify_certificate(const Certificate& c, std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    FieldPtr F;
    try {
        F = make_field(c.p, c.e, c.n, 1, c.modulus);
    } catch (const error& e) {
        return fail(std::string("field reconstruction failed: ") + e.what());
    }
    if (c.coords.size() != F->d) return fail("coordinate vector has wrong length");
    for (auto v : c.coords)
        if (v >= c.p) return fail("coordinate out of range");
    FFElement a(F.get(), c.coords);
    if (a.is_zero()) return fail("certified element is zero");
    if (minimal_poly_over_Fp(a) != c.min_poly)
        return fail("minimal polynomial mismatch");
    // factorization evidence
    if (!c.units_fac.complete) return fail("factorization evidence incomplete");
    if (c.units_fac.value != F->units)
        return fail("factorization is not of q^n - 1");
    mpz_class prod = 1;
    for (const auto& pf : c.units_fac.factors) {
        if (classify_prime(pf.prime) == Primality::composite)
            return fail("claimed prime factor is composite");
        mpz_class pp;
        mpz_pow_ui(pp.get_mpz_t(), pf.prime.get_mpz_t(), pf.exp);
        prod *= pp;
    }
    if (prod != F->units) return fail("factor product does not equal q^n - 1");
    // order: alpha^order = 1 and alpha^{order/l} != 1 for every prime l | order
    if (c.order <= 0 || !mpz_divisible_p(F->units.get_mpz_t(), c.order.get_mpz_t()))
        return fail("claimed order does not divide q^n - 1");
    const FFElement one = FFElement::one(F.get());
    if (a.pow(c.order) != one) return fail("element does not reach 1 at claimed order");
    for (const auto& pf : c.units_fac.factors) {
        if (!mpz_divisible_p(c.order.get_mpz_t(), pf.prime.get_mpz_t())) continue;
        if (a.pow(c.order / pf.prime) == one)
            return fail("claimed order is not minimal");
    }
    if (k_normality(a) != c.k) return fail("k-normality mismatch");
    if (why) why->clear();
    return true;
}

inline std::string certificate_to_json(const Certificate& c) {
    nlohmann::json j;
    j["schema"] = "knforge.certificate.v1";
    j["p"] = c.p;
    j["e"] = c.e;
    j["n"] = c.n;
    j["modulus"] = c.modulus;
    j["coords"] = c.coords;
    j["min_poly"] = c.min_poly;
    j["order"] = c.order.get_str();
    j["k"] = c.k;
    j["units"] = c.units_fac.value.get_str();
    nlohmann::json fl = nlohmann::json::array();
    for (const auto& pf : c.units_fac.factors) {
        nlohmann::json e;
        e["prime"] = pf.prime.get_str();
        e["exp"] = pf.exp;
        e["certified"] = pf.certified;
        fl.push_back(e);
    }
    j["units_factorization"] = fl;
    j["checks"] = c.checks_passed;
    return j.dump(2) + "\n";
}

inline Certificate certificate_from_json(const std::string& text) {
    Certificate c;
    try {
        auto j = nlohmann::json::parse(text);
        if (j.value("schema", "") != "knforge.certificate.v1")
            throw bad_input("unknown certificate schema");
        c.p = j.at("p").get<uint64_t>();
        c.e = j.at("e").get<unsigned>();
        c.n = j.at("n").get<unsigned>();
        c.modulus = j.at("modulus").get<std::vector<uint64_t>>();
        c.coords = j.at("coords").get<std::vector<uint64_t>>();
        c.min_poly = j.at("min_poly").get<std::vector<uint64_t>>();
        c.order = mpz_class(j.at("order").get<std::string>());
        c.k = j.at("k").get<unsigned>();
        c.units_fac.value = mpz_class(j.at("units").get<std::string>());
        c.units_fac.complete = true;
        for (const auto& e : j.at("units_factorization")) {
            PrimeFactor pf;
            pf.prime = mpz_class(e.at("prime").get<std::string>());
            pf.exp = e.at("exp").get<unsigned>();
            pf.certified = e.at("certified").get<bool>();
            c.units_fac.factors.push_back(pf);
        }
        if (j.contains("checks"))
            c.checks_passed = j.at("checks").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw bad_input(std::string("malformed certificate JSON: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw bad_input("malformed big integer in certificate JSON");
    }
    return c;
}

} // namespace knf
