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

// knforge: decide, certify, and search for primitive k-normal elements of
// F_{q^n} over F_q.  All results go to stdout as JSON; diagnostics go to
// stderr.  Exit codes: 0 success, 1 nothing found (or a verification or
// replay failure), 2 input error, 3 incomplete factorization.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "knforge/bounds.hpp"
#include "knforge/polytext.hpp"
#include "knforge/search.hpp"

using namespace knf;
using nlohmann::json;

#ifndef KNFORGE_DATA_DIR
#define KNFORGE_DATA_DIR "data"
#endif

namespace {

FactorHints g_hints;
FactorOptions g_opt;

void load_env_hints() {
    const char* path = std::getenv("KNFORGE_HINTS");
    if (!path || !*path) return;
    g_hints = load_hints_file(path);
    g_opt.hints = &g_hints;
    std::cerr << "loaded " << g_hints.size() << " factorization hints from "
              << path << "\n";
}

struct SplitQ {
    mpz_class q;
    uint64_t p;
    unsigned e;
};

SplitQ split_q(const std::string& text) {
    mpz_class q;
    if (q.set_str(text, 10) != 0 || q < 2)
        throw bad_input("q must be a decimal integer >= 2");
    auto [p, e] = prime_power_split(q);
    if (p >= mpz_class(1) << 31)
        throw bad_input("characteristic too large (p < 2^31)");
    SplitQ s;
    s.q = q;
    s.p = p.get_ui();
    s.e = e;
    return s;
}

FFPoly lift_from_text(Fld F, const std::string& text, const char* what) {
    PolyText pt = parse_poly_text(text);
    if (pt.base && *pt.base != F->q)
        throw bad_input(std::string(what) +
                        ": GF(q) suffix disagrees with the field");
    std::vector<uint64_t> cs = poly_text_mod_p(pt, F->p);
    std::vector<FFElement> es;
    es.reserve(cs.size());
    for (uint64_t c : cs) es.push_back(FFElement::from_int(F, c));
    return FFPoly(F, std::move(es));
}

std::string data_dir_default() {
    const char* env = std::getenv("KNFORGE_DATA");
    if (env && *env) return env;
    return KNFORGE_DATA_DIR;
}

json load_table(const std::string& dir, const std::string& name) {
    static const std::map<std::string, std::string> files = {
        {"Especificq23", "witnesses_q2_q3.json"},
        {"Especificq48", "witnesses_q4_q8.json"},
        {"Especificq919", "witnesses_q9_q19.json"},
        {"n=6_1", "witnesses_n6_a.json"},
        {"n=6_3", "witnesses_n6_b.json"},
        {"n6q23", "witnesses_n6_c.json"},
        {"n=4", "witnesses_n4.json"},
        {"n=5", "witness_n5_q64.json"},
        {"satisfiedA", "thresholds_min_n.json"},
        {"satisfiedB", "basic_condition_failures.json"},
        {"M_t", "mt_values.json"},
        {"constants", "analytic_constants.json"},
    };
    auto it = files.find(name);
    if (it == files.end()) {
        std::string known;
        for (const auto& [k, v] : files) known += (known.empty() ? "" : ", ") + k;
        throw bad_input("unknown table '" + name + "' (known: " + known + ")");
    }
    std::ifstream in(dir + "/" + it->second);
    if (!in) throw bad_input("cannot open " + dir + "/" + it->second);
    return json::parse(in);
}

mpz_class parse_mpz(const std::string& s, const char* what) {
    mpz_class v;
    if (v.set_str(s, 10) != 0)
        throw bad_input(std::string(what) + ": not a decimal integer");
    return v;
}

mpq_class mpq_from_decimal(const std::string& s) {
    if (s.find('/') != std::string::npos) {
        mpq_class v;
        if (v.set_str(s, 10) != 0) throw bad_input("bad rational: " + s);
        v.canonicalize();
        return v;
    }
    size_t dot = s.find('.');
    if (dot == std::string::npos)
        return mpq_class(parse_mpz(s, "bound"));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    mpz_class den(1);
    for (size_t i = 0; i < s.size() - dot - 1; ++i) den *= 10;
    return mpq_class(parse_mpz(digits, "bound"), den);
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int run_exists(const std::string& q_text, unsigned n) {
    SplitQ s = split_q(q_text);
    bool verdict = exists_primitive_2normal(s.q, n);

    std::string reason;
    if (n < 4) {
        reason = "no primitive 2-normal element exists for n < 4";
    } else if (n == 4) {
        reason = verdict ? "n = 4 with q = 1 (mod 4)"
                         : "n = 4 requires q = 1 (mod 4)";
    } else {
        mpz_class w = s.q * s.q * s.q - s.q, g;
        mpz_class nz(static_cast<unsigned long>(n));
        mpz_gcd(g.get_mpz_t(), w.get_mpz_t(), nz.get_mpz_t());
        reason = verdict ? "n >= 5 with gcd(q^3 - q, n) = " + g.get_str()
                         : "gcd(q^3 - q, n) = 1";
    }

    json out;
    out["op"] = "exists";
    out["q"] = s.q.get_str();
    out["n"] = n;
    out["exists"] = verdict;
    out["reason"] = reason;
    out["brute_force"] = nullptr;

    mpz_class order;
    mpz_pow_ui(order.get_mpz_t(), s.q.get_mpz_t(), n);
    if (order <= mpz_class(1) << 20) {
        FieldPtr F = make_field(s.p, s.e, n);
        FactoredInt fac = factor_qn_minus_1(s.q, n, g_opt);
        bool brute = brute_force_exists_primitive_2normal(F.get(), fac);
        out["brute_force"] = brute;
        if (brute != verdict)
            std::cerr << "warning: brute force disagrees with the "
                         "closed-form verdict\n";
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_bounds(const std::string& q_text, unsigned n, unsigned k,
               const std::string& m_text, const std::string& T_text,
               const std::string& f_text, bool scripted, double t_flag) {
    SplitQ s = split_q(q_text);
    mpz_class m = m_text.empty() ? mpz_class(0)
                             : parse_mpz(m_text, "--m");

    if (scripted) {
        if (m == 0) m = 1;
        bool verdict = test_delta(s.q, n, m, g_opt);
        json out;
        out["op"] = "test_delta";
        out["q"] = s.q.get_str();
        out["n"] = n;
        out["m"] = m.get_str();
        out["verdict"] = verdict;
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    SieveReport rep;
    if (m_text.empty() && T_text.empty()) {
        rep = basic_condition(s.q, n, k, g_opt);
    } else {
        FieldPtr Fp = make_field(s.p, s.e, n);
        Fld F = Fp.get();
        if (m == 0) m = factor_qn_minus_1(s.q, n, g_opt).value;
        FFPoly T = T_text.empty() ? FFPoly::x_pow_minus_one(F, n)
                                  : lift_from_text(F, T_text, "--T");
        FFPoly f = f_text.empty() ? default_degree_k_divisor(F, k, T)
                                  : lift_from_text(F, f_text, "--f");
        rep = sieve_delta(F, k, m, T, f, g_opt);
    }
    if (t_flag > 0) rep.t_choice = t_flag;
    std::cout << sieve_report_line(rep) << "\n";
    return 0;
}

int run_search(const std::string& q_text, unsigned n, unsigned k,
               const std::string& strategy, uint64_t budget, uint64_t seed,
               unsigned jobs, const std::string& modulus_text) {
    SplitQ s = split_q(q_text);
    std::optional<std::vector<uint64_t>> modulus;
    if (!modulus_text.empty())
        modulus = poly_text_mod_p(parse_poly_text(modulus_text), s.p);
    FieldPtr Fp = make_field(s.p, s.e, n, seed, modulus);

    SearchStrategy st;
    if (strategy == "exhaustive") st = SearchStrategy::exhaustive;
    else if (strategy == "seeded") st = SearchStrategy::seeded_random;
    else throw bad_input("strategy must be 'exhaustive' or 'seeded'");

    try {
        auto cert = search_primitive_k_normal(Fp.get(), k, st, budget, jobs,
                                              g_opt);
        if (cert) {
            std::cout << certificate_to_json(*cert);
            return 0;
        }
        json out;
        out["op"] = "search";
        out["result"] = "none";
        out["scan"] = "complete";
        std::cout << out.dump(2) << "\n";
        return 1;
    } catch (const budget_exhausted& e) {
        json out;
        out["op"] = "search";
        out["result"] = "budget_exhausted";
        out["detail"] = e.what();
        std::cout << out.dump(2) << "\n";
        return 1;
    }
}

int run_count(const std::string& q_text, unsigned n, unsigned k, bool brute) {
    SplitQ s = split_q(q_text);
    json out;
    out["op"] = "count";
    out["q"] = s.q.get_str();
    out["n"] = n;
    out["k"] = k;
    out["count"] = count_k_normal(s.q, n, k).get_str();
    if (brute) {
        FieldPtr F = make_field(s.p, s.e, n);
        out["brute_force"] = brute_force_count(F.get(), k).get_str();
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_verify(const std::string& cert_path, const std::string& witness_text,
               const std::string& q_text, unsigned n) {
    json out;
    out["op"] = "verify";
    bool ok = false;
    if (!cert_path.empty()) {
        std::string text;
        if (cert_path == "-") {
            std::ostringstream ss;
            ss << std::cin.rdbuf();
            text = ss.str();
        } else {
            std::ifstream in(cert_path);
            if (!in) throw bad_input("cannot open " + cert_path);
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        Certificate c = certificate_from_json(text);
        std::string why;
        ok = verify_certificate(c, &why);
        out["mode"] = "certificate";
        out["verified"] = ok;
        out["why"] = why;
    } else {
        if (witness_text.empty())
            throw bad_input("verify needs --cert or --witness-poly");
        if (q_text.empty() || n == 0)
            throw bad_input("--witness-poly needs q and n");
        SplitQ s = split_q(q_text);
        PolyText pt = parse_poly_text(witness_text);
        if (pt.base && *pt.base != s.q)
            throw bad_input("GF(q) suffix disagrees with q argument");
        std::vector<uint64_t> g = poly_text_mod_p(pt, s.p);
        ok = verify_table_entry(s.q, n, g, g_opt);
        out["mode"] = "witness";
        out["q"] = s.q.get_str();
        out["n"] = n;
        out["verified"] = ok;
    }
    std::cout << out.dump(2) << "\n";
    return ok ? 0 : 1;
}

// --- replay ----------------------------------------------------------------

int replay_witness(const json& tab) {
    int passed = 0, total = 0;
    for (const auto& row : tab.at("rows")) {
        mpz_class q(row.at("q").get<uint64_t>());
        unsigned n = row.at("n").get<unsigned>();
        auto g = row.at("g").get<std::vector<uint64_t>>();
        bool ok = verify_table_entry(q, n, g, g_opt);
        ++total;
        passed += ok;
        json line;
        line["q"] = q.get_str();
        line["n"] = n;
        line["pass"] = ok;
        std::cout << line.dump() << "\n";
    }
    std::cerr << passed << "/" << total << " rows pass\n";
    return passed == total ? 0 : 1;
}

int replay_min_n(const json& tab) {
    double t = tab.at("t").get<double>();
    int passed = 0, total = 0;
    for (const auto& row : tab.at("rows")) {
        mpz_class q(row.at("q").get<uint64_t>());
        WPolyBound wb = w_xn_bound(q);
        uint64_t min_n = condition_b_min_n(q, t);
        bool ok = wb.a == row.at("a").get<unsigned>() &&
                  wb.b == row.at("b").get<unsigned>() &&
                  min_n == row.at("min_n").get<uint64_t>();
        ++total;
        passed += ok;
        json line;
        line["q"] = q.get_str();
        line["a"] = wb.a;
        line["b"] = wb.b;
        line["min_n"] = min_n;
        line["pass"] = ok;
        std::cout << line.dump() << "\n";
    }
    std::cerr << passed << "/" << total << " thresholds match\n";
    return passed == total ? 0 : 1;
}

int replay_basic_failures(const json& tab) {
    int passed = 0, total = 0;
    for (const auto& row : tab.at("rows")) {
        mpz_class q(row.at("q").get<uint64_t>());
        unsigned lo = row.at("n_lo").get<unsigned>();
        unsigned hi = row.at("n_hi").get<unsigned>();
        auto expect = row.at("fail_n").get<std::set<unsigned>>();
        mpz_class w = q * q * q - q;
        std::set<unsigned> got;
        for (unsigned n = lo; n <= hi; ++n) {
            mpz_class g, nz(n);
            mpz_gcd(g.get_mpz_t(), w.get_mpz_t(), nz.get_mpz_t());
            if (g == 1) continue;
            if (!basic_condition(q, n, 2, g_opt).verdict) got.insert(n);
        }
        bool ok = got == expect;
        ++total;
        passed += ok;
        json line;
        line["q"] = q.get_str();
        line["fail_n"] = got;
        line["pass"] = ok;
        std::cout << line.dump() << "\n";
    }
    std::cerr << passed << "/" << total << " rows match\n";
    return passed == total ? 0 : 1;
}

int replay_mt(const json& tab) {
    int passed = 0, total = 0;
    for (const auto& row : tab.at("rows")) {
        unsigned n = row.at("n").get<unsigned>();
        double t = row.at("t").get<double>();
        mpz_class got = m_t(n, t);
        bool ok = got == mpz_class(row.at("value").get<uint64_t>());
        ++total;
        passed += ok;
        json line;
        line["n"] = n;
        line["t"] = t;
        line["value"] = got.get_str();
        line["pass"] = ok;
        std::cout << line.dump() << "\n";
    }
    std::cerr << passed << "/" << total << " match\n";
    return passed == total ? 0 : 1;
}

int replay_constants(const json& tab) {
    int passed = 0, total = 0;
    for (const auto& row : tab.at("rows")) {
        std::string op = row.at("op").get<std::string>();
        const auto& args = row.at("args");
        mpq_class val;
        if (op == "n6_threshold") {
            val = n6_threshold();
        } else if (op == "n5_threshold") {
            val = n5_threshold(args.at(0).get<int>(),
                               args.at(1).get<unsigned>());
        } else if (op == "n4_threshold") {
            val = n4_threshold(args.at(0).get<unsigned>());
        } else if (op == "range_count") {
            val = static_cast<unsigned long>(
                range_stats(args.at(0).get<double>(),
                            args.at(1).get<double>()).count);
        } else if (op == "range_sum") {
            val = mpq_class(range_stats(args.at(0).get<double>(),
                                        args.at(1).get<double>()).inv_sum);
        } else if (op == "class_sum") {
            val = class_prime_prefix(args.at(0).get<uint64_t>(),
                                     args.at(1).get<uint64_t>(),
                                     args.at(2).get<size_t>()).inv_sum;
        } else if (op == "class_cutoff") {
            mpz_class M = parse_mpz(row.at("M").get<std::string>(), "M");
            val = static_cast<unsigned long>(class_prime_cutoff(
                args.at(0).get<uint64_t>(), args.at(1).get<uint64_t>(),
                mpz_class(args.at(2).get<long>()), M * M + 1));
        } else if (op == "a_range") {
            std::vector<KnownPrimePower> inc;
            if (row.contains("include"))
                for (const auto& pe : row.at("include"))
                    inc.push_back({pe.at(0).get<uint64_t>(),
                                   pe.at(1).get<unsigned>()});
            val = mpq_class(a_t_range(args.at(0).get<double>(),
                                      args.at(1).get<double>(), inc));
        } else {
            throw bad_input("unknown constant op '" + op + "'");
        }

        bool ok = true;
        auto rel = [&](const char* key, auto cmp) {
            if (row.contains(key))
                ok = ok && cmp(val, mpq_from_decimal(
                                        row.at(key).get<std::string>()));
        };
        rel("eq", [](const mpq_class& a, const mpq_class& b) { return a == b; });
        rel("high", [](const mpq_class& a, const mpq_class& b) { return a <= b; });
        rel("high_strict",
            [](const mpq_class& a, const mpq_class& b) { return a < b; });
        rel("low", [](const mpq_class& a, const mpq_class& b) { return a >= b; });
        rel("low_strict",
            [](const mpq_class& a, const mpq_class& b) { return a > b; });

        ++total;
        passed += ok;
        json line;
        line["id"] = row.at("id").get<std::string>();
        line["value"] = val.get_str();
        line["pass"] = ok;
        std::cout << line.dump() << "\n";
    }
    std::cerr << passed << "/" << total << " constants hold\n";
    return passed == total ? 0 : 1;
}

int run_replay(const std::string& table, const std::string& dir) {
    json tab = load_table(dir, table);
    std::string kind = tab.at("kind").get<std::string>();
    int rc;
    if (kind == "witness") rc = replay_witness(tab);
    else if (kind == "min_n") rc = replay_min_n(tab);
    else if (kind == "basic_failures") rc = replay_basic_failures(tab);
    else if (kind == "mt") rc = replay_mt(tab);
    else if (kind == "constants") rc = replay_constants(tab);
    else throw bad_input("table kind '" + kind + "' not recognized");
    return rc;
}

// --- sweep -------------------------------------------------------------

struct SweepFlags {
    std::string op;
    uint64_t qmin = 2, qmax = 0;
    uint64_t mod = 0, residue = 0;
    unsigned n = 0;
    std::string m_text;
    std::string list_text;
    uint64_t seed = 1;
    unsigned jobs = 1;
    bool failures_only = false;
    bool summary_only = false;
};

int run_sweep(const SweepFlags& fl) {
    if (fl.qmax < 2) throw bad_input("sweep needs --qmax >= 2");

    std::vector<uint64_t> keep;
    if (!fl.list_text.empty()) {
        std::stringstream ss(fl.list_text);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) keep.push_back(std::stoull(item));
    }

    std::vector<uint64_t> qs;
    for (uint64_t q : prime_powers_upto(fl.qmax)) {
        if (q < fl.qmin) continue;
        if (fl.mod && q % fl.mod != fl.residue) continue;
        if ((fl.op == "test-list" || fl.op == "explicit4") && q % 4 != 1)
            continue;
        if (fl.op == "explicit5") {
            uint64_t r = q % 5;
            if (r != 0 && r != 1 && r != 4) continue;
        }
        qs.push_back(q);
    }

    if (fl.op == "basic" || fl.op == "test-delta") {
        if (fl.n == 0) throw bad_input("--n is required for this sweep op");
    }
    if (fl.op == "test-delta" && fl.m_text.empty())
        throw bad_input("--m is required for test-delta sweeps");
    mpz_class m =
        fl.m_text.empty() ? mpz_class(1) : parse_mpz(fl.m_text, "--m");

    // failure means: criterion verdict false, or no element found
    auto one = [&](uint64_t q, std::string& line) -> bool {
        mpz_class qz(q);
        json j;
        j["q"] = q;
        bool fail;
        if (fl.op == "basic") {
            SieveReport rep = basic_condition(qz, fl.n, 2, g_opt);
            line = sieve_report_line(rep);
            return !rep.verdict;
        } else if (fl.op == "test-delta") {
            bool v = test_delta(qz, fl.n, m, g_opt);
            j["n"] = fl.n;
            j["m"] = m.get_str();
            j["verdict"] = v;
            fail = !v;
        } else if (fl.op == "test-list") {
            bool v = test_list(qz, keep, g_opt);
            j["pass"] = v;
            fail = !v;
        } else if (fl.op == "explicit4") {
            auto c = test_explicit4(qz, fl.seed, g_opt);
            j["found"] = c.has_value();
            fail = !c.has_value();
        } else if (fl.op == "explicit5") {
            auto c = test_explicit5(qz, fl.seed, g_opt);
            j["found"] = c.has_value();
            fail = !c.has_value();
        } else {
            throw bad_input("unknown sweep op '" + fl.op + "'");
        }
        line = j.dump();
        return fail;
    };

    std::vector<std::string> lines(qs.size());
    std::vector<uint8_t> failed(qs.size(), 0);
    if (fl.jobs <= 1 || qs.size() < 2) {
        for (size_t i = 0; i < qs.size(); ++i)
            failed[i] = one(qs[i], lines[i]);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        unsigned nw = std::min<size_t>(fl.jobs, qs.size());
        for (unsigned w = 0; w < nw; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < qs.size();
                     i = next.fetch_add(1))
                    failed[i] = one(qs[i], lines[i]);
            });
        for (auto& th : pool) th.join();
    }

    uint64_t nfail = 0;
    for (size_t i = 0; i < qs.size(); ++i) {
        if (failed[i]) ++nfail;
        if (fl.summary_only) continue;
        if (fl.failures_only && !failed[i]) continue;
        std::cout << lines[i] << "\n";
    }
    json sum;
    sum["op"] = "sweep";
    sum["sweep_op"] = fl.op;
    sum["scanned"] = qs.size();
    sum["failures"] = nfail;
    std::cout << sum.dump() << "\n";
    std::cerr << "scanned " << qs.size() << ", failures " << nfail << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "knforge: primitive k-normal elements of F_{q^n} over F_q.\n"
        "JSON results on stdout, diagnostics on stderr.  Exit codes:\n"
        "0 success, 1 nothing found / verification failed, 2 input error,\n"
        "3 incomplete factorization.  Set KNFORGE_HINTS to a file of\n"
        "'value: p1 p2 ...' lines to assist large factorizations."};
    app.require_subcommand(1);
    int rc = 0;

    // exists
    std::string x_q;
    unsigned x_n = 0;
    auto* ex = app.add_subcommand(
        "exists", "closed-form existence of a primitive 2-normal element");
    ex->add_option("q", x_q, "field size, a prime power")->required();
    ex->add_option("n", x_n, "extension degree")->required();
    ex->callback([&] { rc = run_exists(x_q, x_n); });

    // bounds
    std::string b_q, b_m, b_T, b_f;
    unsigned b_n = 0, b_k = 2;
    bool b_scripted = false;
    double b_t = 0;
    auto* bo = app.add_subcommand(
        "bounds", "sufficiency criteria: plain, sieved, or scripted check");
    bo->add_option("q", b_q, "field size")->required();
    bo->add_option("n", b_n, "extension degree")->required();
    bo->add_option("--k", b_k, "normality defect (default 2)");
    bo->add_option("--m", b_m, "kept divisor of q^n - 1 (decimal)");
    bo->add_option("--T", b_T, "kept divisor of x^n - 1, e.g. \"x^4 - 1\"");
    bo->add_option("--f", b_f, "intended F_q-order pattern, degree k");
    bo->add_flag("--scripted", b_scripted,
                 "run the fixed k = 2 decision script on (q, n, m)");
    bo->add_option("--t", b_t, "annotate the report with a threshold t");
    bo->callback(
        [&] { rc = run_bounds(b_q, b_n, b_k, b_m, b_T, b_f, b_scripted, b_t); });

    // search
    std::string s_q, s_strategy = "exhaustive", s_modulus;
    unsigned s_n = 0, s_k = 2, s_jobs = 1;
    uint64_t s_budget = uint64_t(1) << 22, s_seed = 1;
    auto* se = app.add_subcommand(
        "search", "find a primitive k-normal element and emit a certificate");
    se->add_option("q", s_q, "field size")->required();
    se->add_option("n", s_n, "extension degree")->required();
    se->add_option("k", s_k, "normality defect")->required();
    se->add_option("--strategy", s_strategy, "exhaustive (default) or seeded");
    se->add_option("--budget", s_budget, "candidates to try");
    se->add_option("--seed", s_seed, "field and sampling seed");
    se->add_option("--jobs", s_jobs, "worker threads for exhaustive scans");
    se->add_option("--modulus", s_modulus,
                   "defining polynomial over F_p (ascending text form)");
    se->callback([&] {
        rc = run_search(s_q, s_n, s_k, s_strategy, s_budget, s_seed, s_jobs,
                        s_modulus);
    });

    // count
    std::string c_q;
    unsigned c_n = 0, c_k = 0;
    bool c_brute = false;
    auto* co = app.add_subcommand(
        "count", "closed-form count of k-normal elements");
    co->add_option("q", c_q, "field size")->required();
    co->add_option("n", c_n, "extension degree")->required();
    co->add_option("k", c_k, "normality defect")->required();
    co->add_flag("--brute", c_brute,
                 "also count by scanning the whole field (small fields)");
    co->callback([&] { rc = run_count(c_q, c_n, c_k, c_brute); });

    // verify
    std::string v_cert, v_witness, v_q;
    unsigned v_n = 0;
    auto* ve = app.add_subcommand(
        "verify", "re-check a certificate file or a witness polynomial");
    ve->add_option("--cert", v_cert, "certificate JSON path, or - for stdin");
    ve->add_option("--witness-poly", v_witness,
                   "witness minimal polynomial over F_p, text form");
    ve->add_option("--q", v_q, "field size (with --witness-poly)");
    ve->add_option("--n", v_n, "extension degree (with --witness-poly)");
    ve->callback([&] { rc = run_verify(v_cert, v_witness, v_q, v_n); });

    // replay
    std::string r_table, r_dir = data_dir_default();
    auto* re = app.add_subcommand(
        "replay", "re-verify a named shipped table row by row");
    re->add_option("--table", r_table, "table name (see data/)")->required();
    re->add_option("--data-dir", r_dir, "directory holding the table files");
    re->callback([&] { rc = run_replay(r_table, r_dir); });

    // sweep
    SweepFlags fl;
    auto* sw = app.add_subcommand(
        "sweep", "run one check over a range of prime powers");
    sw->add_option("--op", fl.op,
                   "basic | test-delta | test-list | explicit4 | explicit5")
        ->required();
    sw->add_option("--qmin", fl.qmin, "smallest q (default 2)");
    sw->add_option("--qmax", fl.qmax, "largest q")->required();
    sw->add_option("--mod", fl.mod, "keep q in a residue class: modulus");
    sw->add_option("--residue", fl.residue, "residue for --mod");
    sw->add_option("--n", fl.n, "extension degree (basic, test-delta)");
    sw->add_option("--m", fl.m_text, "kept divisor of q^n - 1 (test-delta)");
    sw->add_option("--list", fl.list_text,
                   "comma-separated primes kept in m (test-list)");
    sw->add_option("--seed", fl.seed, "seed for explicit4/explicit5");
    sw->add_option("--jobs", fl.jobs, "worker threads");
    sw->add_flag("--failures-only", fl.failures_only,
                 "print only failing rows");
    sw->add_flag("--summary-only", fl.summary_only,
                 "print only the final summary line");
    sw->callback([&] { rc = run_sweep(fl); });

    try {
        load_env_hints();
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const incomplete_factorization& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
