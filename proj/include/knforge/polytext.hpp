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

// Text form for univariate polynomials with integer coefficients, e.g.
// "x^4 + 4*x^2 + 4x + 2 over GF(5)".  The "* " between coefficient and x is
// optional, terms may repeat and appear in any order, and the "over GF(q)"
// suffix is optional.

#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "knforge/errors.hpp"

namespace knf {

struct PolyText {
    std::vector<int64_t> coeffs;   // ascending, as written (not reduced)
    std::optional<mpz_class> base; // q from an "over GF(q)" suffix
};

namespace detail {

inline void skip_ws(const std::string& s, size_t& i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
        ++i;
}

inline int64_t parse_uint_text(const std::string& s, size_t& i,
                               const char* what) {
    size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        ++i;
    if (i == start) throw bad_input(std::string("expected ") + what +
                                    " in polynomial text");
    if (i - start > 18) throw bad_input(std::string(what) + " too large");
    return std::stoll(s.substr(start, i - start));
}

} // namespace detail

// reduce the written coefficients into F_p residues; degree is kept as
// written, so a zero leading term is rejected rather than trimmed
inline std::vector<uint64_t> poly_text_mod_p(const PolyText& pt, uint64_t p) {
    if (p < 2) throw bad_input("characteristic must be at least 2");
    std::vector<uint64_t> out(pt.coeffs.size());
    for (size_t i = 0; i < pt.coeffs.size(); ++i) {
        int64_t r = pt.coeffs[i] % static_cast<int64_t>(p);
        if (r < 0) r += static_cast<int64_t>(p);
        out[i] = static_cast<uint64_t>(r);
    }
    if (!out.empty() && out.back() == 0)
        throw bad_input("leading coefficient vanishes mod p");
    return out;
}

inline PolyText parse_poly_text(const std::string& text) {
    PolyText pt;
    std::string body = text;

    size_t over = body.find(" over ");
    if (over != std::string::npos) {
        std::string tail = body.substr(over + 6);
        body = body.substr(0, over);
        size_t i = 0;
        detail::skip_ws(tail, i);
        if (tail.compare(i, 3, "GF(") == 0 || tail.compare(i, 3, "gf(") == 0)
            i += 3;
        else
            throw bad_input("expected GF(q) after 'over'");
        detail::skip_ws(tail, i);
        int64_t q = detail::parse_uint_text(tail, i, "field size");
        detail::skip_ws(tail, i);
        if (i >= tail.size() || tail[i] != ')')
            throw bad_input("unterminated GF(...) suffix");
        ++i;
        detail::skip_ws(tail, i);
        if (i != tail.size()) throw bad_input("trailing text after GF(q)");
        pt.base = mpz_class(static_cast<unsigned long>(q));
    }

    std::vector<std::pair<unsigned, int64_t>> terms;
    size_t i = 0;
    detail::skip_ws(body, i);
    if (i == body.size()) throw bad_input("empty polynomial text");
    bool first = true;
    while (i < body.size()) {
        int sign = 1;
        if (body[i] == '+' || body[i] == '-') {
            sign = body[i] == '-' ? -1 : 1;
            ++i;
            detail::skip_ws(body, i);
        } else if (!first) {
            throw bad_input("expected + or - between terms");
        }
        first = false;

        int64_t coeff = 1;
        bool saw_coeff = false;
        if (i < body.size() &&
            std::isdigit(static_cast<unsigned char>(body[i]))) {
            coeff = detail::parse_uint_text(body, i, "coefficient");
            saw_coeff = true;
            detail::skip_ws(body, i);
            if (i < body.size() && body[i] == '*') {
                ++i;
                detail::skip_ws(body, i);
            }
        }
        unsigned exp = 0;
        if (i < body.size() && (body[i] == 'x' || body[i] == 'X')) {
            ++i;
            exp = 1;
            detail::skip_ws(body, i);
            if (i < body.size() && body[i] == '^') {
                ++i;
                detail::skip_ws(body, i);
                int64_t e = detail::parse_uint_text(body, i, "exponent");
                if (e > 1 << 20) throw bad_input("exponent out of range");
                exp = static_cast<unsigned>(e);
            }
        } else if (!saw_coeff) {
            throw bad_input("expected a term in polynomial text");
        }
        terms.emplace_back(exp, sign * coeff);
        detail::skip_ws(body, i);
    }

    unsigned deg = 0;
    for (const auto& [e, c] : terms) deg = std::max(deg, e);
    pt.coeffs.assign(deg + 1, 0);
    for (const auto& [e, c] : terms) pt.coeffs[e] += c;
    return pt;
}

} // namespace knf
