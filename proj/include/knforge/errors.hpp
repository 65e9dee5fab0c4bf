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

#include <stdexcept>
#include <string>

namespace knf {

/* Error taxonomy shared by the whole library.  Every condition that a caller
 * can reasonably probe for gets its own type; the CLI maps them to exit
 * codes. */

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// q (or p) is not a prime power / not prime where one is required
struct not_prime_power : error {
    using error::error;
};

// a sieve or enumeration request exceeds the configured limit
struct range_too_large : error {
    using error::error;
};

// an operation needed a fully factored integer but got a partial one
struct incomplete_factorization : error {
    using error::error;
};

// a polynomial expected to be irreducible is not
struct reducible : error {
    using error::error;
};

// an operation on x^n - 1 required gcd(n, q) = 1
struct p_not_coprime : error {
    using error::error;
};

// a bounded search ran out of attempts without an answer
struct budget_exhausted : error {
    using error::error;
};

// a required root does not exist in the field at hand
struct no_root : error {
    using error::error;
};

// a polynomial argument was required to divide x^n - 1 but does not
struct not_a_divisor : error {
    using error::error;
};

// the zero element was passed where a unit is required
struct zero_element : error {
    using error::error;
};

// malformed input (parser failures, out-of-range coefficients, ...)
struct bad_input : error {
    using error::error;
};

// a sieve criterion needs gcd((x^n - 1)/f, T) != 1 and the given f, T fail it
struct precondition_gcd : error {
    using error::error;
};

// a threshold formula's exponent denominator is <= 0, so no bound exists
struct exponent_nonpositive : error {
    using error::error;
};

// q lies in a residue class the requested criterion does not cover
struct bad_residue : error {
    using error::error;
};

// an iterated threshold chain was asked for a stage it does not define
struct stage_unknown : error {
    using error::error;
};

// x^n - 1 has no divisor of the requested degree, so no k-normal element
struct no_degree_k_divisor : error {
    using error::error;
};

} // namespace knf
