#pragma once

#include <stdexcept>
#include <string>

namespace zpdyn {

// Base for everything this library throws on purpose. The CLI maps the
// subtypes to distinct exit codes, so keep the hierarchy flat and explicit.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller broke a contract: mismatched primes/precision, depth out of range,
// non-transitive target permutation, and the like.
struct precondition_error : error {
    using error::error;
};

// Bad textual input (expression grammar, digit strings, JSON shapes).
struct parse_error : error {
    using error::error;
};

// A special-form checker was handed a function that is not of its form.
// Carries the first offending (level, prefix, digit) triple in the message.
struct form_mismatch : error {
    using error::error;
};

// The special-form criteria are proved for odd p only.
struct unsupported_prime : error {
    using error::error;
};

// Claimed derivative does not satisfy the differentiability relation.
struct diff_mismatch : error {
    using error::error;
};

// An evaluator turned out not to be 1-Lipschitz where the math requires it
// (e.g. a van der Put coefficient not divisible by the required power of p).
struct compatibility_error : error {
    compatibility_error(const std::string& msg, unsigned long long witness)
        : error(msg), witness_index(witness) {}
    unsigned long long witness_index;
};

} // namespace zpdyn
