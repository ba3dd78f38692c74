#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zpdyn/errors.hpp"

// Fixed-precision p-adic integers.
//
// A value is its first N base-p digits, stored little-endian:
//   x = d[0] + d[1]*p + ... + d[N-1]*p^(N-1)   (mod p^N).
// All arithmetic is exact modulo p^N. Mixing operands with different p or
// different N is a caller bug and throws; there is no implicit rescaling.

namespace zpdyn {

using u64 = std::uint64_t;
using i64 = std::int64_t;

bool is_prime(u64 n);

// A checked prime modulus. Constructing one from a composite throws, so
// downstream code can take the primality of `Prime::v` for granted.
struct Prime {
    int v;
    explicit Prime(int p);
    operator int() const { return v; }
};

// p^e with an overflow check (throws precondition_error past 2^63).
u64 pow_u64(int p, int e);

// Largest modulus exponent m such that p^m < 2^31. Evaluation works modulo
// p^m with plain 64-bit arithmetic only below this bound.
int max_mod_exp(int p);

// Digit k of a plain nonnegative integer, base p.
int digit_of(u64 value, int k, int p);

// A residue class: `value` modulo p^level.
struct Residue {
    u64 value;
    int level;
};

class PadicInt {
public:
    PadicInt(Prime p, int precision); // zero with N digits
    static PadicInt from_integer(i64 v, Prime p, int precision);
    static PadicInt from_digits(Prime p, std::vector<int> digits);

    int prime() const { return p_; }
    int precision() const { return static_cast<int>(d_.size()); }
    int digit(int i) const;
    const std::vector<int>& digits() const { return d_; }

    PadicInt add(const PadicInt& o) const;
    PadicInt neg() const;
    PadicInt sub(const PadicInt& o) const { return add(o.neg()); }
    PadicInt mul(const PadicInt& o) const;

    // Index of the first nonzero digit; returns precision() when every
    // stored digit is zero, meaning "valuation >= N".
    int valuation() const;
    bool is_zero() const { return valuation() == precision(); }

    // sum_{j<k} d[j] p^j, i.e. the value mod p^k. Requires k <= precision()
    // and p^k to fit in 64 bits.
    u64 value_mod(int k) const;
    Residue reduce(int k) const;

    // Canonical text form "d0,d1,...,dN-1 (base p)" and its inverse.
    std::string str() const;
    static PadicInt parse(const std::string& s);

    bool operator==(const PadicInt& o) const { return p_ == o.p_ && d_ == o.d_; }

private:
    int p_;
    std::vector<int> d_;
    void check_same_shape(const PadicInt& o) const;
};

// Inverse of u modulo p (p prime, u not divisible by p; throws otherwise).
u64 inv_mod_p(u64 u, Prime p);

} // namespace zpdyn
