#pragma once

#include <string>
#include <vector>

#include "zpdyn/padic.hpp"

// Permutations of {0, ..., p-1}. Small, value-semantic, validated on
// construction. Composition is right-to-left everywhere in this library:
// compose(g, f) applies f first.

namespace zpdyn {

using CycleType = std::vector<int>; // cycle lengths, descending, summing to p

class PermP {
public:
    PermP(Prime p, std::vector<int> images); // throws unless a bijection
    static PermP identity(Prime p);
    static PermP shift(Prime p, int a); // x -> x + a mod p

    int p() const { return p_; }
    int operator()(int x) const { return img_[static_cast<size_t>(x)]; }
    const std::vector<int>& images() const { return img_; }

    PermP inverse() const;
    PermP pow(i64 n) const; // negative n uses the inverse
    u64 order() const;
    bool is_transitive() const; // one p-cycle
    CycleType cycle_type() const;
    PermP conjugate_by(const PermP& g) const; // g o this o g^-1

    std::string cycle_string() const; // "(0 1 2)(3)(4)"

    bool operator==(const PermP& o) const { return p_ == o.p_ && img_ == o.img_; }

private:
    int p_;
    std::vector<int> img_;
};

// (g o f)(x) = g(f(x)); the right factor acts first.
PermP compose(const PermP& g, const PermP& f);

} // namespace zpdyn
