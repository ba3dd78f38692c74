#pragma once

#include <string>
#include <utility>
#include <vector>

#include "zpdyn/func.hpp"

// Ground truth by exhaustion on finite residue rings. Everything here is
// deliberately independent of the criteria module: bijectivity is checked
// by materializing the reduced map, transitivity by walking the orbit of 0
// through that table. The criteria must match this, never the other way
// around.

namespace zpdyn::oracle {

// Default exhaustive-check ceiling on the modulus exponent. Override only
// with force=true (a warning is printed); the cost is p^m evaluations.
int depth_ceiling(int p);

struct Bijectivity {
    bool bijective;
    u64 x1, x2; // witness pair with f(x1) = f(x2) mod p^m, when not bijective
};
Bijectivity is_bijective_mod(const CompatibleFn& f, int m, bool force = false);

struct SingleCycle {
    bool bijective;
    u64 x1, x2;    // collision witness when not bijective
    bool single;   // false whenever not bijective
    u64 orbit_len; // length of the orbit of 0 (when bijective)
};
SingleCycle is_single_cycle_mod(const CompatibleFn& f, int m, bool force = false);

// Multiset of cycle lengths of f mod p^m, descending. Throws if the
// reduced map is not bijective (cycle structure is undefined then).
std::vector<u64> cycle_structure_mod(const CompatibleFn& f, int m, bool force = false);

struct CrossRow {
    std::string id;
    int level;          // digit level k; the oracle ran mod p^(k+1)
    bool criterion;     // general ergodicity criterion, holds through k
    bool oracle_single; // reduced map is a single p^(k+1)-cycle
    bool agree;
    double ms;          // wall time spent on this corpus member (same on all its rows)
};
struct CrossReport {
    std::vector<CrossRow> rows;
    bool all_agree;
    double total_ms;
};

// Run the general criterion and the exhaustive oracle side by side on every
// corpus member, levels 0..K. Members are independent and are processed in
// parallel; row order is still deterministic (corpus order, then level).
CrossReport cross_validate(const std::vector<std::pair<std::string, CompatibleFn>>& corpus, int K,
                           bool force = false);

std::string cross_to_csv(const CrossReport& r);

} // namespace zpdyn::oracle
