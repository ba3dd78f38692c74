#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "zpdyn/func.hpp"
#include "zpdyn/rng.hpp"

// Constructors: ergodic functions to order, seeded random measure
// preserving functions, and the named special-form families.

namespace zpdyn::builder {

PermP random_perm(Rng& rng, Prime p);
PermP random_cycle(Rng& rng, Prime p); // a uniformly random p-cycle

// Level-k side table for a nonzero prefix. The builder consults this for
// every (k, prefix) with 1 <= k <= K, prefix in [1, p^k); the prefix-0
// slot at each level is what the builder solves for.
using SideTables = std::function<PermP(int k, u64 prefix)>;

// Bottom-up construction: with levels < k frozen, walk the orbit of 0
// under f mod p^k, take G = product of the side tables along that orbit
// (the anchor's own factor excluded), and pin the prefix-0 slot to
// G^-1 o targets[k-1] so the level-k transition product is exactly the
// target. Requires phi0 and every target transitive; the result is an
// ergodic TableFn of depth K.
CompatibleFn build_ergodic(const PermP& phi0, const SideTables& side,
                           const std::vector<PermP>& targets, int K);

// build_ergodic with phi0 = x+1, targets = x+1 and seeded random side
// tables: the CLI default. Same seed, same function, byte for byte.
CompatibleFn build_ergodic_seeded(Prime p, int K, u64 seed);

// Independent uniform permutation at every node (level k <= K, prefix):
// a seeded random measure-preserving TableFn.
CompatibleFn random_measure_preserving(u64 seed, Prime p, int K);

// Named families. "affine": c + a0*x0 + a1*p*x1 + ... as an expression;
// "leman": c + r*x + p*(h(x+1) - h(x)); "additive": phi0(x0) + (x - x0)
// + p*g(x), i.e. the g-form.
CompatibleFn make_affine(Prime p, i64 c, std::vector<i64> a, int depth);
CompatibleFn make_leman(Prime p, i64 c, std::optional<i64> r, ExprPtr h, int depth);
CompatibleFn make_additive(const PermP& phi0, const CompatibleFn& g);

// TableFn with phi_k(xbar, d) = gk[k-1]^n(k, xbar) applied to d.
CompatibleFn make_cyclic(const PermP& phi0, const std::vector<PermP>& gk,
                         const std::function<u64(int, u64)>& n, int K);

// TableFn with phi_k(xbar, d) = A[xbar mod p^S]*d + alpha(k, xbar) for
// k >= S, lower levels supplied as explicit tables.
CompatibleFn make_fixed_derivative(Prime p, int S, int K,
                                   const std::vector<std::vector<int>>& low_tables,
                                   const std::vector<int>& A,
                                   const std::function<int(int, u64)>& alpha);

// String-keyed dispatch over the families above, parameters as JSON:
//   affine:   {"p", "c", "a": [...], "depth"}
//   leman:    {"p", "c", "r"?, "h": "<expr>", "depth"}
//   additive: {"p", "phi0": [...], "g": <function JSON or "<expr>">}
CompatibleFn family_generators(const std::string& name, const nlohmann::json& params);

} // namespace zpdyn::builder
