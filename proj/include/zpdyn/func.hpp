#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "zpdyn/expr.hpp"
#include "zpdyn/padic.hpp"
#include "zpdyn/perm.hpp"

// The function model: a 1-Lipschitz map f : Z_p -> Z_p under one of four
// representations, plus the structural views the criteria need.
//
// Because f is 1-Lipschitz, digit k of f(x) depends only on x mod p^(k+1).
// That makes two views well-defined:
//   coordinate_fn(f, k, xbar)    digit k of f at a level-(k+1) prefix
//   subfunction_perm(f, k, pre)  the map last-digit -> digit k of f, with
//                                the first k digits frozen to `pre`
// and it gives f a van der Put expansion
//   f(x) = sum_m B_m chi(m, x)
// where chi(m, .) is the indicator of the ball of radius p^-n(m) around m,
// n(m) counting the base-p digits of m (n(0) = 1). For m >= p the
// coefficient B_m must be divisible by p^floor(log_p m); the normalized
// b_m = B_m / p^floor(log_p m) drive the measure-preservation test.

namespace zpdyn {

// Hard cap on exhaustively materialized entries (tables, vdP coefficient
// arrays, reduced maps). Chosen so every exhaustive sweep stays in memory
// and well under a second per function.
inline constexpr u64 TABLE_ENTRY_CAP = 2'000'000;

class CompatibleFn {
public:
    enum class Repr { Expr, Table, Vdp, GForm };

    // Expression tree, evaluable at any depth up to the 64-bit ceiling.
    static CompatibleFn from_expr(Prime p, ExprPtr e, int depth);
    static CompatibleFn from_expr_string(Prime p, const std::string& src, int depth);

    // Explicit coordinate tables: tables[k][v] = digit k of f(v), for
    // v < p^(k+1). Depth is tables.size() - 1.
    static CompatibleFn from_tables(Prime p, std::vector<std::vector<int>> tables);

    // van der Put coefficients B[m] for m < p^mod_exp, each stored mod
    // p^mod_exp. Divisibility of B[m] by p^floor(log_p m) is checked here.
    static CompatibleFn from_vdp(Prime p, int mod_exp, std::vector<u64> B);

    // f(x) = phi0(x0) + (x - x0) + p*g(x): the normal form in which every
    // subfunction above level 0 is a shift. Used by the additive family
    // generator and the g-form criterion.
    static CompatibleFn gform(const PermP& phi0, const CompatibleFn& g);

    Prime prime() const;
    Repr repr() const;

    // Certified depth K: eval_mod is valid for modulus exponents m <= K+1,
    // equivalently all digit levels k <= K are defined.
    int depth() const;
    int max_mod_exp() const { return depth() + 1; }

    // f(x) mod p^m. x may be arbitrary; it is reduced mod p^m first.
    u64 eval_mod(u64 x, int m) const;

    // representation accessors; throw precondition_error on a wrong repr
    const ExprPtr& expr() const;
    const std::vector<std::vector<int>>& tables() const;
    const std::vector<u64>& vdp_B() const;
    int vdp_mod_exp() const;
    const PermP& gform_phi0() const;
    const CompatibleFn& gform_g() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    explicit CompatibleFn(std::shared_ptr<const Impl> i) : impl_(std::move(i)) {}
};

// n(m): how many base-p digits m has; by convention n(0) = 1.
int digit_count(u64 m, int p);

// chi(m, x) for x known mod p^level: 1 iff x = m mod p^n(m).
// Refuses (throws) when level < n(m); the answer would depend on digits of
// x that the caller does not have.
int chi(Prime p, u64 m, Residue x);

struct VdpCoefficients {
    int p;
    int mod_exp;            // B[m] is known mod p^mod_exp
    std::vector<u64> B;     // m < p^mod_exp
    std::vector<u64> b;     // b[m] = B[m] / p^floor(log_p m), known mod p^(mod_exp - that)
    int b_mod_p(u64 m) const { return static_cast<int>(b[m] % static_cast<u64>(p)); }
    PadicInt B_padic(u64 m) const;
    PadicInt b_padic(u64 m) const;
};

// Extract B_m (and normalized b_m) for all m < p^mod_exp.
// B_m = f(m) for m < p, else f(m) - f(m mod p^floor(log_p m)), everything
// mod p^mod_exp. Throws compatibility_error (with witness m) if some B_m
// lacks the divisibility a 1-Lipschitz f guarantees.
VdpCoefficients vdp_coefficients(const CompatibleFn& f, int mod_exp);

// Evaluate the truncated series sum_{m < p^level} B_m chi(m, x) mod p^level.
u64 vdp_eval(const VdpCoefficients& c, Residue x);

// Digit k of f at prefix xbar < p^(k+1).
int coordinate_fn(const CompatibleFn& f, int k, u64 xbar);

// Witness that a level-k subfunction is not injective: digits d1 < d2 with
// the same image. Deliberately a value, not an error; non-bijective
// subfunctions are an expected answer, not a failure mode.
struct NotBijective {
    int d1, d2, image;
};
using SubfnResult = std::variant<PermP, NotBijective>;

// The map x_k -> digit k of f(prefix + p^k x_k), prefix < p^k (0 for k=0).
SubfnResult subfunction_perm(const CompatibleFn& f, int k, u64 prefix);

struct CompatWitness {
    int k;
    u64 x;
    int h;
};
struct CompatResult {
    bool certified;
    CompatWitness witness; // valid when !certified
};

// Check f(x + p^k h) = f(x) mod p^k for all k <= K, x < p^k, 0 < h < p.
// `raw` is any evaluator on plain integers (arguments stay below p^(K+1)).
CompatResult is_compatible_up_to(const std::function<u64(u64)>& raw, Prime p, int K);

// The reduced map f mod p^(k+1) as an explicit table of size p^(k+1).
std::vector<u64> reduce_fn(const CompatibleFn& f, int k);

// Materialize coordinate tables for levels 0..K (cap-checked).
std::vector<std::vector<int>> to_tables(const CompatibleFn& f, int K);

} // namespace zpdyn
