#pragma once

#include <memory>
#include <string>
#include <vector>

#include "zpdyn/padic.hpp"

// Expression trees for 1-Lipschitz maps Z_p -> Z_p. Every construct the
// grammar admits preserves all congruences mod p^k, so a parsed expression
// is compatible by construction:
//
//   expr   := term (('+'|'-') term)*
//   term   := comp ('*' comp)*
//   comp   := atom ('∘' atom)*          composition, right factor first
//   atom   := integer | 'x' | '(' expr ')'
//           | 'diff' '(' expr ')'            h |-> h(x+1) - h(x)
//           | 'affine' '(' int ',' '[' int {',' int} ']' ')'
//
// affine(c,[a0,...,an]) is c + a0*x0 + a1*p*x1 + ... acting on the digits
// of x; coefficients past the list default to 1 so the map is total.

namespace zpdyn {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Const, Var, Add, Sub, Mul, Compose, Diff, Affine };
    Kind kind;
    i64 cval = 0;       // Const
    ExprPtr a, b;       // binary ops; Diff/Compose use a (and b)
    i64 affine_c = 0;   // Affine
    std::vector<i64> affine_a;

    static ExprPtr constant(i64 v);
    static ExprPtr var();
    static ExprPtr add(ExprPtr l, ExprPtr r);
    static ExprPtr sub(ExprPtr l, ExprPtr r);
    static ExprPtr mul(ExprPtr l, ExprPtr r);
    static ExprPtr compose(ExprPtr outer, ExprPtr inner); // outer(inner(x))
    static ExprPtr diff(ExprPtr h);
    static ExprPtr affine(i64 c, std::vector<i64> a);
};

// f(x) mod p^m; x is reduced mod p^m first. Requires p^m < 2^31.
u64 expr_eval_mod(const Expr& e, u64 x, int p, int m);

ExprPtr parse_expr(const std::string& src); // throws parse_error
std::string expr_to_string(const Expr& e);  // round-trips through parse_expr

} // namespace zpdyn
