#include <doctest.h>

#include <variant>

#include "zpdyn/func.hpp"
#include "zpdyn/kernels.hpp"

using namespace zpdyn;

// ---------------------------------------------------------------- factories

TEST_CASE("from_expr enforces the evaluation ceiling") {
    CHECK_NOTHROW(CompatibleFn::from_expr_string(Prime(3), "x", 18)); // 3^19 < 2^31
    CHECK_THROWS_AS(CompatibleFn::from_expr_string(Prime(3), "x", 19), precondition_error);
    CHECK_THROWS_AS(CompatibleFn::from_expr_string(Prime(3), "x", -1), precondition_error);
    CHECK_THROWS_AS(CompatibleFn::from_expr_string(Prime(3), "x +", 2), parse_error);
}

TEST_CASE("eval_mod reduces the argument first") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x*x", 3);
    CHECK(f.eval_mod(7, 4) == 49);
    CHECK(f.eval_mod(7 + 81, 4) == 49);
    CHECK(f.eval_mod(7, 2) == 49 % 9);
    CHECK_THROWS_AS(f.eval_mod(7, 5), precondition_error); // past depth+1
    CHECK(f.depth() == 3);
    CHECK(f.max_mod_exp() == 4);
    CHECK(f.repr() == CompatibleFn::Repr::Expr);
}

TEST_CASE("from_tables round trips through to_tables") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x*x + 2*x + 1", 3);
    auto t = CompatibleFn::from_tables(Prime(3), to_tables(f, 3));
    CHECK(t.depth() == 3);
    for (u64 x = 0; x < 81; ++x)
        for (int m = 1; m <= 4; ++m) CHECK(t.eval_mod(x, m) == f.eval_mod(x, m));
}

TEST_CASE("from_tables validates shapes") {
    CHECK_THROWS_AS(CompatibleFn::from_tables(Prime(3), {}), precondition_error);
    CHECK_THROWS_AS(CompatibleFn::from_tables(Prime(3), {{0, 1}}), precondition_error); // need 3
    CHECK_THROWS_AS(CompatibleFn::from_tables(Prime(3), {{0, 1, 3}}), precondition_error);
}

TEST_CASE("gform evaluates as base permutation plus carry part") {
    // f(x) = phi0(x0) + (x - x0) + 3*g(x) with phi0 = x0+1, g = x
    auto g = CompatibleFn::from_expr_string(Prime(3), "x", 3);
    auto f = CompatibleFn::gform(PermP::shift(Prime(3), 1), g);
    CHECK(f.repr() == CompatibleFn::Repr::GForm);
    CHECK(f.depth() == 4);
    CHECK(f.eval_mod(0, 3) == 1);   // 1 + 0 + 0
    CHECK(f.eval_mod(4, 3) == 17);  // 2 + 3 + 12
    CHECK(f.gform_phi0() == PermP::shift(Prime(3), 1));
}

// ------------------------------------------------------- van der Put series

TEST_CASE("digit_count") {
    CHECK(digit_count(0, 3) == 1);
    CHECK(digit_count(2, 3) == 1);
    CHECK(digit_count(3, 3) == 2);
    CHECK(digit_count(8, 3) == 2);
    CHECK(digit_count(9, 3) == 3);
}

TEST_CASE("chi is the ball indicator") {
    CHECK(chi(Prime(3), 5, Residue{14, 3}) == 1); // 14 = 5 mod 9
    CHECK(chi(Prime(3), 5, Residue{2, 3}) == 0);
    CHECK(chi(Prime(3), 0, Residue{9, 2}) == 1);  // 9 = 0 mod 3
    CHECK(chi(Prime(3), 5, Residue{5, 2}) == 1);  // level 2 = n(5), just enough
    // x known mod 3 only: membership in a radius-1/9 ball is undetermined
    CHECK_THROWS_AS(chi(Prime(3), 5, Residue{2, 1}), precondition_error);
}

TEST_CASE("vdp_coefficients of the identity") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x", 3);
    auto c = vdp_coefficients(f, 3);
    CHECK(c.B[1] == 1);
    CHECK(c.B[5] == 3); // 5 - (5 mod 3)
    CHECK(c.b[5] == 1);
    CHECK(c.B[9] == 9);
    CHECK(c.b[9] == 1);
    CHECK(c.b_mod_p(5) == 1);
    CHECK(c.b_padic(5).str() == "1,0 (base 3)");
}

TEST_CASE("vdp_coefficients of x^2") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x*x", 3);
    auto c = vdp_coefficients(f, 3);
    CHECK(c.B[5] == 21); // 25 - 4 mod 27
    CHECK(c.b[5] == 7);
    CHECK(c.B[4] == 15); // 16 - 1
    CHECK(c.b_mod_p(4) == 2);
}

TEST_CASE("vdp_eval reproduces the function") {
    for (const char* src : {"x", "x*x", "x*x*x + 2*x + 1", "affine(1,[1,2,1])"}) {
        auto f = CompatibleFn::from_expr_string(Prime(3), src, 3);
        auto c = vdp_coefficients(f, 3);
        for (u64 x = 0; x < 27; ++x) CHECK(vdp_eval(c, Residue{x, 3}) == f.eval_mod(x, 3));
    }
}

TEST_CASE("from_vdp rebuilds the same function") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x*x", 3);
    auto c = vdp_coefficients(f, 3);
    auto g = CompatibleFn::from_vdp(Prime(3), 3, c.B);
    CHECK(g.depth() == 2);
    CHECK(g.repr() == CompatibleFn::Repr::Vdp);
    for (u64 x = 0; x < 27; ++x)
        for (int m = 1; m <= 3; ++m) CHECK(g.eval_mod(x, m) == f.eval_mod(x, m));
}

TEST_CASE("from_vdp rejects coefficients a 1-Lipschitz map cannot have") {
    // B_4 must be divisible by 3
    std::vector<u64> B(9, 0);
    B[4] = 1;
    try {
        CompatibleFn::from_vdp(Prime(3), 2, B);
        FAIL("expected compatibility_error");
    } catch (const compatibility_error& e) {
        CHECK(e.witness_index == 4);
    }
}

// ------------------------------------------------------------ digit views

TEST_CASE("coordinate_fn picks digit k of f") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x*x", 3);
    CHECK(coordinate_fn(f, 0, 2) == 1);  // 4 mod 3
    CHECK(coordinate_fn(f, 1, 7) == 1);  // 49 = 1,1,2,1
    CHECK(coordinate_fn(f, 2, 7) == 2);
    CHECK_THROWS_AS(coordinate_fn(f, 4, 0), precondition_error);
}

TEST_CASE("subfunction_perm returns the collision witness for x^2 at level 0") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x*x", 3);
    auto r = subfunction_perm(f, 0, 0);
    REQUIRE(std::holds_alternative<NotBijective>(r));
    auto w = std::get<NotBijective>(r);
    CHECK(w.d1 == 1);
    CHECK(w.d2 == 2);
    CHECK(w.image == 1);
}

TEST_CASE("subfunction_perm of x+1 above level 0 is a shift") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x + 1", 3);
    auto r = subfunction_perm(f, 1, 2); // digits of f on 2 + 3d
    REQUIRE(std::holds_alternative<PermP>(r));
    CHECK(std::get<PermP>(r) == PermP::shift(Prime(3), 1));
    auto r0 = subfunction_perm(f, 0, 0);
    REQUIRE(std::holds_alternative<PermP>(r0));
    CHECK(std::get<PermP>(r0) == PermP::shift(Prime(3), 1));
}

TEST_CASE("reduce_fn materializes f mod p^(k+1)") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x + 1", 2);
    CHECK(reduce_fn(f, 1) == std::vector<u64>{1, 2, 3, 4, 5, 6, 7, 8, 0});
}

// ------------------------------------------------------------ compatibility

TEST_CASE("is_compatible_up_to certifies a 1-Lipschitz evaluator") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x*x + 2", 3);
    auto res = is_compatible_up_to([&](u64 x) { return f.eval_mod(x, 4); }, Prime(3), 3);
    CHECK(res.certified);
}

TEST_CASE("is_compatible_up_to catches halving with a real counterexample") {
    auto raw = [](u64 x) { return x >> 1; };
    auto res = is_compatible_up_to(raw, Prime(3), 3);
    REQUIRE_FALSE(res.certified);
    const auto& w = res.witness;
    u64 pk = pow_u64(3, w.k);
    CHECK(raw(w.x + pk * u64(w.h)) % pk != raw(w.x) % pk);
}

// ------------------------------------------------------------------ kernels

TEST_CASE("parallel kernels match their serial twins") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x*x*x + 2*x + 1", 5);
    CHECK(kernels::reduce_table(f, 5) == kernels::reduce_table_serial(f, 5));

    auto bad = CompatibleFn::from_expr_string(Prime(3), "x*x", 4);
    for (int k = 0; k <= 4; ++k) {
        auto a = kernels::scan_subfunctions(bad, k);
        auto b = kernels::scan_subfunctions_serial(bad, k);
        CHECK(a.ok == b.ok);
        CHECK(a.prefix == b.prefix);
        CHECK(a.d1 == b.d1);
        CHECK(a.d2 == b.d2);
        CHECK(a.image == b.image);
    }

    auto raw = [](u64 x) { return x >> 1; };
    auto c1 = kernels::compat_sweep(raw, Prime(3), 4);
    auto c2 = kernels::compat_sweep_serial(raw, Prime(3), 4);
    CHECK(c1.certified == c2.certified);
    CHECK(c1.witness.k == c2.witness.k);
    CHECK(c1.witness.x == c2.witness.x);
    CHECK(c1.witness.h == c2.witness.h);
}
