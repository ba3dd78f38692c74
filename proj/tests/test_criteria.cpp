#include <doctest.h>

#include <string>

#include "zpdyn/builder.hpp"
#include "zpdyn/criteria.hpp"
#include "zpdyn/oracle.hpp"

using namespace zpdyn;
using criteria::Status;
using criteria::Verdict;

namespace {

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

// oracle ground truth for "levels 0..k all hold"
bool oracle_single(const CompatibleFn& f, int k) {
    return oracle::is_single_cycle_mod(f, k + 1).single;
}

} // namespace

// --------------------------------------------------- measure preservation

TEST_CASE("coordinate and van der Put routes agree with the oracle") {
    auto fns = {
        CompatibleFn::from_expr_string(Prime(3), "x + 1", 3),
        CompatibleFn::from_expr_string(Prime(3), "x*x", 3),
        CompatibleFn::from_expr_string(Prime(3), "2*x + 1", 3),
        CompatibleFn::from_expr_string(Prime(3), "x + 3*x*x", 3),
        CompatibleFn::from_expr_string(Prime(2), "x*x + x + 1", 3), // p = 2 is in scope here
    };
    for (const auto& f : fns) {
        auto vc = criteria::check_measure_preserving_coords(f, 3);
        auto vv = criteria::check_measure_preserving_vdp(f, 3);
        REQUIRE(vc.levels.size() == 4);
        REQUIRE(vv.levels.size() == 4);
        for (int k = 0; k <= 3; ++k) {
            CHECK(vc.levels[k].status == vv.levels[k].status);
            // bijective mod p^(k+1) iff levels 0..k all hold
            CHECK(vc.holds_at(k) == oracle::is_bijective_mod(f, k + 1).bijective);
        }
    }
}

TEST_CASE("measure-preservation levels are independent") {
    // level 1 broken (constant subfunctions), levels 0 and 2 fine
    std::vector<std::vector<int>> tabs(3);
    for (int v = 0; v < 3; ++v) tabs[0].push_back(v);
    tabs[1].assign(9, 0);
    for (int v = 0; v < 27; ++v) tabs[2].push_back(v / 9);
    auto f = CompatibleFn::from_tables(Prime(3), tabs);

    auto v = criteria::check_measure_preserving_coords(f, 2);
    CHECK(v.levels[0].status == Status::Holds);
    CHECK(v.levels[1].status == Status::Fails);
    CHECK(v.levels[2].status == Status::Holds);
    CHECK(v.first_failure() == 1);
    CHECK(v.holds_at(0));
    CHECK_FALSE(v.holds_at(2));
    CHECK_FALSE(v.all_hold());
    CHECK_THROWS_AS(v.holds_at(3), precondition_error);

    // the vdp route must see the same picture
    auto vv = criteria::check_measure_preserving_vdp(f, 2);
    for (int k = 0; k <= 2; ++k) CHECK(vv.levels[k].status == v.levels[k].status);
}

TEST_CASE("x^2 fails measure preservation with the digit collision spelled out") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x*x", 2);
    auto v = criteria::check_measure_preserving_coords(f, 2);
    CHECK(v.levels[0].status == Status::Fails);
    CHECK(contains(v.levels[0].witness, "prefix 0"));
}

// --------------------------------------------------------- ergodicity, general

TEST_CASE("x+1 is ergodic through every checked level") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x + 1", 4);
    auto v = criteria::check_ergodic_general(f, 4);
    CHECK(v.all_hold());
    CHECK(v.first_failure() == -1);
    for (int k = 0; k <= 4; ++k) CHECK(oracle_single(f, k));
}

TEST_CASE("failed levels are inherited upward") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "2*x + 1", 2);
    auto v = criteria::check_ergodic_general(f, 2);
    CHECK(v.levels[0].status == Status::Fails);
    CHECK(v.levels[1].status == Status::Fails);
    CHECK(contains(v.levels[1].witness, "inherited"));
    CHECK(v.first_failure() == 0);
}

TEST_CASE("general verdict matches the oracle level by level") {
    auto fns = {
        CompatibleFn::from_expr_string(Prime(3), "x + 1", 4),
        CompatibleFn::from_expr_string(Prime(3), "x + 3*x*x", 4),       // fails above 0
        CompatibleFn::from_expr_string(Prime(3), "4*x + 1", 4),
        CompatibleFn::from_expr_string(Prime(5), "x*x*x + 2*x + 3", 4),
        CompatibleFn::from_expr_string(Prime(2), "x + 1", 4),
        CompatibleFn::from_expr_string(Prime(2), "x*x + x + 1", 4),
    };
    for (const auto& f : fns) {
        auto v = criteria::check_ergodic_general(f, 4);
        for (int k = 0; k <= 4; ++k) CHECK(v.holds_at(k) == oracle_single(f, k));
    }
}

TEST_CASE("anchor choice changes nothing") {
    auto fns = {
        CompatibleFn::from_expr_string(Prime(3), "x + 1 + 3*x*x", 3),
        builder::build_ergodic_seeded(Prime(3), 3, 7),
        builder::build_ergodic_seeded(Prime(3), 3, 8),
    };
    for (const auto& f : fns) {
        auto v0 = criteria::check_ergodic_general(f, 3);
        for (u64 anchor : {u64(1), u64(5), u64(8), u64(26)}) {
            auto va = criteria::check_ergodic_anchor_free(f, 3, anchor);
            REQUIRE(va.levels.size() == v0.levels.size());
            for (size_t i = 0; i < v0.levels.size(); ++i)
                CHECK(va.levels[i].status == v0.levels[i].status);
        }
    }
}

TEST_CASE("transition products at different anchors are conjugate") {
    auto f = builder::build_ergodic_seeded(Prime(3), 3, 21);
    auto base = criteria::transition_products(f, 3, 0);
    REQUIRE(base.size() == 3);
    for (u64 anchor : {u64(1), u64(2), u64(7)}) {
        auto other = criteria::transition_products(f, 3, anchor);
        for (size_t i = 0; i < base.size(); ++i) {
            REQUIRE(base[i].defined);
            REQUIRE(other[i].defined);
            CHECK(base[i].F->cycle_type() == other[i].F->cycle_type());
        }
    }
}

// ------------------------------------------------------------ additive form

TEST_CASE("additive route on x+1, including the worked level-2 sum") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x + 1", 4);
    auto v = criteria::check_ergodic_additive(f, 4);
    CHECK(v.all_hold());
    REQUIRE(v.sums.size() == 4); // k = 1..4
    for (const auto& s : v.sums) CHECK(s.holds);
    // sum_{i<9} f(i) = 45; 45/9 = 5 = 2 mod 3; 1/2 = 2 mod 3; lhs = 2+2 = 1
    CHECK(v.sums[1].k == 2);
    CHECK(v.sums[1].lhs == 1);
    bool noted = false;
    for (const auto& n : v.notes) noted = noted || contains(n, "agrees");
    CHECK(noted); // level-1 sum formula recorded next to the structural result
}

TEST_CASE("additive and general verdicts coincide where both apply") {
    auto g = CompatibleFn::from_expr_string(Prime(3), "x*x + 1", 4);
    auto f = builder::make_additive(PermP::shift(Prime(3), 1), g);
    auto va = criteria::check_ergodic_additive(f, 3);
    auto vg = criteria::check_ergodic_general(f, 3);
    REQUIRE(va.levels.size() == vg.levels.size());
    for (size_t i = 0; i < va.levels.size(); ++i)
        CHECK(va.levels[i].status == vg.levels[i].status);
    for (int k = 0; k <= 3; ++k) CHECK(va.holds_at(k) == oracle_single(f, k));
}

TEST_CASE("additive route rejects functions whose carries are not shifts") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x*x", 3);
    CHECK_THROWS_AS(criteria::check_ergodic_additive(f, 3), form_mismatch);
    auto f2 = CompatibleFn::from_expr_string(Prime(2), "x + 1", 3);
    CHECK_THROWS_AS(criteria::check_ergodic_additive(f2, 3), unsupported_prime);
}

TEST_CASE("gform criterion equals the additive one on the assembled function") {
    auto g = CompatibleFn::from_expr_string(Prime(3), "x*x + 1", 4);
    auto phi0 = PermP::shift(Prime(3), 1);
    auto f = CompatibleFn::gform(phi0, g);
    auto vg = criteria::check_ergodic_gform(phi0, g, 3);
    auto va = criteria::check_ergodic_additive(f, 3);
    REQUIRE(vg.levels.size() == 4);
    for (size_t i = 0; i < vg.levels.size(); ++i)
        CHECK(vg.levels[i].status == va.levels[i].status);
    // sum_{i<3} g(i) = 1 + 2 + 5 = 8 = 2 mod 3, and the pattern persists
    for (const auto& s : vg.sums) CHECK(s.lhs == 2);
    for (const auto& s : va.sums) CHECK(s.lhs == 2);
    CHECK(vg.all_hold());
    for (int k = 0; k <= 3; ++k) CHECK(oracle_single(f, k));
}

// ------------------------------------------------------ cyclic subfunctions

TEST_CASE("cyclic-subgroup criterion against the oracle") {
    auto phi0 = PermP::shift(Prime(3), 1);
    std::vector<PermP> gk(3, PermP::shift(Prime(3), 1));

    // n = 1 everywhere: sum over p^k prefixes is 0 mod p for every k >= 1
    auto ones = [](int, u64) -> u64 { return 1; };
    auto v1 = criteria::check_ergodic_cyclic_subgroup(phi0, gk, ones, 3);
    CHECK(v1.levels[0].status == Status::Holds);
    CHECK(v1.levels[1].status == Status::Fails);
    CHECK(v1.first_failure() == 1);
    auto f1 = builder::make_cyclic(phi0, gk, ones, 3);
    for (int k = 0; k <= 3; ++k) CHECK(v1.holds_at(k) == oracle_single(f1, k));

    // bump one exponent per level: sum = p^k + 1, nonzero mod p
    auto bump = [](int, u64 xbar) -> u64 { return xbar == 0 ? 2 : 1; };
    auto v2 = criteria::check_ergodic_cyclic_subgroup(phi0, gk, bump, 3);
    CHECK(v2.all_hold());
    auto f2 = builder::make_cyclic(phi0, gk, bump, 3);
    for (int k = 0; k <= 3; ++k) CHECK(oracle_single(f2, k));

    // a non-transitive generator sinks its level even with a good sum
    std::vector<PermP> bad = {PermP::shift(Prime(3), 1), PermP::identity(Prime(3)),
                              PermP::shift(Prime(3), 1)};
    auto v3 = criteria::check_ergodic_cyclic_subgroup(phi0, bad, bump, 3);
    CHECK(v3.first_failure() == 2);
    CHECK(contains(v3.levels[2].witness, "not a single cycle"));
}

TEST_CASE("cyclic-subgroup criterion handles p = 2") {
    auto phi0 = PermP::shift(Prime(2), 1);
    std::vector<PermP> gk(3, PermP::shift(Prime(2), 1));
    // exactly one odd exponent per level keeps the sums odd
    auto n = [](int, u64 xbar) -> u64 { return xbar == 0 ? 1 : 0; };
    auto v = criteria::check_ergodic_cyclic_subgroup(phi0, gk, n, 3);
    CHECK(v.all_hold());
    auto f = builder::make_cyclic(phi0, gk, n, 3);
    for (int k = 0; k <= 3; ++k) CHECK(oracle_single(f, k));
}

// --------------------------------------------------------- per-digit affine

TEST_CASE("per-digit affine criterion") {
    // c = 1, a = (1, 4, 2): fails first at level 2 where a_2 != 1 mod 3
    auto v = criteria::check_ergodic_perdigit_affine(Prime(3), 1, {1, 4, 2}, 3);
    CHECK(v.levels[0].status == Status::Holds);
    CHECK(v.levels[1].status == Status::Holds);
    CHECK(v.levels[2].status == Status::Fails);
    CHECK(v.levels[3].status == Status::Fails); // inherited, coefficients past the list are 1
    CHECK(v.first_failure() == 2);

    auto v0 = criteria::check_ergodic_perdigit_affine(Prime(3), 0, {1}, 2);
    CHECK(v0.levels[0].status == Status::Fails); // constant term 0 mod p

    // matches the oracle on the assembled expression
    auto f = builder::make_affine(Prime(3), 1, {1, 4, 2}, 4);
    auto fv = criteria::check_ergodic_perdigit_affine(Prime(3), 1, {1, 4, 2}, 4);
    for (int k = 0; k <= 4; ++k) CHECK(fv.holds_at(k) == oracle_single(f, k));

    // PadicInt overload sees the same digits
    auto c = PadicInt::from_integer(1, Prime(3), 4);
    std::vector<PadicInt> a = {PadicInt::from_integer(1, Prime(3), 4),
                               PadicInt::from_integer(4, Prime(3), 4),
                               PadicInt::from_integer(2, Prime(3), 4)};
    auto vp = criteria::check_ergodic_perdigit_affine(c, a, 3);
    for (int k = 0; k <= 3; ++k) CHECK(vp.levels[k].status == v.levels[k].status);

    CHECK_THROWS_AS(criteria::check_ergodic_perdigit_affine(Prime(2), 1, {1}, 2),
                    unsupported_prime);
}

// --------------------------------------------------- fixed multiplier above S

TEST_CASE("fixed-multiplier criterion on x+1") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x + 1", 3);
    auto v = criteria::check_ergodic_fixed_derivative(f, 1, {1, 1, 1}, 3);
    CHECK(v.all_hold());
    REQUIRE(v.sums.size() == 2); // k = 2, 3
    CHECK(v.sums[0].k == 2);
    CHECK(v.sums[0].lhs == 1);
    CHECK(v.sums[1].lhs == 1);
    bool noted = false;
    for (const auto& n : v.notes) noted = noted || contains(n, "predicted Holds");
    CHECK(noted);
}

TEST_CASE("fixed-multiplier criterion matches the oracle when the product is not 1") {
    // multiplier 2 at every prefix: product over the level-1 orbit is 2^3 = 2 mod 3
    std::vector<std::vector<int>> low = {{1, 2, 0}};
    auto alpha = [](int k, u64 xbar) { return static_cast<int>((xbar + u64(k)) % 3); };
    auto f = builder::make_fixed_derivative(Prime(3), 1, 3, low, {2, 2, 2}, alpha);
    auto v = criteria::check_ergodic_fixed_derivative(f, 1, {2, 2, 2}, 3);
    for (int k = 0; k <= 3; ++k) CHECK(v.holds_at(k) == oracle_single(f, k));
    CHECK_FALSE(v.holds_at(2)); // product != 1 cannot stay transitive above S
}

TEST_CASE("fixed-multiplier form check rejects a multiplier that varies above S") {
    // level-2 multiplier differs between prefixes 0 and 3, which share x mod 3
    std::vector<std::vector<int>> tabs(3);
    for (int v = 0; v < 3; ++v) tabs[0].push_back((v + 1) % 3);
    for (int v = 0; v < 9; ++v) tabs[1].push_back((v / 3 + v) % 3);
    tabs[2].assign(27, 0);
    for (int xbar = 0; xbar < 9; ++xbar)
        for (int d = 0; d < 3; ++d)
            tabs[2][static_cast<size_t>(xbar + 9 * d)] = (xbar == 3 ? 2 * d : d) % 3;
    auto f = CompatibleFn::from_tables(Prime(3), tabs);
    CHECK_THROWS_AS(criteria::check_ergodic_fixed_derivative(f, 1, {1, 1, 1}, 2), form_mismatch);
}

TEST_CASE("fixed-multiplier precondition checks") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x + 1", 3);
    CHECK_THROWS_AS(criteria::check_ergodic_fixed_derivative(f, 0, {1, 1, 1}, 3),
                    precondition_error);
    CHECK_THROWS_AS(criteria::check_ergodic_fixed_derivative(f, 4, {1, 1, 1}, 3),
                    precondition_error);
    CHECK_THROWS_AS(criteria::check_ergodic_fixed_derivative(f, 1, {1, 1}, 3),
                    precondition_error); // need p^S multipliers
    auto f2 = CompatibleFn::from_expr_string(Prime(2), "x + 1", 3);
    CHECK_THROWS_AS(criteria::check_ergodic_fixed_derivative(f2, 1, {1, 1}, 3),
                    unsupported_prime);
}

// ------------------------------------------------- uniform differentiability

TEST_CASE("uniform-differentiability route") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x + 1", 3);
    auto one = CompatibleFn::from_expr_string(Prime(3), "1", 3);
    auto v = criteria::check_ergodic_unif_diff(f, one, 1, 3);
    CHECK(v.all_hold());

    // x^3 with its true derivative: the relation verifies, ergodicity fails at 0
    auto cube = CompatibleFn::from_expr_string(Prime(3), "x*x*x", 3);
    auto dcube = CompatibleFn::from_expr_string(Prime(3), "3*x*x", 3);
    auto vc = criteria::check_ergodic_unif_diff(cube, dcube, 1, 3);
    CHECK(vc.first_failure() == 0);
    for (int k = 0; k <= 3; ++k) CHECK(vc.holds_at(k) == oracle_single(cube, k));

    // a wrong derivative is caught with a concrete witness
    auto wrong = CompatibleFn::from_expr_string(Prime(3), "3*x*x + 1", 3);
    CHECK_THROWS_AS(criteria::check_ergodic_unif_diff(cube, wrong, 1, 3), diff_mismatch);
}

// ----------------------------------------------------- sufficient condition

TEST_CASE("leman_sufficient") {
    auto h = CompatibleFn::from_expr_string(Prime(3), "x*x", 4);
    auto c1 = PadicInt::from_integer(1, Prime(3), 4);
    auto c3 = PadicInt::from_integer(3, Prime(3), 4);
    auto r2 = PadicInt::from_integer(2, Prime(3), 4);
    auto r4 = PadicInt::from_integer(4, Prime(3), 4);

    CHECK(criteria::leman_sufficient(c1, std::nullopt, h).certified);
    CHECK(criteria::leman_sufficient(c1, r4, h).certified);
    auto miss_c = criteria::leman_sufficient(c3, std::nullopt, h);
    CHECK_FALSE(miss_c.certified);
    CHECK(contains(miss_c.reason, "constant term"));
    CHECK_FALSE(criteria::leman_sufficient(c1, r2, h).certified);

    // the certificate is honest: the assembled map really is ergodic
    auto f = builder::make_leman(Prime(3), 1, 4, Expr::var(), 4);
    for (int k = 0; k <= 4; ++k) CHECK(oracle_single(f, k));

    auto h2 = CompatibleFn::from_expr_string(Prime(2), "x*x", 4);
    CHECK_THROWS_AS(
        criteria::leman_sufficient(PadicInt::from_integer(1, Prime(2), 4), std::nullopt, h2),
        unsupported_prime);
}
