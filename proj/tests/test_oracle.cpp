#include <doctest.h>

#include "zpdyn/oracle.hpp"

using namespace zpdyn;

TEST_CASE("bijectivity by exhaustion") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "2*x + 1", 4);
    for (int m = 1; m <= 4; ++m) CHECK(oracle::is_bijective_mod(f, m).bijective);

    auto sq = CompatibleFn::from_expr_string(Prime(3), "x*x", 4);
    auto r = oracle::is_bijective_mod(sq, 1);
    REQUIRE_FALSE(r.bijective);
    CHECK(r.x1 == 1);
    CHECK(r.x2 == 2); // 1^2 = 2^2 mod 3
    CHECK(sq.eval_mod(r.x1, 1) == sq.eval_mod(r.x2, 1));
}

TEST_CASE("2x+1 mod 9 is bijective but not a single cycle") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "2*x + 1", 4);
    auto s = oracle::is_single_cycle_mod(f, 2);
    CHECK(s.bijective);
    CHECK_FALSE(s.single);
    CHECK(s.orbit_len == 6); // 0 1 3 7 6 4
    CHECK(oracle::cycle_structure_mod(f, 2) == std::vector<u64>{6, 2, 1});
}

TEST_CASE("x+1 is a single cycle at every modulus") {
    auto f = CompatibleFn::from_expr_string(Prime(3), "x + 1", 5);
    for (int m = 1; m <= 5; ++m) {
        auto s = oracle::is_single_cycle_mod(f, m);
        CHECK(s.single);
        CHECK(s.orbit_len == pow_u64(3, m));
        CHECK(oracle::cycle_structure_mod(f, m) == std::vector<u64>{pow_u64(3, m)});
    }
}

TEST_CASE("cycle structure of a non-bijective map is undefined") {
    auto sq = CompatibleFn::from_expr_string(Prime(3), "x*x", 4);
    CHECK_THROWS_AS(oracle::cycle_structure_mod(sq, 2), zpdyn::error);
}

TEST_CASE("exhaustion ceiling guards the cost") {
    CHECK(oracle::depth_ceiling(3) == 8);
    CHECK(oracle::depth_ceiling(5) == 6);
    auto f = CompatibleFn::from_expr_string(Prime(3), "x + 1", 9);
    CHECK_THROWS_AS(oracle::is_bijective_mod(f, 9), precondition_error);
    CHECK(oracle::is_single_cycle_mod(f, 9, /*force=*/true).single); // 3^9 evals, warned
    // past the function's own certified depth there is no override
    CHECK_THROWS_AS(oracle::is_bijective_mod(f, 11, true), precondition_error);
}

TEST_CASE("cross_validate lines up criterion and oracle per level") {
    std::vector<std::pair<std::string, CompatibleFn>> corpus;
    corpus.emplace_back("inc", CompatibleFn::from_expr_string(Prime(3), "x + 1", 3));
    corpus.emplace_back("double", CompatibleFn::from_expr_string(Prime(3), "2*x + 1", 3));
    auto rep = oracle::cross_validate(corpus, 2);

    REQUIRE(rep.rows.size() == 6); // 2 members x levels 0..2
    CHECK(rep.all_agree);
    // row order is corpus order, then level
    CHECK(rep.rows[0].id == "inc");
    CHECK(rep.rows[0].level == 0);
    CHECK(rep.rows[2].level == 2);
    CHECK(rep.rows[3].id == "double");
    for (const auto& row : rep.rows) {
        CHECK(row.agree);
        CHECK(row.criterion == (row.id == "inc")); // 2x+1 is not even transitive mod 3
        CHECK(row.ms >= 0.0);
    }

    // deterministic apart from timing
    auto rep2 = oracle::cross_validate(corpus, 2);
    REQUIRE(rep2.rows.size() == rep.rows.size());
    for (size_t i = 0; i < rep.rows.size(); ++i) {
        CHECK(rep2.rows[i].id == rep.rows[i].id);
        CHECK(rep2.rows[i].level == rep.rows[i].level);
        CHECK(rep2.rows[i].criterion == rep.rows[i].criterion);
        CHECK(rep2.rows[i].oracle_single == rep.rows[i].oracle_single);
        CHECK(rep2.rows[i].agree == rep.rows[i].agree);
    }
}

TEST_CASE("cross_to_csv shape") {
    std::vector<std::pair<std::string, CompatibleFn>> corpus;
    corpus.emplace_back("inc", CompatibleFn::from_expr_string(Prime(3), "x + 1", 1));
    auto csv = oracle::cross_to_csv(oracle::cross_validate(corpus, 1));
    CHECK(csv.rfind("id,level,criterion,oracle,agree,ms", 0) == 0);
    CHECK(csv.find("inc,0,true,true,true") != std::string::npos);
    CHECK(csv.find("inc,1,true,true,true") != std::string::npos);
}
