#include "zpdyn/builder.hpp"

#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "zpdyn/json_io.hpp"

namespace zpdyn::builder {

PermP random_perm(Rng& rng, Prime p) {
    std::vector<int> img(static_cast<size_t>(p.v));
    std::iota(img.begin(), img.end(), 0);
    for (size_t i = img.size() - 1; i > 0; --i)
        std::swap(img[i], img[rng.below(i + 1)]);
    return PermP(p, std::move(img));
}

PermP random_cycle(Rng& rng, Prime p) {
    // a uniform cycle is a uniform ordering of the points after 0
    std::vector<int> order(static_cast<size_t>(p.v));
    std::iota(order.begin(), order.end(), 0);
    for (size_t i = order.size() - 1; i > 1; --i)
        std::swap(order[i], order[1 + rng.below(i)]);
    std::vector<int> img(static_cast<size_t>(p.v));
    for (int i = 0; i < p.v; ++i)
        img[static_cast<size_t>(order[static_cast<size_t>(i)])] =
            order[static_cast<size_t>((i + 1) % p.v)];
    return PermP(p, std::move(img));
}

CompatibleFn build_ergodic(const PermP& phi0, const SideTables& side,
                           const std::vector<PermP>& targets, int K) {
    Prime p(phi0.p());
    if (K < 0) throw precondition_error("build_ergodic: K must be >= 0");
    if (static_cast<int>(targets.size()) < K)
        throw precondition_error("build_ergodic: need a target for each level 1..K");
    if (!phi0.is_transitive())
        throw precondition_error("build_ergodic: phi0 must be a single cycle");
    u64 total = 0, sz = static_cast<u64>(p.v);
    for (int k = 0; k <= K; ++k) {
        total += sz;
        sz *= static_cast<u64>(p.v);
    }
    if (total > TABLE_ENTRY_CAP)
        throw precondition_error("build_ergodic: table exceeds the entry cap");

    std::vector<std::vector<int>> tables;
    tables.push_back(phi0.images());
    for (int k = 1; k <= K; ++k) {
        const PermP& H = targets[static_cast<size_t>(k - 1)];
        if (H.p() != p.v) throw precondition_error("build_ergodic: target has a different p");
        if (!H.is_transitive())
            throw precondition_error("build_ergodic: level-" + std::to_string(k) +
                                     " target must be a single cycle");
        CompatibleFn lower = CompatibleFn::from_tables(p, tables);
        u64 pk = pow_u64(p.v, k);

        // gather the side tables, then compose them along the orbit of 0,
        // newest on the left, skipping the anchor's own slot
        std::vector<PermP> at;
        at.reserve(pk);
        at.push_back(PermP::identity(p)); // placeholder for prefix 0
        for (u64 xbar = 1; xbar < pk; ++xbar) {
            PermP s = side(k, xbar);
            if (s.p() != p.v)
                throw precondition_error("build_ergodic: side table has a different p");
            at.push_back(std::move(s));
        }
        PermP G = PermP::identity(p);
        u64 x = lower.eval_mod(0, k), steps = 1;
        while (x != 0) {
            G = compose(at[x], G);
            x = lower.eval_mod(x, k);
            ++steps;
        }
        if (steps != pk)
            throw error("internal: lower levels of the built function are not transitive");
        at[0] = compose(G.inverse(), H);

        std::vector<int> tab(pk * static_cast<u64>(p.v));
        for (u64 v = 0; v < tab.size(); ++v)
            tab[v] = at[v % pk](static_cast<int>(v / pk));
        tables.push_back(std::move(tab));
    }
    return CompatibleFn::from_tables(p, std::move(tables));
}

CompatibleFn build_ergodic_seeded(Prime p, int K, u64 seed) {
    Rng rng(seed);
    PermP plus1 = PermP::shift(p, 1);
    std::vector<PermP> targets(static_cast<size_t>(K), plus1);
    // draw every side table up front so the draw order is a stable function
    // of (p, K, seed) alone
    std::map<std::pair<int, u64>, PermP> sides;
    for (int k = 1; k <= K; ++k)
        for (u64 xbar = 1; xbar < pow_u64(p.v, k); ++xbar)
            sides.emplace(std::make_pair(k, xbar), random_perm(rng, p));
    SideTables side = [sides = std::move(sides)](int k, u64 xbar) {
        return sides.at({k, xbar});
    };
    return build_ergodic(plus1, side, targets, K);
}

CompatibleFn random_measure_preserving(u64 seed, Prime p, int K) {
    if (K < 0) throw precondition_error("random_measure_preserving: K must be >= 0");
    Rng rng(seed);
    std::vector<std::vector<int>> tables;
    for (int k = 0; k <= K; ++k) {
        u64 pk = pow_u64(p.v, k);
        std::vector<int> tab(pk * static_cast<u64>(p.v));
        for (u64 xbar = 0; xbar < pk; ++xbar) {
            PermP g = random_perm(rng, p);
            for (int d = 0; d < p.v; ++d) tab[xbar + pk * static_cast<u64>(d)] = g(d);
        }
        tables.push_back(std::move(tab));
    }
    return CompatibleFn::from_tables(p, std::move(tables));
}

CompatibleFn make_affine(Prime p, i64 c, std::vector<i64> a, int depth) {
    return CompatibleFn::from_expr(p, Expr::affine(c, std::move(a)), depth);
}

CompatibleFn make_leman(Prime p, i64 c, std::optional<i64> r, ExprPtr h, int depth) {
    if (!h) throw precondition_error("make_leman: null inner expression");
    // c + r*x + p*(h(x+1) - h(x))
    ExprPtr linear = r ? Expr::mul(Expr::constant(*r), Expr::var()) : Expr::var();
    ExprPtr e = Expr::add(Expr::add(Expr::constant(c), std::move(linear)),
                          Expr::mul(Expr::constant(p.v), Expr::diff(std::move(h))));
    return CompatibleFn::from_expr(p, std::move(e), depth);
}

CompatibleFn make_additive(const PermP& phi0, const CompatibleFn& g) {
    return CompatibleFn::gform(phi0, g);
}

CompatibleFn make_cyclic(const PermP& phi0, const std::vector<PermP>& gk,
                         const std::function<u64(int, u64)>& n, int K) {
    Prime p(phi0.p());
    if (K < 0) throw precondition_error("make_cyclic: K must be >= 0");
    if (static_cast<int>(gk.size()) < K)
        throw precondition_error("make_cyclic: need a generator for each level 1..K");
    std::vector<std::vector<int>> tables;
    tables.push_back(phi0.images());
    for (int k = 1; k <= K; ++k) {
        const PermP& g = gk[static_cast<size_t>(k - 1)];
        if (g.p() != p.v) throw precondition_error("make_cyclic: generator has a different p");
        u64 pk = pow_u64(p.v, k);
        if (pk * static_cast<u64>(p.v) > TABLE_ENTRY_CAP)
            throw precondition_error("make_cyclic: table exceeds the entry cap");
        std::vector<int> tab(pk * static_cast<u64>(p.v));
        for (u64 xbar = 0; xbar < pk; ++xbar) {
            PermP gp = g.pow(static_cast<i64>(n(k, xbar) % g.order()));
            for (int d = 0; d < p.v; ++d) tab[xbar + pk * static_cast<u64>(d)] = gp(d);
        }
        tables.push_back(std::move(tab));
    }
    return CompatibleFn::from_tables(p, std::move(tables));
}

CompatibleFn make_fixed_derivative(Prime p, int S, int K,
                                   const std::vector<std::vector<int>>& low_tables,
                                   const std::vector<int>& A,
                                   const std::function<int(int, u64)>& alpha) {
    if (S < 1 || S > K) throw precondition_error("make_fixed_derivative: need 1 <= S <= K");
    if (static_cast<int>(low_tables.size()) != S)
        throw precondition_error("make_fixed_derivative: need explicit tables for levels 0.." +
                                 std::to_string(S - 1));
    u64 pS = pow_u64(p.v, S);
    if (A.size() != pS)
        throw precondition_error("make_fixed_derivative: need one multiplier per level-S prefix");
    std::vector<std::vector<int>> tables = low_tables;
    for (int k = S; k <= K; ++k) {
        u64 pk = pow_u64(p.v, k);
        if (pk * static_cast<u64>(p.v) > TABLE_ENTRY_CAP)
            throw precondition_error("make_fixed_derivative: table exceeds the entry cap");
        std::vector<int> tab(pk * static_cast<u64>(p.v));
        for (u64 v = 0; v < tab.size(); ++v) {
            u64 xbar = v % pk;
            int d = static_cast<int>(v / pk);
            int av = alpha(k, xbar);
            if (av < 0 || av >= p.v)
                throw precondition_error("make_fixed_derivative: alpha value out of range");
            tab[v] = (A[xbar % pS] * d + av) % p.v;
        }
        tables.push_back(std::move(tab));
    }
    return CompatibleFn::from_tables(p, std::move(tables));
}

CompatibleFn family_generators(const std::string& name, const nlohmann::json& params) {
    try {
        if (name == "affine") {
            Prime p(params.at("p").get<int>());
            i64 c = params.at("c").get<i64>();
            std::vector<i64> a;
            if (params.contains("a")) a = params.at("a").get<std::vector<i64>>();
            int depth = params.at("depth").get<int>();
            return make_affine(p, c, std::move(a), depth);
        }
        if (name == "leman") {
            Prime p(params.at("p").get<int>());
            i64 c = params.at("c").get<i64>();
            std::optional<i64> r;
            if (params.contains("r")) r = params.at("r").get<i64>();
            ExprPtr h = parse_expr(params.at("h").get<std::string>());
            int depth = params.at("depth").get<int>();
            return make_leman(p, c, r, std::move(h), depth);
        }
        if (name == "additive") {
            Prime p(params.at("p").get<int>());
            PermP phi0(p, params.at("phi0").get<std::vector<int>>());
            const auto& gj = params.at("g");
            // "depth" is the assembled function's depth; g sits one level lower
            int gdepth = params.contains("depth") ? params.at("depth").get<int>() - 1
                                                  : max_mod_exp(p.v) - 2;
            CompatibleFn g = gj.is_string()
                                 ? CompatibleFn::from_expr_string(p, gj.get<std::string>(), gdepth)
                                 : io::fn_from_json(gj);
            if (g.prime().v != p.v)
                throw precondition_error("additive family: g has a different p");
            return make_additive(phi0, g);
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("family parameters: ") + e.what());
    }
    throw precondition_error("unknown family '" + name +
                             "' (known: affine, leman, additive)");
}

} // namespace zpdyn::builder
