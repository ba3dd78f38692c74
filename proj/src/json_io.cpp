#include "zpdyn/json_io.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "zpdyn/builder.hpp"

namespace zpdyn::io {

using nlohmann::json;

nlohmann::json fn_to_json(const CompatibleFn& f) {
    json j;
    j["p"] = f.prime().v;
    j["depth"] = f.depth();
    switch (f.repr()) {
    case CompatibleFn::Repr::Expr:
        j["repr"] = "expr";
        j["expr"] = expr_to_string(*f.expr());
        break;
    case CompatibleFn::Repr::Table:
        j["repr"] = "table";
        j["tables"] = f.tables();
        break;
    case CompatibleFn::Repr::Vdp: {
        j["repr"] = "vdp";
        Prime p = f.prime();
        int m = f.vdp_mod_exp();
        std::vector<std::string> B;
        B.reserve(f.vdp_B().size());
        for (u64 Bm : f.vdp_B())
            B.push_back(PadicInt::from_integer(static_cast<i64>(Bm), p, m).str());
        j["B"] = std::move(B);
        break;
    }
    case CompatibleFn::Repr::GForm:
        j["repr"] = "gform";
        j["phi0"] = f.gform_phi0().images();
        j["g"] = fn_to_json(f.gform_g());
        break;
    }
    return j;
}

namespace {

u64 parse_vdp_coeff(const json& e, Prime p, int mod_exp) {
    if (e.is_number_unsigned() || e.is_number_integer()) {
        i64 v = e.get<i64>();
        if (v < 0) throw parse_error("vdp coefficient must be nonnegative");
        return static_cast<u64>(v) % pow_u64(p.v, mod_exp);
    }
    PadicInt pi = PadicInt::parse(e.get<std::string>());
    if (pi.prime() != p.v) throw parse_error("vdp coefficient has a different p");
    return pi.value_mod(std::min(pi.precision(), mod_exp));
}

} // namespace

CompatibleFn fn_from_json(const nlohmann::json& j) {
    try {
        Prime p(j.at("p").get<int>());
        std::string repr = j.at("repr").get<std::string>();
        if (repr == "expr")
            return CompatibleFn::from_expr_string(p, j.at("expr").get<std::string>(),
                                                  j.at("depth").get<int>());
        if (repr == "table")
            return CompatibleFn::from_tables(
                p, j.at("tables").get<std::vector<std::vector<int>>>());
        if (repr == "vdp") {
            int mod_exp = j.at("depth").get<int>() + 1;
            if (mod_exp < 1) throw parse_error("vdp depth must be >= 0");
            std::vector<u64> B;
            for (const json& e : j.at("B")) B.push_back(parse_vdp_coeff(e, p, mod_exp));
            return CompatibleFn::from_vdp(p, mod_exp, std::move(B));
        }
        if (repr == "gform") {
            PermP phi0(p, j.at("phi0").get<std::vector<int>>());
            const json& gj = j.at("g");
            CompatibleFn g = gj.is_string()
                                 ? CompatibleFn::from_expr_string(p, gj.get<std::string>(),
                                                                  j.at("depth").get<int>() - 1)
                                 : fn_from_json(gj);
            if (g.prime().v != p.v) throw parse_error("gform: g has a different p");
            if (j.contains("depth") && !gj.is_string() &&
                j.at("depth").get<int>() != g.depth() + 1)
                throw parse_error("gform: depth field disagrees with g (want g depth + 1)");
            return CompatibleFn::gform(phi0, g);
        }
        if (repr == "cyclic") {
            int K = j.at("depth").get<int>();
            PermP phi0(p, j.at("phi0").get<std::vector<int>>());
            std::vector<PermP> gk;
            for (const json& gi : j.at("g"))
                gk.emplace_back(p, gi.get<std::vector<int>>());
            auto n = j.at("n").get<std::vector<std::vector<u64>>>();
            if (static_cast<int>(n.size()) < K || static_cast<int>(gk.size()) < K)
                throw parse_error("cyclic: need g and n entries for each level 1..depth");
            for (int k = 1; k <= K; ++k)
                if (n[static_cast<size_t>(k - 1)].size() != pow_u64(p.v, k))
                    throw parse_error("cyclic: level-" + std::to_string(k) +
                                      " exponent list must have p^" + std::to_string(k) +
                                      " entries");
            auto nf = [n = std::move(n)](int k, u64 xbar) {
                return n[static_cast<size_t>(k - 1)][xbar];
            };
            return builder::make_cyclic(phi0, gk, nf, K);
        }
        throw parse_error("unknown repr '" + repr +
                          "' (known: expr, table, vdp, gform, cyclic)");
    } catch (const json::exception& e) {
        throw parse_error(std::string("function JSON: ") + e.what());
    }
}

nlohmann::json verdict_to_json(const criteria::Verdict& v) {
    json j;
    j["kind"] =
        v.kind == criteria::Verdict::Kind::MeasurePreserving ? "measure_preserving" : "ergodic";
    j["p"] = v.p;
    j["certified_depth"] = v.certified_depth;
    json levels = json::array();
    for (const auto& lv : v.levels) {
        json l;
        l["k"] = lv.k;
        l["status"] = lv.status == criteria::Status::Holds ? "holds" : "fails";
        if (lv.status == criteria::Status::Fails) l["witness"] = lv.witness;
        levels.push_back(std::move(l));
    }
    j["levels"] = std::move(levels);
    if (!v.sums.empty()) {
        json sums = json::array();
        for (const auto& s : v.sums)
            sums.push_back(json{{"k", s.k}, {"lhs", s.lhs}, {"holds", s.holds}});
        j["sums"] = std::move(sums);
    }
    if (!v.notes.empty()) j["notes"] = v.notes;
    j["all_hold"] = v.all_hold();
    j["first_failure"] = v.first_failure();
    return j;
}

std::string verdict_to_text(const criteria::Verdict& v) {
    std::ostringstream os;
    os << "kind: "
       << (v.kind == criteria::Verdict::Kind::MeasurePreserving ? "measure-preserving"
                                                                : "ergodic")
       << "\np: " << v.p << "\n";
    for (const auto& lv : v.levels) {
        os << "level " << lv.k << ": ";
        if (lv.status == criteria::Status::Holds)
            os << "Holds";
        else
            os << "Fails -- " << lv.witness;
        os << "\n";
    }
    for (const auto& s : v.sums)
        os << "sum condition at level " << s.k << ": lhs = " << s.lhs << " mod p ("
           << (s.holds ? "nonzero" : "zero") << ")\n";
    for (const auto& n : v.notes) os << "note: " << n << "\n";
    if (v.all_hold())
        os << "result: Holds through level " << v.certified_depth << "\n";
    else
        os << "result: Fails (first failure at level " << v.first_failure() << ")\n";
    return os.str();
}

nlohmann::json cross_to_json(const oracle::CrossReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(json{{"id", row.id},
                            {"level", row.level},
                            {"criterion", row.criterion},
                            {"oracle", row.oracle_single},
                            {"agree", row.agree},
                            {"ms", row.ms}});
    return json{{"rows", std::move(rows)}, {"all_agree", r.all_agree}, {"total_ms", r.total_ms}};
}

} // namespace zpdyn::io
