#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "zpdyn/builder.hpp"
#include "zpdyn/criteria.hpp"
#include "zpdyn/json_io.hpp"
#include "zpdyn/oracle.hpp"

// Exit codes:
//   0  the check holds through the requested depth (or the command succeeded)
//   1  the check ran and the answer is "fails" / "not certified" / "disagree"
//   2  bad input: unparsable function or argument, violated precondition
//   3  the math gave up: non-1-Lipschitz evaluator, cycle structure of a
//      non-bijective map, internal inconsistency
//   4  wrong shape for a special-form check: form mismatch, derivative
//      mismatch, or p = 2 handed to an odd-p-only criterion

namespace {

using namespace zpdyn;
using nlohmann::json;

std::string slurp(const std::string& spec) {
    if (spec == "-") {
        std::ostringstream os;
        os << std::cin.rdbuf();
        return os.str();
    }
    std::ifstream in(spec);
    if (in) {
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }
    return spec; // not a readable file: treat as inline text
}

bool looks_like_json(const std::string& s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return c == '{' || c == '[';
    return false;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("JSON input: ") + e.what());
    }
}

// A function spec is "-" (stdin), a file path, or inline text; the text is
// a JSON function if it starts with '{', an expression otherwise.
CompatibleFn load_fn(const std::string& spec, Prime p, int expr_depth) {
    std::string text = slurp(spec);
    if (looks_like_json(text)) return io::fn_from_json(parse_json(text));
    return CompatibleFn::from_expr_string(p, text, expr_depth);
}

u64 parse_point(const std::string& s, Prime p, int mod_exp) {
    if (s.find("(base") != std::string::npos) {
        PadicInt v = PadicInt::parse(s);
        if (v.prime() != p.v) throw precondition_error("the point has a different p");
        return v.value_mod(std::min(v.precision(), mod_exp));
    }
    try {
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return PadicInt::from_integer(v, p, mod_exp).value_mod(mod_exp);
    } catch (const zpdyn::error&) {
        throw;
    } catch (const std::exception&) {
        throw parse_error("point must be an integer or a digit string like \"1,2,0 (base 3)\"");
    }
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ','))
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw parse_error("expected a comma-separated integer list, got '" + s + "'");
        }
    return out;
}

void print_verdict(const criteria::Verdict& v, const std::string& format) {
    if (format == "json")
        std::cout << io::verdict_to_json(v).dump(2) << "\n";
    else if (format == "csv")
        throw precondition_error("csv output is only available for 'check --method cross' and 'vdp'");
    else
        std::cout << io::verdict_to_text(v);
}

// multipliers read off the function itself: how digit S moves when the
// level-S digit of the argument goes up by one
std::vector<int> derive_multipliers(const CompatibleFn& f, int S) {
    const int p = f.prime().v;
    u64 pS = pow_u64(p, S);
    std::vector<int> A(pS);
    for (u64 i = 0; i < pS; ++i) {
        int base = digit_of(f.eval_mod(i, S + 1), S, p);
        int up = digit_of(f.eval_mod(i + pS, S + 1), S, p);
        A[i] = ((up - base) % p + p) % p;
    }
    return A;
}

criteria::Verdict oracle_verdict(const CompatibleFn& f, int K, bool force) {
    criteria::Verdict v;
    v.kind = criteria::Verdict::Kind::Ergodic;
    v.p = f.prime().v;
    v.certified_depth = K;
    for (int k = 0; k <= K; ++k) {
        oracle::SingleCycle sc = oracle::is_single_cycle_mod(f, k + 1, force);
        if (!sc.bijective)
            v.levels.push_back({k, criteria::Status::Fails,
                                "f mod p^" + std::to_string(k + 1) + " is not bijective (" +
                                    std::to_string(sc.x1) + " and " + std::to_string(sc.x2) +
                                    " collide)"});
        else if (!sc.single)
            v.levels.push_back({k, criteria::Status::Fails,
                                "orbit of 0 mod p^" + std::to_string(k + 1) + " has length " +
                                    std::to_string(sc.orbit_len) + " of " +
                                    std::to_string(pow_u64(f.prime().v, k + 1))});
        else
            v.levels.push_back({k, criteria::Status::Holds, {}});
    }
    v.notes.push_back("decided by exhaustive enumeration");
    return v;
}

struct Options {
    int p = 3;
    int depth = 4;
    bool depth_given = false;
    u64 seed = 1;
    std::string format = "text";
    bool force = false;
};

int effective_depth(const Options& o, const CompatibleFn& f) {
    return o.depth_given ? o.depth : std::min(o.depth, f.depth());
}

int run_eval(const Options& o, const std::string& fnspec, const std::string& xspec,
             int mod_exp_opt) {
    Prime p(o.p);
    CompatibleFn f = load_fn(fnspec, p, zpdyn::max_mod_exp(o.p) - 1);
    int m = mod_exp_opt > 0 ? mod_exp_opt : effective_depth(o, f) + 1;
    u64 x = parse_point(xspec, f.prime(), m);
    u64 y = f.eval_mod(x, m);
    PadicInt yd = PadicInt::from_integer(static_cast<i64>(y), f.prime(), m);
    if (o.format == "json") {
        json j{{"p", f.prime().v}, {"x", x}, {"mod_exp", m}, {"value", y}, {"digits", yd.str()}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "f(" << x << ") mod " << f.prime().v << "^" << m << " = " << y << " = "
                  << yd.str() << "\n";
    }
    return 0;
}

int run_vdp(const Options& o, const std::string& fnspec, int mod_exp_opt) {
    Prime p(o.p);
    CompatibleFn f = load_fn(fnspec, p, zpdyn::max_mod_exp(o.p) - 1);
    int m = mod_exp_opt > 0 ? mod_exp_opt : effective_depth(o, f) + 1;
    VdpCoefficients c = vdp_coefficients(f, m);
    u64 pm = pow_u64(c.p, c.mod_exp);
    if (o.format == "json") {
        std::vector<std::string> B, b;
        for (u64 i = 0; i < pm; ++i) {
            B.push_back(c.B_padic(i).str());
            b.push_back(c.b_padic(i).str());
        }
        json j{{"p", c.p}, {"mod_exp", c.mod_exp}, {"B", B}, {"b", b}};
        std::cout << j.dump(2) << "\n";
    } else if (o.format == "csv") {
        std::cout << "m,B,b\n";
        for (u64 i = 0; i < pm; ++i) std::cout << i << "," << c.B[i] << "," << c.b[i] << "\n";
    } else {
        std::cout << "van der Put coefficients mod " << c.p << "^" << c.mod_exp << ":\n";
        for (u64 i = 0; i < pm; ++i)
            std::cout << "  B_" << i << " = " << c.B[i] << "  b_" << i << " = " << c.b[i] << " = "
                      << c.b_padic(i).str() << "\n";
    }
    return 0;
}

int run_orbit(const Options& o, const std::string& fnspec, int mod_exp_opt, u64 start) {
    Prime p(o.p);
    CompatibleFn f = load_fn(fnspec, p, zpdyn::max_mod_exp(o.p) - 1);
    int m = mod_exp_opt > 0 ? mod_exp_opt : effective_depth(o, f) + 1;
    // throws when f mod p^m is not bijective; an orbit walk needs a cycle
    std::vector<u64> structure = oracle::cycle_structure_mod(f, m, o.force);
    u64 pm = pow_u64(f.prime().v, m);
    start %= pm;
    std::vector<u64> orbit;
    u64 x = start;
    do {
        orbit.push_back(x);
        x = f.eval_mod(x, m);
    } while (x != start);
    if (o.format == "json") {
        json j{{"p", f.prime().v},
               {"mod_exp", m},
               {"start", start},
               {"length", orbit.size()},
               {"orbit", orbit},
               {"cycle_structure", structure}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "orbit of " << start << " under f mod " << f.prime().v << "^" << m
                  << " (length " << orbit.size() << "):";
        for (u64 v : orbit) std::cout << " " << v;
        std::cout << "\ncycle structure:";
        for (u64 l : structure) std::cout << " " << l;
        std::cout << "\n";
    }
    return 0;
}

struct CheckArgs {
    std::string method = "general";
    std::string fnspec;
    std::string dfspec;
    std::string mult; // comma list for --method fixedS
    int S = 1;
    bool S_given = false;
    u64 anchor = 0;
    i64 c = 0;
    bool c_given = false;
    i64 r = 0;
    bool r_given = false;
};

int run_check(const Options& o, const CheckArgs& a) {
    Prime p(o.p);

    if (a.method == "cross") {
        std::string text = slurp(a.fnspec);
        std::vector<std::pair<std::string, CompatibleFn>> corpus;
        if (looks_like_json(text)) {
            json j = parse_json(text);
            if (!j.is_array()) j = json::array({j});
            int i = 0;
            for (const json& el : j) {
                std::string id = el.value("id", "#" + std::to_string(i));
                corpus.emplace_back(id, io::fn_from_json(el));
                ++i;
            }
        } else {
            corpus.emplace_back(text, CompatibleFn::from_expr_string(p, text,
                                                                     zpdyn::max_mod_exp(o.p) - 1));
        }
        int K = o.depth;
        if (!o.depth_given)
            for (const auto& [id, f] : corpus) K = std::min(K, f.depth());
        oracle::CrossReport rep = oracle::cross_validate(corpus, K, o.force);
        if (o.format == "json")
            std::cout << io::cross_to_json(rep).dump(2) << "\n";
        else
            std::cout << oracle::cross_to_csv(rep);
        return rep.all_agree ? 0 : 1;
    }

    if (a.method == "cyclic") {
        json j = parse_json(slurp(a.fnspec));
        try {
            if (j.value("repr", "") != "cyclic")
                throw precondition_error("the cyclic method needs a function with repr \"cyclic\"");
            Prime jp(j.at("p").get<int>());
            PermP phi0(jp, j.at("phi0").get<std::vector<int>>());
            std::vector<PermP> gk;
            for (const json& gi : j.at("g")) gk.emplace_back(jp, gi.get<std::vector<int>>());
            auto n = j.at("n").get<std::vector<std::vector<u64>>>();
            int K = o.depth_given ? o.depth
                                  : std::min(o.depth, j.value("depth", static_cast<int>(n.size())));
            auto nf = [&n](int k, u64 xbar) {
                if (k < 1 || static_cast<size_t>(k) > n.size() ||
                    xbar >= n[static_cast<size_t>(k - 1)].size())
                    throw precondition_error("cyclic: exponent list too short for the requested depth");
                return n[static_cast<size_t>(k - 1)][xbar];
            };
            criteria::Verdict v = criteria::check_ergodic_cyclic_subgroup(phi0, gk, nf, K);
            print_verdict(v, o.format);
            return v.all_hold() ? 0 : 1;
        } catch (const json::exception& e) {
            throw parse_error(std::string("cyclic function JSON: ") + e.what());
        }
    }

    if (a.method == "leman") {
        if (!a.c_given)
            throw precondition_error("the leman method needs --c (the constant term)");
        CompatibleFn h = load_fn(a.fnspec, p, zpdyn::max_mod_exp(o.p) - 1);
        PadicInt c = PadicInt::from_integer(a.c, h.prime(), 1);
        std::optional<PadicInt> r;
        if (a.r_given) r = PadicInt::from_integer(a.r, h.prime(), 1);
        criteria::LemanResult res = criteria::leman_sufficient(c, r, h);
        if (o.format == "json") {
            json j{{"certified", res.certified}};
            if (!res.certified) j["reason"] = res.reason;
            std::cout << j.dump(2) << "\n";
        } else if (res.certified) {
            std::cout << "certified: ergodic for every compatible inner function\n";
        } else {
            std::cout << "not certified: " << res.reason << "\n";
        }
        return res.certified ? 0 : 1;
    }

    CompatibleFn f = load_fn(a.fnspec, p, zpdyn::max_mod_exp(o.p) - 1);
    int K = effective_depth(o, f);
    criteria::Verdict v = [&] {
        if (a.method == "general") return criteria::check_ergodic_anchor_free(f, K, a.anchor);
        if (a.method == "coords") return criteria::check_measure_preserving_coords(f, K);
        if (a.method == "vdp") return criteria::check_measure_preserving_vdp(f, K);
        if (a.method == "additive") return criteria::check_ergodic_additive(f, K);
        if (a.method == "gform") {
            if (f.repr() != CompatibleFn::Repr::GForm)
                throw precondition_error(
                    "the gform method needs a function with repr \"gform\"");
            return criteria::check_ergodic_gform(f.gform_phi0(), f.gform_g(), K);
        }
        if (a.method == "affine") {
            if (f.repr() != CompatibleFn::Repr::Expr ||
                f.expr()->kind != Expr::Kind::Affine)
                throw precondition_error(
                    "the affine method needs an affine(c,[a0,...]) expression");
            return criteria::check_ergodic_perdigit_affine(f.prime(), f.expr()->affine_c,
                                                           f.expr()->affine_a, K);
        }
        if (a.method == "fixedS") {
            std::vector<int> A =
                a.mult.empty() ? derive_multipliers(f, a.S) : parse_int_list(a.mult);
            return criteria::check_ergodic_fixed_derivative(f, a.S, A, K);
        }
        if (a.method == "unifdiff") {
            if (a.dfspec.empty())
                throw precondition_error("the unifdiff method needs --df (the derivative)");
            CompatibleFn df = load_fn(a.dfspec, f.prime(), zpdyn::max_mod_exp(o.p) - 1);
            return criteria::check_ergodic_unif_diff(f, df, a.S, K);
        }
        if (a.method == "oracle") return oracle_verdict(f, K, o.force);
        throw precondition_error("unknown method '" + a.method + "'");
    }();
    print_verdict(v, o.format);
    return v.all_hold() ? 0 : 1;
}

int run_build(const Options& o, const std::string& kind, const std::string& params) {
    CompatibleFn f = [&] {
        if (kind == "ergodic") return builder::build_ergodic_seeded(Prime(o.p), o.depth, o.seed);
        if (kind == "mp") return builder::random_measure_preserving(o.seed, Prime(o.p), o.depth);
        if (params.empty())
            throw precondition_error("building the '" + kind + "' family needs --params");
        return builder::family_generators(kind, parse_json(slurp(params)));
    }();
    std::cout << io::fn_to_json(f).dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compatible dynamics on the p-adic integers: evaluate, decide, build"};
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--p", o.p, "prime modulus (default 3)");
    app.add_option("--depth", o.depth, "digit depth K to certify (default 4)");
    app.add_option("--seed", o.seed, "seed for the builders (default 1)");
    app.add_option("--format", o.format, "text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    app.add_flag("--force-depth", o.force, "allow exhaustive checks past the default ceiling");

    std::string fnspec, xspec, params;
    int mod_exp = -1;
    u64 start = 0;
    CheckArgs ca;
    std::string kind = "ergodic";

    CLI::App* eval = app.add_subcommand("eval", "evaluate f at a point mod p^m");
    eval->add_option("fn", fnspec, "function: expression, file, JSON, or - for stdin")->required();
    eval->add_option("x", xspec, "the point: integer or digit string")->required();
    eval->add_option("--mod-exp", mod_exp, "modulus exponent m (default depth+1)");

    CLI::App* vdp = app.add_subcommand("vdp", "print van der Put coefficients");
    vdp->add_option("fn", fnspec, "function: expression, file, JSON, or - for stdin")->required();
    vdp->add_option("--mod-exp", mod_exp, "coefficients below p^m (default depth+1)");

    CLI::App* orbit = app.add_subcommand("orbit", "orbit and cycle structure mod p^m");
    orbit->add_option("fn", fnspec, "function: expression, file, JSON, or - for stdin")
        ->required();
    orbit->add_option("--mod-exp", mod_exp, "modulus exponent m (default depth+1)");
    orbit->add_option("--start", start, "starting point (default 0)");

    CLI::App* check = app.add_subcommand("check", "measure preservation / ergodicity verdicts");
    check->add_option("fn", ca.fnspec, "function: expression, file, JSON, or - for stdin")
        ->required();
    check
        ->add_option("--method", ca.method,
                     "general, coords, vdp, additive, affine, gform, cyclic, fixedS, "
                     "unifdiff, leman, oracle, cross (default general)")
        ->check(CLI::IsMember({"general", "coords", "vdp", "additive", "affine", "gform",
                               "cyclic", "fixedS", "unifdiff", "leman", "oracle", "cross"}));
    check->add_option("--anchor", ca.anchor, "orbit anchor for the general method (default 0)");
    check->add_option("--S", ca.S, "structure level for fixedS/unifdiff (default 1)");
    check->add_option("--A", ca.mult, "multipliers for fixedS, comma-separated (default: derived)");
    check->add_option("--df", ca.dfspec, "derivative function for unifdiff");
    auto* copt = check->add_option("--c", ca.c, "constant term for leman");
    auto* ropt = check->add_option("--r", ca.r, "linear coefficient for leman (default absent)");

    CLI::App* build = app.add_subcommand("build", "construct functions; prints function JSON");
    build->add_option("kind", kind, "ergodic, mp, affine, leman or additive (default ergodic)");
    build->add_option("--params", params, "family parameters as JSON (file, inline, or -)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    o.depth_given = app.count("--depth") > 0;
    ca.c_given = copt->count() > 0;
    ca.r_given = ropt->count() > 0;

    try {
        if (*eval) return run_eval(o, fnspec, xspec, mod_exp);
        if (*vdp) return run_vdp(o, fnspec, mod_exp);
        if (*orbit) return run_orbit(o, fnspec, mod_exp, start);
        if (*check) return run_check(o, ca);
        if (*build) return run_build(o, kind, params);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const form_mismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const unsupported_prime& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const diff_mismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const zpdyn::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
