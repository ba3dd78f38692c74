#include "zpdyn/criteria.hpp"

#include <sstream>

#include "zpdyn/kernels.hpp"
#include "zpdyn/oracle.hpp"
#include "zpdyn/rng.hpp"

namespace zpdyn::criteria {

bool Verdict::holds_at(int k) const {
    if (k < 0 || k > certified_depth)
        throw precondition_error("holds_at: level outside the certified range");
    for (int j = 0; j <= k; ++j)
        if (levels[static_cast<size_t>(j)].status != Status::Holds) return false;
    return true;
}

int Verdict::first_failure() const {
    for (const auto& lv : levels)
        if (lv.status == Status::Fails) return lv.k;
    return -1;
}

namespace {

Verdict fresh(Verdict::Kind kind, int p, int K) {
    Verdict v;
    v.kind = kind;
    v.p = p;
    v.certified_depth = K;
    return v;
}

void hold(Verdict& v, int k) { v.levels.push_back({k, Status::Holds, {}}); }
void fail(Verdict& v, int k, std::string w) {
    v.levels.push_back({k, Status::Fails, std::move(w)});
}

// Higher levels of an ergodic verdict are meaningless once some level has
// failed (their defining orbits no longer cover the ring); mark them failed
// with a pointer at the culprit.
std::string inherited(int from) {
    return "inherited: level " + std::to_string(from) + " already failed";
}

std::string collision_text(u64 prefix, int d1, int d2, int image) {
    std::ostringstream os;
    os << "subfunction at prefix " << prefix << " is not a permutation: digits " << d1 << " and "
       << d2 << " both map to " << image;
    return os.str();
}

// Level-0 check shared by every ergodic route that sees f itself.
bool check_level0(const CompatibleFn& f, Verdict& v) {
    SubfnResult s = subfunction_perm(f, 0, 0);
    if (auto* nb = std::get_if<NotBijective>(&s)) {
        fail(v, 0, "digit-0 map is not a permutation: digits " + std::to_string(nb->d1) +
                       " and " + std::to_string(nb->d2) + " both map to " +
                       std::to_string(nb->image));
        return false;
    }
    const PermP& phi0 = std::get<PermP>(s);
    if (!phi0.is_transitive()) {
        fail(v, 0, "digit-0 permutation is not a single cycle: " + phi0.cycle_string());
        return false;
    }
    hold(v, 0);
    return true;
}

bool check_level0(const PermP& phi0, Verdict& v) {
    if (!phi0.is_transitive()) {
        fail(v, 0, "digit-0 permutation is not a single cycle: " + phi0.cycle_string());
        return false;
    }
    hold(v, 0);
    return true;
}

// Iterate over level-k prefixes: all of them when p^(k+1) stays below the
// entry cap, otherwise a fixed number of seeded random samples. Used by the
// structural form checks, whose failure mode is a thrown mismatch.
template <class Fn> void for_each_prefix(int p, int k, Fn&& body) {
    u64 pk = pow_u64(p, k);
    if (pk * static_cast<u64>(p) <= TABLE_ENTRY_CAP) {
        for (u64 xbar = 0; xbar < pk; ++xbar) body(xbar);
        return;
    }
    Rng rng(0x9E3779B97F4A7C15ULL ^ static_cast<u64>(k));
    for (int t = 0; t < 4096; ++t) body(rng.below(pk));
}

} // namespace

Verdict check_measure_preserving_coords(const CompatibleFn& f, int K) {
    if (K < 0 || K > f.depth())
        throw precondition_error("measure-preservation check: depth out of range");
    Verdict v = fresh(Verdict::Kind::MeasurePreserving, f.prime().v, K);
    for (int k = 0; k <= K; ++k) {
        kernels::SubfnScan s = kernels::scan_subfunctions(f, k);
        if (s.ok)
            hold(v, k);
        else
            fail(v, k, collision_text(s.prefix, s.d1, s.d2, s.image));
    }
    return v;
}

Verdict check_measure_preserving_vdp(const CompatibleFn& f, int K) {
    if (K < 0 || K > f.depth())
        throw precondition_error("measure-preservation check: depth out of range");
    const int p = f.prime().v;
    VdpCoefficients c = vdp_coefficients(f, K + 1);
    Verdict v = fresh(Verdict::Kind::MeasurePreserving, p, K);

    // level 0: the first p coefficients must fill every residue mod p
    {
        std::vector<int> owner(static_cast<size_t>(p), -1);
        bool ok = true;
        for (int m = 0; m < p && ok; ++m) {
            int r = c.b_mod_p(static_cast<u64>(m));
            if (owner[static_cast<size_t>(r)] >= 0) {
                fail(v, 0, collision_text(0, owner[static_cast<size_t>(r)], m, r));
                ok = false;
            } else {
                owner[static_cast<size_t>(r)] = m;
            }
        }
        if (ok) hold(v, 0);
    }

    // level k: the block above each prefix must shift it by every nonzero
    // residue; a repeat (or a zero) is exactly a subfunction collision
    for (int k = 1; k <= K; ++k) {
        u64 pk = pow_u64(p, k);
        bool ok = true;
        for (u64 xbar = 0; xbar < pk && ok; ++xbar) {
            std::vector<int> owner(static_cast<size_t>(p), -1);
            owner[0] = 0; // digit 0 shifts by 0
            for (int d = 1; d < p; ++d) {
                int r = c.b_mod_p(xbar + pk * static_cast<u64>(d));
                if (owner[static_cast<size_t>(r)] >= 0) {
                    fail(v, k, collision_text(xbar, owner[static_cast<size_t>(r)], d, r) +
                                   " (equal normalized coefficients)");
                    ok = false;
                    break;
                }
                owner[static_cast<size_t>(r)] = d;
            }
        }
        if (ok) hold(v, k);
    }
    return v;
}

// ----- transition products -----

namespace {

struct OrbitProduct {
    bool defined;
    std::string note;
    std::optional<PermP> F;
    u64 orbit_len = 0;
};

// Compose the level-k subfunction permutations along the orbit of `anchor`
// under f mod p^k, newest factor on the left. vals holds f mod p^(k+1).
OrbitProduct product_along_orbit(const std::vector<u64>& vals, int p, int k, u64 anchor) {
    u64 pk = pow_u64(p, k);
    // the orbit is a cycle only if f mod p^k is bijective
    {
        std::vector<u64> pre(pk, pk);
        for (u64 x = 0; x < pk; ++x) {
            u64 y = vals[x] % pk;
            if (pre[y] != pk)
                return {false,
                        "f mod p^" + std::to_string(k) + " is not bijective (" +
                            std::to_string(pre[y]) + " and " + std::to_string(x) + " collide)",
                        std::nullopt, 0};
            pre[y] = x;
        }
    }
    PermP F = PermP::identity(Prime(p));
    u64 x = anchor % pk, len = 0;
    do {
        std::vector<int> img(static_cast<size_t>(p));
        std::vector<int> owner(static_cast<size_t>(p), -1);
        for (int d = 0; d < p; ++d) {
            int out = static_cast<int>(vals[x + pk * static_cast<u64>(d)] / pk);
            if (owner[static_cast<size_t>(out)] >= 0)
                return {false, collision_text(x, owner[static_cast<size_t>(out)], d, out),
                        std::nullopt, 0};
            owner[static_cast<size_t>(out)] = d;
            img[static_cast<size_t>(d)] = out;
        }
        F = compose(PermP(Prime(p), std::move(img)), F);
        x = vals[x] % pk;
        ++len;
    } while (x != anchor % pk);
    return {true, {}, std::move(F), len};
}

} // namespace

std::vector<ProductLevel> transition_products(const CompatibleFn& f, int K, u64 anchor) {
    if (K < 1 || K > f.depth())
        throw precondition_error("transition_products: depth out of range");
    const int p = f.prime().v;
    std::vector<ProductLevel> out;
    for (int k = 1; k <= K; ++k) {
        std::vector<u64> vals = kernels::reduce_table(f, k + 1);
        OrbitProduct op = product_along_orbit(vals, p, k, anchor);
        out.push_back(ProductLevel{k, op.defined, op.note, op.F});
    }
    return out;
}

Verdict check_ergodic_anchor_free(const CompatibleFn& f, int K, u64 anchor) {
    if (K < 0 || K > f.depth())
        throw precondition_error("ergodicity check: depth out of range");
    const int p = f.prime().v;
    Verdict v = fresh(Verdict::Kind::Ergodic, p, K);
    check_level0(f, v);
    for (int k = 1; k <= K; ++k) {
        int ff = v.first_failure();
        if (ff >= 0) {
            fail(v, k, inherited(ff));
            continue;
        }
        std::vector<u64> vals = kernels::reduce_table(f, k + 1);
        OrbitProduct op = product_along_orbit(vals, p, k, anchor);
        if (!op.defined) {
            fail(v, k, op.note);
            continue;
        }
        // lower levels hold, so f mod p^k is transitive and the orbit is full
        if (op.orbit_len != pow_u64(p, k))
            throw error("internal: levels below " + std::to_string(k) +
                        " hold but the orbit of the anchor mod p^" + std::to_string(k) +
                        " has length " + std::to_string(op.orbit_len));
        if (op.F->is_transitive())
            hold(v, k);
        else
            fail(v, k,
                 "transition product at level " + std::to_string(k) +
                     " is not a single cycle: " + op.F->cycle_string());
    }
    return v;
}

Verdict check_ergodic_general(const CompatibleFn& f, int K) {
    return check_ergodic_anchor_free(f, K, 0);
}

// ----- additive route -----

namespace {

// Every subfunction above level 0 must be a shift by a constant depending
// only on the prefix.
void verify_shift_form(const CompatibleFn& f, int k) {
    const int p = f.prime().v;
    u64 pk = pow_u64(p, k);
    for_each_prefix(p, k, [&](u64 xbar) {
        int base = static_cast<int>(f.eval_mod(xbar, k + 1) / pk);
        for (int d = 1; d < p; ++d) {
            int got = static_cast<int>(f.eval_mod(xbar + pk * static_cast<u64>(d), k + 1) / pk);
            if (got != (base + d) % p)
                throw form_mismatch("level " + std::to_string(k) + ", prefix " +
                                    std::to_string(xbar) + ": subfunction is not a shift (digit " +
                                    std::to_string(d) + " maps to " + std::to_string(got) +
                                    ", expected " + std::to_string((base + d) % p) + ")");
        }
    });
}

} // namespace

Verdict check_ergodic_additive(const CompatibleFn& f, int K) {
    const int p = f.prime().v;
    if (p == 2) throw unsupported_prime("additive ergodicity check requires p != 2");
    if (K < 0 || K > f.depth())
        throw precondition_error("ergodicity check: depth out of range");
    if (pow_u64(p, K) > TABLE_ENTRY_CAP)
        throw precondition_error("additive check: the level-" + std::to_string(K) +
                                 " sum needs p^" + std::to_string(K) +
                                 " evaluations, above the entry cap");
    for (int k = 1; k <= K; ++k) verify_shift_form(f, k);

    Verdict v = fresh(Verdict::Kind::Ergodic, p, K);
    check_level0(f, v);
    const u64 inv2 = inv_mod_p(2, f.prime());
    for (int k = 1; k <= K; ++k) {
        int ff = v.first_failure();
        if (ff >= 0) {
            fail(v, k, inherited(ff));
            continue;
        }
        u64 pk = pow_u64(p, k), pk1 = pk * static_cast<u64>(p);
        u64 s = 0;
        for (u64 i = 0; i < pk; ++i) s = (s + f.eval_mod(i, k + 1)) % pk1;
        if (s % pk != 0)
            throw error("internal: sum of f over [0, p^" + std::to_string(k) +
                        ") is not divisible by p^" + std::to_string(k) +
                        " although lower levels hold");
        int lhs = static_cast<int>((inv2 + s / pk) % static_cast<u64>(p));
        if (k == 1) {
            // what decides level 1 is the composed shift along the digit-0
            // cycle; the k=1 reading of the sum formula is kept as a note
            int amt = 0;
            for (int x = 0; x < p; ++x)
                amt = (amt + digit_of(f.eval_mod(static_cast<u64>(x), 2), 1, p)) % p;
            v.sums.push_back({1, amt, amt != 0});
            v.notes.push_back("level-1 sum formula gives " + std::to_string(lhs) +
                              std::string(lhs == amt ? " (agrees with" : " (DISAGREES with") +
                              " the composed shift " + std::to_string(amt) + ")");
            if (amt != 0)
                hold(v, 1);
            else
                fail(v, 1, "level-1 shifts compose to the identity (total 0 mod p)");
        } else {
            v.sums.push_back({k, lhs, lhs != 0});
            if (lhs != 0)
                hold(v, k);
            else
                fail(v, k,
                     "interior sum 1/2 + p^-" + std::to_string(k) + " sum f(i) = 0 mod p");
        }
    }
    return v;
}

Verdict check_ergodic_gform(const PermP& phi0, const CompatibleFn& g, int K) {
    const int p = g.prime().v;
    if (phi0.p() != p) throw precondition_error("gform: phi0 and g disagree on p");
    if (p == 2) throw unsupported_prime("gform ergodicity check requires p != 2");
    if (K < 0 || K > g.depth() + 1)
        throw precondition_error("gform: depth out of range (g supports up to " +
                                 std::to_string(g.depth() + 1) + ")");
    if (pow_u64(p, K) > TABLE_ENTRY_CAP)
        throw precondition_error("gform check: the level-" + std::to_string(K) +
                                 " sum needs p^" + std::to_string(K) +
                                 " evaluations, above the entry cap");
    Verdict v = fresh(Verdict::Kind::Ergodic, p, K);
    check_level0(phi0, v);
    for (int k = 1; k <= K; ++k) {
        int ff = v.first_failure();
        if (ff >= 0) {
            fail(v, k, inherited(ff));
            continue;
        }
        if (k == 1) {
            int s = 0;
            for (int i = 0; i < p; ++i)
                s = (s + static_cast<int>(g.eval_mod(static_cast<u64>(i), 1))) % p;
            v.sums.push_back({1, s, s != 0});
            if (s != 0)
                hold(v, 1);
            else
                fail(v, 1, "sum of g over [0, p) is 0 mod p: level-1 shifts compose to the identity");
        } else {
            u64 pk = pow_u64(p, k), pk_1 = pk / static_cast<u64>(p);
            u64 s = 0;
            for (u64 i = 0; i < pk; ++i) s = (s + g.eval_mod(i, k)) % pk;
            if (s % pk_1 != 0)
                throw error("internal: sum of g over [0, p^" + std::to_string(k) +
                            ") is not divisible by p^" + std::to_string(k - 1));
            int lhs = static_cast<int>(s / pk_1 % static_cast<u64>(p));
            v.sums.push_back({k, lhs, lhs != 0});
            if (lhs != 0)
                hold(v, k);
            else
                fail(v, k,
                     "interior sum p^-" + std::to_string(k - 1) + " sum g(i) = 0 mod p");
        }
    }
    return v;
}

Verdict check_ergodic_cyclic_subgroup(const PermP& phi0, const std::vector<PermP>& gk,
                                      const std::function<u64(int, u64)>& n, int K) {
    const int p = phi0.p();
    if (K < 0) throw precondition_error("cyclic check: K must be >= 0");
    if (static_cast<int>(gk.size()) < K)
        throw precondition_error("cyclic check: need a generator for each level 1..K");
    for (const PermP& g : gk)
        if (g.p() != p) throw precondition_error("cyclic check: generator has a different p");
    if (pow_u64(p, K) > TABLE_ENTRY_CAP)
        throw precondition_error("cyclic check: the level-" + std::to_string(K) +
                                 " exponent sum has p^" + std::to_string(K) +
                                 " terms, above the entry cap");
    Verdict v = fresh(Verdict::Kind::Ergodic, p, K);
    check_level0(phi0, v);
    for (int k = 1; k <= K; ++k) {
        int ff = v.first_failure();
        if (ff >= 0) {
            fail(v, k, inherited(ff));
            continue;
        }
        const PermP& g = gk[static_cast<size_t>(k - 1)];
        if (!g.is_transitive()) {
            fail(v, k, "level-" + std::to_string(k) +
                           " generator is not a single cycle: " + g.cycle_string());
            continue;
        }
        u64 pk = pow_u64(p, k);
        int s = 0;
        for (u64 xbar = 0; xbar < pk; ++xbar)
            s = static_cast<int>((static_cast<u64>(s) + n(k, xbar) % static_cast<u64>(p)) %
                                 static_cast<u64>(p));
        v.sums.push_back({k, s, s != 0});
        if (s != 0)
            hold(v, k);
        else
            fail(v, k, "exponent sum over level-" + std::to_string(k) + " prefixes is 0 mod p");
    }
    return v;
}

// ----- per-digit affine -----

Verdict check_ergodic_perdigit_affine(const PadicInt& c, const std::vector<PadicInt>& a, int K) {
    Prime p(c.prime());
    for (const PadicInt& ak : a)
        if (ak.prime() != p.v)
            throw precondition_error("affine check: coefficient has a different p");
    std::vector<i64> ai;
    ai.reserve(a.size());
    for (const PadicInt& ak : a) ai.push_back(static_cast<i64>(ak.value_mod(1)));
    return check_ergodic_perdigit_affine(p, static_cast<i64>(c.value_mod(1)), ai, K);
}

Verdict check_ergodic_perdigit_affine(Prime p, i64 c, const std::vector<i64>& a, int K) {
    if (p.v == 2) throw unsupported_prime("per-digit affine check requires p != 2");
    if (K < 0) throw precondition_error("affine check: K must be >= 0");
    auto mod_p = [&](i64 v) {
        i64 r = v % p.v;
        return static_cast<int>(r < 0 ? r + p.v : r);
    };
    Verdict v = fresh(Verdict::Kind::Ergodic, p.v, K);
    int c0 = mod_p(c);
    int a0 = a.empty() ? 1 : mod_p(a[0]);
    if (c0 == 0)
        fail(v, 0, "constant term is 0 mod p: 0 is fixed mod p");
    else if (a0 != 1)
        fail(v, 0, "digit-0 multiplier is " + std::to_string(a0) + " mod p, need 1");
    else
        hold(v, 0);
    for (int k = 1; k <= K; ++k) {
        int ff = v.first_failure();
        if (ff >= 0) {
            fail(v, k, inherited(ff));
            continue;
        }
        int ak = k < static_cast<int>(a.size()) ? mod_p(a[static_cast<size_t>(k)]) : 1;
        if (ak == 1)
            hold(v, k);
        else
            fail(v, k,
                 "digit-" + std::to_string(k) + " multiplier is " + std::to_string(ak) +
                     " mod p, need 1");
    }
    return v;
}

// ----- fixed multiplier above level S -----

namespace {

void verify_fixed_multiplier_form(const CompatibleFn& f, int k, int S,
                                  const std::vector<int>& A) {
    const int p = f.prime().v;
    u64 pk = pow_u64(p, k);
    u64 pS = pow_u64(p, S);
    for_each_prefix(p, k, [&](u64 xbar) {
        int base = static_cast<int>(f.eval_mod(xbar, k + 1) / pk);
        int mult = A[xbar % pS];
        for (int d = 1; d < p; ++d) {
            int got = static_cast<int>(f.eval_mod(xbar + pk * static_cast<u64>(d), k + 1) / pk);
            int want = (mult * d + base) % p;
            if (got != want)
                throw form_mismatch(
                    "level " + std::to_string(k) + ", prefix " + std::to_string(xbar) +
                    ": subfunction is not d -> " + std::to_string(mult) + "*d + alpha (digit " +
                    std::to_string(d) + " maps to " + std::to_string(got) + ", expected " +
                    std::to_string(want) + ")");
        }
    });
}

} // namespace

Verdict check_ergodic_fixed_derivative(const CompatibleFn& f, int S, const std::vector<int>& A,
                                       int K) {
    const int p = f.prime().v;
    if (p == 2) throw unsupported_prime("fixed-multiplier ergodicity check requires p != 2");
    if (S < 1 || S > K) throw precondition_error("fixed-multiplier check: need 1 <= S <= K");
    if (K > f.depth()) throw precondition_error("ergodicity check: depth out of range");
    u64 pS = pow_u64(p, S);
    if (A.size() != pS)
        throw precondition_error("fixed-multiplier check: need one multiplier per level-S prefix");
    for (int Ai : A)
        if (Ai < 0 || Ai >= p)
            throw precondition_error("fixed-multiplier check: multiplier out of range");
    if (pow_u64(p, K) > TABLE_ENTRY_CAP)
        throw precondition_error("fixed-multiplier check: the level-" + std::to_string(K) +
                                 " sum needs p^" + std::to_string(K) +
                                 " evaluations, above the entry cap");
    for (int k = S; k <= K; ++k) verify_fixed_multiplier_form(f, k, S, A);

    Verdict v = fresh(Verdict::Kind::Ergodic, p, K);
    // below and at S the structure is unconstrained; decide by exhaustion
    for (int k = 0; k <= S; ++k) {
        int ff = v.first_failure();
        if (ff >= 0) {
            fail(v, k, inherited(ff));
            continue;
        }
        oracle::SingleCycle sc = oracle::is_single_cycle_mod(f, k + 1);
        if (!sc.bijective)
            fail(v, k,
                 "f mod p^" + std::to_string(k + 1) + " is not bijective (" +
                     std::to_string(sc.x1) + " and " + std::to_string(sc.x2) + " collide)");
        else if (!sc.single)
            fail(v, k,
                 "f mod p^" + std::to_string(k + 1) + " splits into several cycles (orbit of 0 has length " +
                     std::to_string(sc.orbit_len) + ")");
        else
            hold(v, k);
    }

    int prodA = 1;
    for (int Ai : A) prodA = prodA * Ai % p;

    std::vector<u64> it;     // orbit of 0 under f mod p^S, plus the closing step
    std::vector<int> tau;    // tau[i] = prod_{j>i} A[it[j]], j < p^S
    if (v.first_failure() < 0) {
        it.resize(pS + 1);
        it[0] = 0;
        for (u64 j = 0; j < pS; ++j) it[j + 1] = f.eval_mod(it[j], S);
        // suffix products: tau[i] = A[it[i+1]] * ... * A[it[p^S - 1]]
        tau.assign(pS, 1);
        for (i64 i = static_cast<i64>(pS) - 2; i >= 0; --i)
            tau[static_cast<size_t>(i)] =
                tau[static_cast<size_t>(i) + 1] * A[it[static_cast<size_t>(i) + 1]] % p;

        // level-S diagnostic: the same interior sum evaluated one level down
        u64 pS1 = pS * static_cast<u64>(p);
        int D = 0;
        for (u64 i = 0; i < pS; ++i) {
            u64 ev = f.eval_mod(it[i], S + 1);
            u64 diff = (ev + pS1 - it[i + 1]) % pS1;
            if (diff % pS != 0)
                throw error("internal: f(it) mod p^(S+1) does not refine the mod-p^S orbit");
            D = (D + tau[i] * static_cast<int>(diff / pS % static_cast<u64>(p))) % p;
        }
        bool predicted = prodA == 1 && D != 0;
        v.notes.push_back("level-" + std::to_string(S) + " diagnostic: multiplier product " +
                          std::to_string(prodA) + ", interior sum " + std::to_string(D) +
                          ", predicted " + (predicted ? "Holds" : "Fails"));
    }

    const int inv2 = static_cast<int>(inv_mod_p(2, f.prime()));
    for (int k = S + 1; k <= K; ++k) {
        int ff = v.first_failure();
        if (ff >= 0) {
            fail(v, k, inherited(ff));
            continue;
        }
        if (prodA != 1) {
            fail(v, k,
                 "product of the multipliers is " + std::to_string(prodA) + " mod p, need 1");
            continue;
        }
        u64 pk = pow_u64(p, k), pk1 = pk * static_cast<u64>(p);
        u64 pkS = pow_u64(p, k - S);
        int tot = 0;
        for (u64 i = 0; i < pS; ++i) {
            int ti = tau[i];
            u64 sb = 0;
            for (u64 beta = 0; beta < pkS; ++beta)
                sb = (sb + f.eval_mod(it[i] + pS * beta, k + 1)) % pk1;
            u64 br = (pkS % pk1 * it[i + 1] % pk1 + pk1 - sb) % pk1;
            if (br % pk != 0)
                throw error("internal: level-" + std::to_string(k) + " bracket at orbit index " +
                            std::to_string(i) + " is not divisible by p^" + std::to_string(k));
            int q = static_cast<int>(br / pk % static_cast<u64>(p));
            tot = (tot + ti * inv2) % p;
            tot = (tot + p - ti * q % p) % p;
        }
        v.sums.push_back({k, tot, tot != 0});
        if (tot != 0)
            hold(v, k);
        else
            fail(v, k, "interior sum at level " + std::to_string(k) + " is 0 mod p");
    }
    return v;
}

Verdict check_ergodic_unif_diff(const CompatibleFn& f, const CompatibleFn& df, int S, int K) {
    const int p = f.prime().v;
    if (df.prime().v != p) throw precondition_error("derivative has a different p");
    if (p == 2) throw unsupported_prime("uniform-differentiability check requires p != 2");
    if (S < 1 || S > K) throw precondition_error("uniform-differentiability check: need 1 <= S <= K");
    if (K > f.depth()) throw precondition_error("ergodicity check: depth out of range");
    // the increment relation defines "differentiable beyond S"
    for (int k = S + 1; k <= K; ++k) {
        u64 pk = pow_u64(p, k), pk1 = pk * static_cast<u64>(p);
        for_each_prefix(p, k, [&](u64 x) {
            u64 fx = f.eval_mod(x, k + 1);
            u64 dfx = df.eval_mod(x, 1);
            for (int h = 1; h < p; ++h) {
                u64 lhs = f.eval_mod(x + pk * static_cast<u64>(h), k + 1);
                u64 rhs = (fx + pk % pk1 * static_cast<u64>(h) % pk1 * dfx) % pk1;
                if (lhs != rhs)
                    throw diff_mismatch("f(x + p^k h) != f(x) + p^k h f'(x) mod p^(k+1) at x = " +
                                        std::to_string(x) + ", h = " + std::to_string(h) +
                                        ", k = " + std::to_string(k));
            }
        });
    }
    u64 pS = pow_u64(p, S);
    std::vector<int> A(pS);
    for (u64 i = 0; i < pS; ++i) A[i] = static_cast<int>(df.eval_mod(i, 1));
    return check_ergodic_fixed_derivative(f, S, A, K);
}

LemanResult leman_sufficient(const PadicInt& c, const std::optional<PadicInt>& r,
                             const CompatibleFn& h) {
    const int p = h.prime().v;
    if (c.prime() != p) throw precondition_error("constant term has a different p");
    if (r && r->prime() != p) throw precondition_error("linear coefficient has a different p");
    if (p == 2) throw unsupported_prime("the sufficient condition requires p != 2");
    if (c.value_mod(1) == 0)
        return {false, "constant term is 0 mod p"};
    if (r && r->value_mod(1) != 1)
        return {false, "linear coefficient is " + std::to_string(r->value_mod(1)) +
                           " mod p, need 1"};
    return {true, {}};
}

} // namespace zpdyn::criteria
