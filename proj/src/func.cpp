#include "zpdyn/func.hpp"

#include <sstream>

#include "zpdyn/kernels.hpp"

namespace zpdyn {

struct CompatibleFn::Impl {
    Prime p;
    int depth;
    Repr kind;
    ExprPtr e;
    std::vector<std::vector<int>> tables;
    std::vector<u64> B;
    int vdp_m = 0;
    std::optional<PermP> phi0;
    std::shared_ptr<const CompatibleFn> g;
    Impl(Prime p_, int depth_, Repr kind_) : p(p_), depth(depth_), kind(kind_) {}
};

CompatibleFn CompatibleFn::from_expr(Prime p, ExprPtr e, int depth) {
    if (!e) throw precondition_error("null expression");
    if (depth < 0) throw precondition_error("depth must be >= 0");
    if (depth + 1 > zpdyn::max_mod_exp(p.v))
        throw precondition_error("depth " + std::to_string(depth) + " too deep for p=" +
                                 std::to_string(p.v) + " with 64-bit evaluation (max level " +
                                 std::to_string(zpdyn::max_mod_exp(p.v) - 1) + ")");
    auto impl = std::make_shared<Impl>(p, depth, Repr::Expr);
    impl->e = std::move(e);
    return CompatibleFn(std::move(impl));
}

CompatibleFn CompatibleFn::from_expr_string(Prime p, const std::string& src, int depth) {
    return from_expr(p, parse_expr(src), depth);
}

CompatibleFn CompatibleFn::from_tables(Prime p, std::vector<std::vector<int>> tables) {
    if (tables.empty()) throw precondition_error("need at least the level-0 table");
    u64 total = 0, want = static_cast<u64>(p.v);
    for (size_t k = 0; k < tables.size(); ++k) {
        if (tables[k].size() != want)
            throw precondition_error("level-" + std::to_string(k) + " table must have p^" +
                                     std::to_string(k + 1) + " entries");
        for (int d : tables[k])
            if (d < 0 || d >= p.v) throw precondition_error("table digit out of range");
        total += want;
        if (total > TABLE_ENTRY_CAP)
            throw precondition_error("table function exceeds the " +
                                     std::to_string(TABLE_ENTRY_CAP) + "-entry cap");
        want *= static_cast<u64>(p.v);
    }
    auto impl = std::make_shared<Impl>(p, static_cast<int>(tables.size()) - 1, Repr::Table);
    impl->tables = std::move(tables);
    return CompatibleFn(std::move(impl));
}

CompatibleFn CompatibleFn::from_vdp(Prime p, int mod_exp, std::vector<u64> B) {
    if (mod_exp < 1) throw precondition_error("vdp mod_exp must be >= 1");
    u64 pm = pow_u64(p.v, mod_exp);
    if (pm > TABLE_ENTRY_CAP)
        throw precondition_error("vdp coefficient array exceeds the entry cap");
    if (B.size() != pm)
        throw precondition_error("need exactly p^" + std::to_string(mod_exp) +
                                 " vdp coefficients");
    for (u64 m = 0; m < pm; ++m) {
        if (B[m] >= pm) throw precondition_error("vdp coefficient out of range");
        int j = m == 0 ? 0 : digit_count(m, p.v) - 1;
        if (j > 0 && B[m] % pow_u64(p.v, j) != 0)
            throw compatibility_error("vdp coefficient B_" + std::to_string(m) +
                                          " = " + std::to_string(B[m]) +
                                          " is not divisible by p^" + std::to_string(j) +
                                          "; the series is not 1-Lipschitz",
                                      m);
    }
    auto impl = std::make_shared<Impl>(p, mod_exp - 1, Repr::Vdp);
    impl->B = std::move(B);
    impl->vdp_m = mod_exp;
    return CompatibleFn(std::move(impl));
}

CompatibleFn CompatibleFn::gform(const PermP& phi0, const CompatibleFn& g) {
    Prime p = g.prime();
    if (phi0.p() != p.v) throw precondition_error("phi0 and g disagree on p");
    int depth = g.depth() + 1;
    if (depth + 1 > zpdyn::max_mod_exp(p.v)) depth = zpdyn::max_mod_exp(p.v) - 1;
    auto impl = std::make_shared<Impl>(p, depth, Repr::GForm);
    impl->phi0 = phi0;
    impl->g = std::make_shared<const CompatibleFn>(g);
    return CompatibleFn(std::move(impl));
}

Prime CompatibleFn::prime() const { return impl_->p; }
CompatibleFn::Repr CompatibleFn::repr() const { return impl_->kind; }
int CompatibleFn::depth() const { return impl_->depth; }

u64 CompatibleFn::eval_mod(u64 x, int m) const {
    if (m == 0) return 0;
    if (m < 0 || m > max_mod_exp())
        throw precondition_error("eval_mod: modulus exponent " + std::to_string(m) +
                                 " outside certified range (max " +
                                 std::to_string(max_mod_exp()) + ")");
    const int p = impl_->p.v;
    const u64 pm = pow_u64(p, m);
    x %= pm;
    switch (impl_->kind) {
    case Repr::Expr:
        return expr_eval_mod(*impl_->e, x, p, m);
    case Repr::Table: {
        u64 r = 0, pk = 1;
        for (int k = 0; k < m; ++k) {
            u64 v = x % (pk * static_cast<u64>(p));
            r += static_cast<u64>(impl_->tables[static_cast<size_t>(k)][v]) * pk;
            pk *= static_cast<u64>(p);
        }
        return r;
    }
    case Repr::Vdp: {
        // telescoped series: only the prefixes of x contribute
        u64 r = impl_->B[x % static_cast<u64>(p)] % pm;
        u64 pj = static_cast<u64>(p);
        for (int j = 2; j <= m; ++j) {
            pj *= static_cast<u64>(p);
            if (digit_of(x, j - 1, p) != 0) r = (r + impl_->B[x % pj]) % pm;
        }
        return r;
    }
    case Repr::GForm: {
        u64 x0 = x % static_cast<u64>(p);
        u64 r = ((*impl_->phi0)(static_cast<int>(x0)) + (x - x0)) % pm;
        if (m > 1) r = (r + static_cast<u64>(p) * impl_->g->eval_mod(x, m - 1)) % pm;
        return r;
    }
    }
    throw error("unreachable repr");
}

static void want_repr(const CompatibleFn& f, CompatibleFn::Repr r, const char* what) {
    if (f.repr() != r) throw precondition_error(std::string("not a ") + what + " function");
}

const ExprPtr& CompatibleFn::expr() const {
    want_repr(*this, Repr::Expr, "expression");
    return impl_->e;
}
const std::vector<std::vector<int>>& CompatibleFn::tables() const {
    want_repr(*this, Repr::Table, "table");
    return impl_->tables;
}
const std::vector<u64>& CompatibleFn::vdp_B() const {
    want_repr(*this, Repr::Vdp, "vdp");
    return impl_->B;
}
int CompatibleFn::vdp_mod_exp() const {
    want_repr(*this, Repr::Vdp, "vdp");
    return impl_->vdp_m;
}
const PermP& CompatibleFn::gform_phi0() const {
    want_repr(*this, Repr::GForm, "gform");
    return *impl_->phi0;
}
const CompatibleFn& CompatibleFn::gform_g() const {
    want_repr(*this, Repr::GForm, "gform");
    return *impl_->g;
}

// ----- structural views -----

int digit_count(u64 m, int p) {
    int n = 1;
    m /= static_cast<u64>(p);
    while (m > 0) {
        ++n;
        m /= static_cast<u64>(p);
    }
    return n;
}

int chi(Prime p, u64 m, Residue x) {
    int n = digit_count(m, p.v);
    if (x.level < n)
        throw precondition_error("chi(m=" + std::to_string(m) + ", x): x is only known mod p^" +
                                 std::to_string(x.level) + " but the ball has radius p^-" +
                                 std::to_string(n));
    return x.value % pow_u64(p.v, n) == m ? 1 : 0;
}

PadicInt VdpCoefficients::B_padic(u64 m) const {
    return PadicInt::from_integer(static_cast<i64>(B[m]), Prime(p), mod_exp);
}

PadicInt VdpCoefficients::b_padic(u64 m) const {
    int j = m == 0 ? 0 : digit_count(m, p) - 1;
    return PadicInt::from_integer(static_cast<i64>(b[m]), Prime(p), mod_exp - j);
}

VdpCoefficients vdp_coefficients(const CompatibleFn& f, int mod_exp) {
    const int p = f.prime().v;
    if (mod_exp < 1) throw precondition_error("vdp_coefficients: mod_exp must be >= 1");
    if (mod_exp > f.max_mod_exp())
        throw precondition_error("vdp_coefficients: function not certified to mod exponent " +
                                 std::to_string(mod_exp));
    u64 pm = pow_u64(p, mod_exp);
    if (pm > TABLE_ENTRY_CAP)
        throw precondition_error("vdp_coefficients: p^mod_exp exceeds the entry cap");

    std::vector<u64> vals = kernels::reduce_table(f, mod_exp);
    VdpCoefficients c{p, mod_exp, std::vector<u64>(pm), std::vector<u64>(pm)};
    for (u64 m = 0; m < pm; ++m) {
        if (m < static_cast<u64>(p)) {
            c.B[m] = vals[m];
            c.b[m] = vals[m];
            continue;
        }
        int j = digit_count(m, p) - 1;
        u64 pj = pow_u64(p, j);
        u64 Bm = (vals[m] + pm - vals[m % pj]) % pm;
        if (Bm % pj != 0)
            throw compatibility_error(
                "B_" + std::to_string(m) + " = " + std::to_string(Bm) +
                    " is not divisible by p^" + std::to_string(j) +
                    "; the evaluator is not 1-Lipschitz at m = " + std::to_string(m),
                m);
        c.B[m] = Bm;
        c.b[m] = Bm / pj;
    }
    return c;
}

u64 vdp_eval(const VdpCoefficients& c, Residue x) {
    if (x.level < 1 || x.level > c.mod_exp)
        throw precondition_error("vdp_eval: residue level outside coefficient range");
    const int p = c.p;
    u64 pm = pow_u64(p, x.level);
    u64 xv = x.value % pm;
    u64 r = c.B[xv % static_cast<u64>(p)] % pm;
    u64 pj = static_cast<u64>(p);
    for (int j = 2; j <= x.level; ++j) {
        pj *= static_cast<u64>(p);
        if (digit_of(xv, j - 1, p) != 0) r = (r + c.B[xv % pj]) % pm;
    }
    return r;
}

int coordinate_fn(const CompatibleFn& f, int k, u64 xbar) {
    const int p = f.prime().v;
    if (k < 0 || k > f.depth()) throw precondition_error("coordinate_fn: level out of range");
    u64 pk1 = pow_u64(p, k + 1);
    if (xbar >= pk1) throw precondition_error("coordinate_fn: prefix must be < p^(k+1)");
    return digit_of(f.eval_mod(xbar, k + 1), k, p);
}

SubfnResult subfunction_perm(const CompatibleFn& f, int k, u64 prefix) {
    const int p = f.prime().v;
    if (k < 0 || k > f.depth()) throw precondition_error("subfunction_perm: level out of range");
    u64 pk = pow_u64(p, k);
    if (prefix >= pk) throw precondition_error("subfunction_perm: prefix must be < p^k");
    std::vector<int> img(static_cast<size_t>(p));
    std::vector<int> pre(static_cast<size_t>(p), -1);
    for (int d = 0; d < p; ++d) {
        u64 v = f.eval_mod(prefix + pk * static_cast<u64>(d), k + 1);
        int out = static_cast<int>(v / pk % static_cast<u64>(p));
        if (pre[static_cast<size_t>(out)] >= 0)
            return NotBijective{pre[static_cast<size_t>(out)], d, out};
        pre[static_cast<size_t>(out)] = d;
        img[static_cast<size_t>(d)] = out;
    }
    return PermP(Prime(p), std::move(img));
}

CompatResult is_compatible_up_to(const std::function<u64(u64)>& raw, Prime p, int K) {
    return kernels::compat_sweep(raw, p, K);
}

std::vector<u64> reduce_fn(const CompatibleFn& f, int k) {
    if (k < 0 || k > f.depth()) throw precondition_error("reduce_fn: level out of range");
    return kernels::reduce_table(f, k + 1);
}

std::vector<std::vector<int>> to_tables(const CompatibleFn& f, int K) {
    const int p = f.prime().v;
    if (K < 0 || K > f.depth()) throw precondition_error("to_tables: depth out of range");
    u64 total = 0, sz = static_cast<u64>(p);
    for (int k = 0; k <= K; ++k) {
        total += sz;
        sz *= static_cast<u64>(p);
    }
    if (total > TABLE_ENTRY_CAP)
        throw precondition_error("to_tables: materialization exceeds the entry cap");
    std::vector<std::vector<int>> tables(static_cast<size_t>(K + 1));
    for (int k = 0; k <= K; ++k) {
        std::vector<u64> vals = kernels::reduce_table(f, k + 1);
        u64 pk = pow_u64(p, k);
        tables[static_cast<size_t>(k)].resize(vals.size());
        for (u64 v = 0; v < vals.size(); ++v)
            tables[static_cast<size_t>(k)][v] = static_cast<int>(vals[v] / pk);
    }
    return tables;
}

} // namespace zpdyn
