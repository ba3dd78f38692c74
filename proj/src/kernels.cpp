#include "zpdyn/kernels.hpp"

#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace zpdyn::kernels {

bool parallel_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

// Preconditions are validated before entering any parallel region so no
// exception can escape a worker thread.

static void check_reduce_args(const CompatibleFn& f, int m) {
    if (m < 1 || m > f.max_mod_exp())
        throw precondition_error("reduce_table: modulus exponent out of range");
    if (pow_u64(f.prime().v, m) > TABLE_ENTRY_CAP)
        throw precondition_error("reduce_table: p^m exceeds the entry cap");
}

std::vector<u64> reduce_table_serial(const CompatibleFn& f, int m) {
    check_reduce_args(f, m);
    u64 pm = pow_u64(f.prime().v, m);
    std::vector<u64> vals(pm);
    for (u64 x = 0; x < pm; ++x) vals[x] = f.eval_mod(x, m);
    return vals;
}

std::vector<u64> reduce_table(const CompatibleFn& f, int m) {
    check_reduce_args(f, m);
    u64 pm = pow_u64(f.prime().v, m);
    std::vector<u64> vals(pm);
    const i64 n = static_cast<i64>(pm);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n > 4096)
#endif
    for (i64 x = 0; x < n; ++x) vals[static_cast<u64>(x)] = f.eval_mod(static_cast<u64>(x), m);
    return vals;
}

static SubfnScan scan_one_prefix(const CompatibleFn& f, int k, u64 prefix) {
    SubfnResult r = subfunction_perm(f, k, prefix);
    if (auto* nb = std::get_if<NotBijective>(&r))
        return SubfnScan{false, prefix, nb->d1, nb->d2, nb->image};
    return SubfnScan{true, 0, 0, 0, 0};
}

static void check_scan_args(const CompatibleFn& f, int k) {
    if (k < 0 || k > f.depth())
        throw precondition_error("scan_subfunctions: level out of range");
    if (pow_u64(f.prime().v, k + 1) > TABLE_ENTRY_CAP)
        throw precondition_error("scan_subfunctions: p^(k+1) exceeds the entry cap");
}

SubfnScan scan_subfunctions_serial(const CompatibleFn& f, int k) {
    check_scan_args(f, k);
    u64 pk = pow_u64(f.prime().v, k);
    for (u64 pre = 0; pre < pk; ++pre) {
        SubfnScan s = scan_one_prefix(f, k, pre);
        if (!s.ok) return s;
    }
    return SubfnScan{true, 0, 0, 0, 0};
}

SubfnScan scan_subfunctions(const CompatibleFn& f, int k) {
    check_scan_args(f, k);
    u64 pk = pow_u64(f.prime().v, k);
    std::atomic<u64> best(pk); // smallest failing prefix seen so far
    const i64 n = static_cast<i64>(pk);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n > 1024)
#endif
    for (i64 i = 0; i < n; ++i) {
        u64 pre = static_cast<u64>(i);
        if (pre >= best.load(std::memory_order_relaxed)) continue;
        SubfnScan s = scan_one_prefix(f, k, pre);
        if (!s.ok) {
            u64 cur = best.load(std::memory_order_relaxed);
            while (pre < cur && !best.compare_exchange_weak(cur, pre)) {
            }
        }
    }
    u64 found = best.load();
    if (found == pk) return SubfnScan{true, 0, 0, 0, 0};
    return scan_one_prefix(f, k, found); // recompute the witness digits
}

static void check_compat_args(Prime p, int K) {
    if (K < 0) throw precondition_error("compat_sweep: K must be >= 0");
    if (pow_u64(p.v, K + 1) > TABLE_ENTRY_CAP)
        throw precondition_error("compat_sweep: p^(K+1) exceeds the entry cap");
}

CompatResult compat_sweep_serial(const std::function<u64(u64)>& raw, Prime p, int K) {
    check_compat_args(p, K);
    // cache raw on [0, p^(K+1)) once; every congruence reads from here
    u64 top = pow_u64(p.v, K + 1);
    std::vector<u64> vals(top);
    for (u64 x = 0; x < top; ++x) vals[x] = raw(x);
    for (int k = 1; k <= K; ++k) {
        u64 pk = pow_u64(p.v, k);
        for (u64 x = 0; x < pk; ++x)
            for (int h = 1; h < p.v; ++h)
                if ((vals[x + pk * static_cast<u64>(h)] % pk) != (vals[x] % pk))
                    return CompatResult{false, {k, x, h}};
    }
    return CompatResult{true, {0, 0, 0}};
}

CompatResult compat_sweep(const std::function<u64(u64)>& raw, Prime p, int K) {
    check_compat_args(p, K);
    u64 top = pow_u64(p.v, K + 1);
    std::vector<u64> vals(top);
    const i64 n = static_cast<i64>(top);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n > 4096)
#endif
    for (i64 x = 0; x < n; ++x) vals[static_cast<u64>(x)] = raw(static_cast<u64>(x));
    // levels in order; within a level find the minimal failing x
    for (int k = 1; k <= K; ++k) {
        u64 pk = pow_u64(p.v, k);
        std::atomic<u64> best(pk);
        const i64 nk = static_cast<i64>(pk);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (nk > 1024)
#endif
        for (i64 i = 0; i < nk; ++i) {
            u64 x = static_cast<u64>(i);
            if (x >= best.load(std::memory_order_relaxed)) continue;
            for (int h = 1; h < p.v; ++h) {
                if ((vals[x + pk * static_cast<u64>(h)] % pk) != (vals[x] % pk)) {
                    u64 cur = best.load(std::memory_order_relaxed);
                    while (x < cur && !best.compare_exchange_weak(cur, x)) {
                    }
                    break;
                }
            }
        }
        u64 x = best.load();
        if (x < pk)
            for (int h = 1; h < p.v; ++h)
                if ((vals[x + pk * static_cast<u64>(h)] % pk) != (vals[x] % pk))
                    return CompatResult{false, {k, x, h}};
    }
    return CompatResult{true, {0, 0, 0}};
}

} // namespace zpdyn::kernels
