#pragma once

#include <vector>

#include "zpdyn/func.hpp"

// The data-parallel inner loops, each in two builds: the default entry
// point (OpenMP when available) and a plain-loop *_serial reference. The
// two must agree bit for bit -- witnesses are always the minimal failing
// index, independent of thread count -- and the unit tests plus
// tools/bench_kernels.cpp hold them to that.

namespace zpdyn::kernels {

bool parallel_enabled();

// vals[x] = f(x) mod p^m for all x < p^m.
std::vector<u64> reduce_table(const CompatibleFn& f, int m);
std::vector<u64> reduce_table_serial(const CompatibleFn& f, int m);

// Scan every level-k prefix; report the smallest prefix whose subfunction
// is not a permutation, along with the colliding digit pair.
struct SubfnScan {
    bool ok;
    u64 prefix;
    int d1, d2, image;
};
SubfnScan scan_subfunctions(const CompatibleFn& f, int k);
SubfnScan scan_subfunctions_serial(const CompatibleFn& f, int k);

// Congruence sweep behind is_compatible_up_to; first failure in
// (k asc, x asc, h asc) order.
CompatResult compat_sweep(const std::function<u64(u64)>& raw, Prime p, int K);
CompatResult compat_sweep_serial(const std::function<u64(u64)>& raw, Prime p, int K);

} // namespace zpdyn::kernels
