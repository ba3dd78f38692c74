#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "zpdyn/builder.hpp"
#include "zpdyn/kernels.hpp"

// Times the OpenMP kernels against their serial reference twins and checks
// that the results (including failure witnesses) are bit-identical.
// --smoke shrinks the sizes so the comparison can run on every ctest pass.

using namespace zpdyn;

namespace {

template <class F> double time_ms(F&& body) {
    auto t0 = std::chrono::steady_clock::now();
    body();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

bool g_all_ok = true;

void report(const char* name, u64 n, double serial_ms, double parallel_ms, bool ok) {
    std::printf("%-22s n=%9llu  serial %9.2f ms  parallel %9.2f ms  x%5.2f  %s\n", name,
                static_cast<unsigned long long>(n), serial_ms, parallel_ms,
                parallel_ms > 0 ? serial_ms / parallel_ms : 0.0, ok ? "match" : "MISMATCH");
    g_all_ok = g_all_ok && ok;
}

} // namespace

int main(int argc, char** argv) {
    bool smoke = argc > 1 && std::strcmp(argv[1], "--smoke") == 0;
    Prime p(3);
    int m = smoke ? 8 : 13; // 3^13 is the largest reduction under the entry cap

    std::printf("OpenMP kernels: %s\n", kernels::parallel_enabled() ? "enabled" : "disabled");

    CompatibleFn poly =
        CompatibleFn::from_expr_string(p, "x*x*x + 2*x + 1", zpdyn::max_mod_exp(p.v) - 1);
    {
        std::vector<u64> a, b;
        double ts = time_ms([&] { a = kernels::reduce_table_serial(poly, m); });
        double tp = time_ms([&] { b = kernels::reduce_table(poly, m); });
        report("reduce_table", pow_u64(p.v, m), ts, tp, a == b);
    }

    // x*x has non-bijective subfunctions everywhere; the scan must report
    // the smallest failing prefix no matter how the work is split
    CompatibleFn square = CompatibleFn::from_expr_string(p, "x*x", zpdyn::max_mod_exp(p.v) - 1);
    {
        int k = m - 1;
        kernels::SubfnScan sa{}, sb{};
        double ts = time_ms([&] { sa = kernels::scan_subfunctions_serial(square, k); });
        double tp = time_ms([&] { sb = kernels::scan_subfunctions(square, k); });
        bool ok = sa.ok == sb.ok && sa.prefix == sb.prefix && sa.d1 == sb.d1 && sa.d2 == sb.d2 &&
                  sa.image == sb.image;
        report("scan_subfunctions", pow_u64(p.v, k), ts, tp, ok);
    }
    {
        CompatibleFn erg = builder::build_ergodic_seeded(p, smoke ? 6 : 8, 42);
        int k = erg.depth();
        kernels::SubfnScan sa{}, sb{};
        double ts = time_ms([&] { sa = kernels::scan_subfunctions_serial(erg, k); });
        double tp = time_ms([&] { sb = kernels::scan_subfunctions(erg, k); });
        bool ok = sa.ok == sb.ok && sa.prefix == sb.prefix;
        report("scan (all pass)", pow_u64(p.v, k), ts, tp, ok && sa.ok);
    }

    {
        int K = m - 1;
        auto good = [&](u64 x) { return poly.eval_mod(x, K + 1); };
        CompatResult ra{}, rb{};
        double ts = time_ms([&] { ra = kernels::compat_sweep_serial(good, p, K); });
        double tp = time_ms([&] { rb = kernels::compat_sweep(good, p, K); });
        bool ok = ra.certified == rb.certified;
        report("compat_sweep (good)", pow_u64(p.v, K + 1), ts, tp, ok && ra.certified);
    }
    {
        int K = m - 1;
        auto bad = [](u64 x) { return x >> 1; }; // drops low digits: not 1-Lipschitz
        CompatResult ra{}, rb{};
        double ts = time_ms([&] { ra = kernels::compat_sweep_serial(bad, p, K); });
        double tp = time_ms([&] { rb = kernels::compat_sweep(bad, p, K); });
        bool ok = ra.certified == rb.certified && ra.witness.k == rb.witness.k &&
                  ra.witness.x == rb.witness.x && ra.witness.h == rb.witness.h;
        report("compat_sweep (bad)", pow_u64(p.v, K + 1), ts, tp, ok && !ra.certified);
    }

    if (!g_all_ok) {
        std::printf("FAIL: kernels disagree with the serial reference\n");
        return 1;
    }
    std::printf("all kernels match the serial reference\n");
    return 0;
}
