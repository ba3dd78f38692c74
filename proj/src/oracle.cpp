#include "zpdyn/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>

#include "zpdyn/criteria.hpp"
#include "zpdyn/kernels.hpp"

namespace zpdyn::oracle {

int depth_ceiling(int p) {
    if (p == 3) return 8;
    if (p == 5) return 6;
    int m = 1;
    while (pow_u64(p, m + 1) <= TABLE_ENTRY_CAP) ++m;
    return m;
}

static void gate_depth(const CompatibleFn& f, int m, bool force) {
    if (m < 1) throw precondition_error("oracle: modulus exponent must be >= 1");
    if (m > f.max_mod_exp())
        throw precondition_error("oracle: function not certified to mod exponent " +
                                 std::to_string(m));
    int ceil = depth_ceiling(f.prime().v);
    if (m > ceil) {
        if (!force)
            throw precondition_error("oracle: exponent " + std::to_string(m) +
                                     " above the default ceiling " + std::to_string(ceil) +
                                     " for p = " + std::to_string(f.prime().v) +
                                     "; pass force (--force-depth on the command line) to run anyway");
        std::fprintf(stderr, "oracle: forcing exhaustive check at p^%d (%llu evaluations)\n", m,
                     static_cast<unsigned long long>(pow_u64(f.prime().v, m)));
    }
}

Bijectivity is_bijective_mod(const CompatibleFn& f, int m, bool force) {
    gate_depth(f, m, force);
    std::vector<u64> vals = kernels::reduce_table(f, m);
    u64 pm = vals.size();
    std::vector<u64> pre(pm, pm); // pm = unseen
    for (u64 x = 0; x < pm; ++x) {
        u64 y = vals[x];
        if (pre[y] != pm) return Bijectivity{false, pre[y], x};
        pre[y] = x;
    }
    return Bijectivity{true, 0, 0};
}

SingleCycle is_single_cycle_mod(const CompatibleFn& f, int m, bool force) {
    gate_depth(f, m, force);
    std::vector<u64> vals = kernels::reduce_table(f, m);
    u64 pm = vals.size();
    std::vector<u64> pre(pm, pm);
    for (u64 x = 0; x < pm; ++x) {
        u64 y = vals[x];
        if (pre[y] != pm) return SingleCycle{false, pre[y], x, false, 0};
        pre[y] = x;
    }
    u64 len = 0, x = 0;
    do {
        x = vals[x];
        ++len;
    } while (x != 0);
    return SingleCycle{true, 0, 0, len == pm, len};
}

std::vector<u64> cycle_structure_mod(const CompatibleFn& f, int m, bool force) {
    gate_depth(f, m, force);
    std::vector<u64> vals = kernels::reduce_table(f, m);
    u64 pm = vals.size();
    {
        std::vector<u64> pre(pm, pm);
        for (u64 x = 0; x < pm; ++x) {
            if (pre[vals[x]] != pm)
                throw error("cycle structure undefined: f mod p^" + std::to_string(m) +
                            " identifies " + std::to_string(pre[vals[x]]) + " and " +
                            std::to_string(x));
            pre[vals[x]] = x;
        }
    }
    std::vector<bool> seen(pm, false);
    std::vector<u64> lens;
    for (u64 s = 0; s < pm; ++s) {
        if (seen[s]) continue;
        u64 len = 0, x = s;
        do {
            seen[x] = true;
            x = vals[x];
            ++len;
        } while (x != s);
        lens.push_back(len);
    }
    std::sort(lens.begin(), lens.end(), std::greater<u64>());
    return lens;
}

CrossReport cross_validate(const std::vector<std::pair<std::string, CompatibleFn>>& corpus, int K,
                           bool force) {
    if (K < 0) throw precondition_error("cross_validate: K must be >= 0");
    for (const auto& [id, f] : corpus)
        gate_depth(f, K + 1, force); // validate before going parallel

    auto t0 = std::chrono::steady_clock::now();
    size_t n = corpus.size();
    std::vector<std::vector<CrossRow>> per(n);
    std::exception_ptr err;

    const i64 ni = static_cast<i64>(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (i64 i = 0; i < ni; ++i) {
        try {
            const auto& [id, f] = corpus[static_cast<size_t>(i)];
            auto m0 = std::chrono::steady_clock::now();
            criteria::Verdict v = criteria::check_ergodic_general(f, K);
            std::vector<CrossRow> rows;
            for (int k = 0; k <= K; ++k) {
                SingleCycle sc = is_single_cycle_mod(f, k + 1, force);
                bool crit = v.holds_at(k);
                rows.push_back(CrossRow{id, k, crit, sc.single, crit == sc.single, 0.0});
            }
            double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - m0)
                            .count();
            for (auto& r : rows) r.ms = ms;
            per[static_cast<size_t>(i)] = std::move(rows);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                if (!err) err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);

    CrossReport rep;
    rep.all_agree = true;
    for (auto& rows : per)
        for (auto& r : rows) {
            rep.all_agree = rep.all_agree && r.agree;
            rep.rows.push_back(std::move(r));
        }
    rep.total_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string cross_to_csv(const CrossReport& r) {
    std::ostringstream os;
    os << "id,level,criterion,oracle,agree,ms\n";
    for (const auto& row : r.rows) {
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", row.ms);
        os << row.id << ',' << row.level << ',' << (row.criterion ? "true" : "false") << ','
           << (row.oracle_single ? "true" : "false") << ',' << (row.agree ? "true" : "false")
           << ',' << ms << '\n';
    }
    return os.str();
}

} // namespace zpdyn::oracle
