#include "credible/search.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <set>
#include <string>

#include "credible/errors.hpp"
#include "credible/scores.hpp"

namespace credible {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Masks over "all variables except v", with v's slot removed: bits above v shift down.
std::size_t compress_others(Mask m, int v) {
    return (static_cast<std::size_t>(m >> (v + 1)) << v) |
           (m & (bit(v) - 1));
}

Mask expand_others(std::size_t idx, int v) {
    return static_cast<Mask>((idx >> v) << (v + 1)) | static_cast<Mask>(idx & (bit(v) - 1));
}

void check_cap(int n, int n_cap) {
    if (n_cap < 1) throw contract_error("n_cap must be positive");
    if (n > n_cap) {
        const double gib = static_cast<double>(n + 1) * std::ldexp(8.0, n) / std::ldexp(1.0, 30);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", gib);
        throw resource_error("exact search over " + std::to_string(n) +
                             " variables needs roughly " + buf +
                             " GiB of tables (n * 2^n doubles); the configured cap is " +
                             std::to_string(n_cap) + " variables");
    }
}

struct DpCore {
    std::vector<std::vector<double>> bss;  // bss[v][compress(S, v)]: best value within S
    std::vector<double> f;                 // f[S]: best sub-network score over S
};

DpCore build_core(const ScoreTable& table) {
    const int n = table.n();
    DpCore core;
    core.bss.resize(n);
    for (int v = 0; v < n; ++v) {
        if (table.entries[v].empty())
            throw contract_error("variable '" + table.names[v] +
                                 "' has no scored parent sets");
        auto& a = core.bss[v];
        a.assign(std::size_t{1} << (n - 1), kInf);
        for (const auto& e : table.entries[v]) {
            auto& slot = a[compress_others(e.parents, v)];
            slot = std::min(slot, e.value);
        }
        for (int b = 0; b + 1 < n; ++b)
            for (std::size_t m = 0; m < a.size(); ++m)
                if (m & (std::size_t{1} << b))
                    a[m] = std::min(a[m], a[m ^ (std::size_t{1} << b)]);
    }
    const std::size_t full = (std::size_t{1} << n) - 1;
    core.f.assign(full + 1, kInf);
    core.f[0] = 0.0;
    for (std::size_t S = 1; S <= full; ++S) {
        double best = kInf;
        for (std::size_t rest = S; rest; rest &= rest - 1) {
            const int v = std::countr_zero(rest);
            const std::size_t without = S ^ (std::size_t{1} << v);
            best = std::min(best, core.f[without] +
                                      core.bss[v][compress_others(
                                          static_cast<Mask>(without), v)]);
        }
        core.f[S] = best;
    }
    return core;
}

}  // namespace

bool check_acyclic(const Dag& dag) {
    const int n = dag.n();
    if (n < 1 || n > kMaxVars) throw contract_error("network size out of range");
    const Mask full = bit(n) - 1;
    for (int v = 0; v < n; ++v)
        if (dag.parents[v] & ~full)
            throw contract_error("parent mask references a variable outside the network");
    Mask removed = 0;
    bool progress = true;
    while (progress) {
        progress = false;
        for (int v = 0; v < n; ++v) {
            if (removed & bit(v)) continue;
            if ((dag.parents[v] & ~removed) == 0) {
                removed |= bit(v);
                progress = true;
            }
        }
    }
    return removed == full;
}

OptResult solve_opt(const ScoreTable& table, int n_cap) {
    const int n = table.n();
    if (n < 1) throw contract_error("score table is empty");
    check_cap(n, n_cap);
    const DpCore core = build_core(table);
    const std::size_t full = (std::size_t{1} << n) - 1;
    if (!std::isfinite(core.f[full]))
        throw contract_error("score table admits no acyclic network");

    Dag witness;
    witness.parents.assign(n, 0);
    std::size_t S = full;
    while (S) {
        int pick = -1;
        double bval = kInf;
        std::size_t without = 0;
        for (std::size_t rest = S; rest; rest &= rest - 1) {
            const int v = std::countr_zero(rest);
            const std::size_t cand = S ^ (std::size_t{1} << v);
            const double bv = core.bss[v][compress_others(static_cast<Mask>(cand), v)];
            if (core.f[cand] + bv == core.f[S]) {
                pick = v;
                bval = bv;
                without = cand;
                break;  // smallest eligible sink: deterministic witness
            }
        }
        const Mask avail = static_cast<Mask>(without);
        for (const auto& e : table.entries[pick]) {
            if ((e.parents & ~avail) == 0 && e.value == bval) {
                witness.parents[pick] = e.parents;
                break;
            }
        }
        S = without;
    }
    return OptResult{core.f[full], witness};
}

CredibleSet enumerate_credible(const ScoreTable& table, double epsilon, std::int64_t limit,
                               int n_cap, EnumStats* stats) {
    if (!(epsilon >= 0.0)) throw contract_error("epsilon must be non-negative");
    if (limit < 1) throw contract_error("collection limit must be positive");
    if (!(table.epsilon + 1e-12 >= epsilon))
        throw contract_error(
            "score table was generated for a narrower window than requested; regenerate it");
    const int n = table.n();
    if (n < 1) throw contract_error("score table is empty");
    check_cap(n, n_cap);

    const DpCore core = build_core(table);
    const std::size_t full = (std::size_t{1} << n) - 1;
    const double opt = core.f[full];
    if (!std::isfinite(opt)) throw contract_error("score table admits no acyclic network");

    // Admissible completion bound: every remaining variable takes its best entry
    // available within the remaining set.
    std::vector<double> h(full + 1, 0.0);
    for (std::size_t S = 1; S <= full; ++S) {
        double sum = 0.0;
        for (std::size_t rest = S; rest; rest &= rest - 1) {
            const int v = std::countr_zero(rest);
            sum += core.bss[v][compress_others(static_cast<Mask>(S) & ~bit(v), v)];
        }
        h[S] = sum;
    }

    CredibleSet cs;
    cs.opt = opt;
    cs.epsilon = epsilon;
    cs.limit = limit;
    EnumStats st;
    const double budget = opt + epsilon + kScoreSlack;

    std::vector<Mask> chosen(n, 0);
    std::vector<double> chosen_val(n, 0.0);
    std::set<Dag> seen;
    bool aborted = false;

    // Sink elimination with deferred obligations: eliminating v defers every remaining
    // u > v until some later-eliminated vertex names u as a parent, which makes the
    // largest-remaining-sink order the single accepted order per network.
    const auto rec = [&](auto&& self, Mask S, Mask D, double spent) -> void {
        if (aborted) return;
        if (S == 0) {
            Dag g;
            g.parents = chosen;
            double score = 0.0;
            for (int v = 0; v < n; ++v) score += chosen_val[v];
            if (!(score <= budget)) return;
            if (!seen.insert(g).second) {
                ++st.duplicates;
                return;
            }
            if (static_cast<std::int64_t>(cs.dags.size()) >= limit) {
                cs.truncated = true;
                aborted = true;
                return;
            }
            ++st.emitted;
            cs.dags.push_back(CredibleDag{std::move(g), score});
            return;
        }
        for (Mask rest = S & ~D; rest; rest &= rest - 1) {
            const int v = std::countr_zero(rest);
            const Mask without = S ^ bit(v);
            const double hrem = h[without];
            const Mask above_v = ~((bit(v) << 1) - 1);
            const Mask deferred = D | (without & above_v);
            for (const auto& e : table.entries[v]) {
                if (spent + e.value + hrem > budget) break;  // entries ascend by value
                if (e.parents & ~without) continue;
                chosen[v] = e.parents;
                chosen_val[v] = e.value;
                self(self, without, deferred & ~e.parents, spent + e.value);
                if (aborted) return;
            }
        }
    };
    rec(rec, static_cast<Mask>(full), 0, 0.0);

    std::sort(cs.dags.begin(), cs.dags.end(), [](const CredibleDag& a, const CredibleDag& b) {
        return a.score != b.score ? a.score < b.score : a.dag < b.dag;
    });
    if (stats) *stats = st;
    return cs;
}

const std::vector<std::vector<Mask>>& all_acyclic_assignments(int n) {
    if (n < 1 || n > 5)
        throw resource_error("exhaustive network census supports 1..5 variables");
    static std::array<std::vector<std::vector<Mask>>, 6> cache;
    static std::array<std::once_flag, 6> once;
    std::call_once(once[n], [n] {
        std::vector<std::vector<Mask>> out;
        const Mask full = bit(n) - 1;
        std::vector<Mask> cur(n, 0);
        Dag probe;
        while (true) {
            probe.parents = cur;
            if (check_acyclic(probe)) out.push_back(cur);
            int i = n - 1;
            for (; i >= 0; --i) {
                const Mask lim = full & ~bit(i);
                cur[i] = (cur[i] - lim) & lim;  // next subset of lim, wrapping to 0
                if (cur[i] != 0) break;
            }
            if (i < 0) break;
        }
        cache[n] = std::move(out);
    });
    return cache[n];
}

CredibleSet brute_force_credible(const Dataset& ds, const ScoringConfig& cfg,
                                 double epsilon) {
    if (!(epsilon >= 0.0)) throw contract_error("epsilon must be non-negative");
    const int n = ds.n();
    if (n < 1) throw contract_error("dataset has no variables");
    if (n > 5) throw resource_error("reference enumeration supports at most 5 variables");

    const auto& assigns = all_acyclic_assignments(n);
    std::vector<std::vector<double>> local(n);
    for (int v = 0; v < n; ++v) {
        local[v].resize(std::size_t{1} << (n - 1));
        for (std::size_t idx = 0; idx < local[v].size(); ++idx)
            local[v][idx] = local_score(ds, cfg, v, expand_others(idx, v)).value;
    }

    std::vector<double> scores(assigns.size());
    double opt = kInf;
    for (std::size_t i = 0; i < assigns.size(); ++i) {
        double s = 0.0;
        for (int v = 0; v < n; ++v) s += local[v][compress_others(assigns[i][v], v)];
        scores[i] = s;
        opt = std::min(opt, s);
    }

    CredibleSet cs;
    cs.opt = opt;
    cs.epsilon = epsilon;
    cs.limit = std::numeric_limits<std::int64_t>::max();
    const double budget = opt + epsilon + kScoreSlack;
    for (std::size_t i = 0; i < assigns.size(); ++i)
        if (scores[i] <= budget) cs.dags.push_back(CredibleDag{Dag{assigns[i]}, scores[i]});
    std::sort(cs.dags.begin(), cs.dags.end(), [](const CredibleDag& a, const CredibleDag& b) {
        return a.score != b.score ? a.score < b.score : a.dag < b.dag;
    });
    return cs;
}

}  // namespace credible
