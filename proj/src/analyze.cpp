#include "credible/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "credible/errors.hpp"

namespace credible {

double epsilon_from_bf(double bf) {
    if (!(bf >= 1.0)) throw contract_error("Bayes factor must be at least 1");
    return std::log(bf);
}

std::string interpret_bf(double bf) {
    if (!(bf >= 1.0)) throw contract_error("Bayes factor must be at least 1");
    if (bf < 3.0) return "anecdotal";
    if (bf < 20.0) return "positive";
    if (bf < 150.0) return "strong";
    return "very strong";
}

MecKey mec_key(const Dag& dag) {
    const int n = dag.n();
    if (!check_acyclic(dag)) throw contract_error("equivalence key requires an acyclic network");
    std::vector<Mask> adj(n, 0);  // undirected adjacency
    for (int v = 0; v < n; ++v) {
        for (Mask rest = dag.parents[v]; rest; rest &= rest - 1) {
            const int u = std::countr_zero(rest);
            adj[u] |= bit(v);
            adj[v] |= bit(u);
        }
    }
    MecKey key;
    for (int u = 0; u < n; ++u)
        for (Mask rest = adj[u] & ~(bit(u + 1) - 1); rest; rest &= rest - 1)
            key.skeleton.emplace_back(u, std::countr_zero(rest));
    for (int c = 0; c < n; ++c) {
        const Mask ps = dag.parents[c];
        for (Mask ra = ps; ra; ra &= ra - 1) {
            const int a = std::countr_zero(ra);
            for (Mask rb = ra & (ra - 1); rb; rb &= rb - 1) {
                const int b = std::countr_zero(rb);
                if (!(adj[a] & bit(b))) key.vstructs.push_back({a, c, b});
            }
        }
    }
    std::sort(key.skeleton.begin(), key.skeleton.end());
    std::sort(key.vstructs.begin(), key.vstructs.end());
    return key;
}

std::vector<MecGroup> group_mecs(const CredibleSet& cs) {
    std::map<MecKey, MecGroup> by_key;
    for (std::size_t i = 0; i < cs.dags.size(); ++i) {
        MecKey key = mec_key(cs.dags[i].dag);
        auto [it, fresh] = by_key.try_emplace(std::move(key));
        if (fresh) {
            it->second.key = it->first;
            it->second.min_score = cs.dags[i].score;
        }
        it->second.members.push_back(static_cast<int>(i));
        it->second.min_score = std::min(it->second.min_score, cs.dags[i].score);
    }
    std::vector<MecGroup> out;
    out.reserve(by_key.size());
    for (auto& [key, group] : by_key) out.push_back(std::move(group));
    std::sort(out.begin(), out.end(), [](const MecGroup& a, const MecGroup& b) {
        return a.min_score != b.min_score ? a.min_score < b.min_score : a.key < b.key;
    });
    return out;
}

AveragingReport average(const CredibleSet& cs, bool uniform) {
    if (cs.dags.empty()) throw contract_error("cannot average an empty credible set");
    const int n = cs.dags.front().dag.n();
    AveragingReport rep;
    rep.n = n;
    rep.truncated = cs.truncated;
    rep.edge_prob.assign(static_cast<std::size_t>(n) * n, 0.0);
    rep.weights.resize(cs.dags.size());

    double best = cs.dags.front().score;
    for (const auto& cd : cs.dags) best = std::min(best, cd.score);
    for (std::size_t i = 0; i < cs.dags.size(); ++i)
        rep.weights[i] = uniform ? 1.0 : std::exp(best - cs.dags[i].score);

    for (std::size_t i = 0; i < cs.dags.size(); ++i) {
        const double wgt = rep.weights[i];
        rep.normalizer += wgt;
        const Dag& g = cs.dags[i].dag;
        for (int v = 0; v < n; ++v)
            for (Mask rest = g.parents[v]; rest; rest &= rest - 1)
                rep.edge_prob[static_cast<std::size_t>(std::countr_zero(rest)) * n + v] += wgt;
    }
    for (auto& p : rep.edge_prob) p /= rep.normalizer;

    const auto groups = group_mecs(cs);
    rep.mec_summary.reserve(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g)
        rep.mec_summary.push_back(MecSummary{static_cast<int>(g),
                                             static_cast<std::int64_t>(groups[g].members.size()),
                                             groups[g].min_score});
    return rep;
}

}  // namespace credible
