#include "credible/scores.hpp"

#include <cmath>
#include <unordered_map>

#include "credible/prune.hpp"
#include "credible/search.hpp"

namespace credible {

namespace {

void check_score_pre(const Dataset& ds, int target, Mask parents) {
    if (target < 0 || target >= ds.n()) throw contract_error("target index out of range");
    if (parents & bit(target)) throw contract_error("target cannot be its own parent");
}

}  // namespace

double bic_weight(const Dataset& ds) { return std::log(static_cast<double>(ds.N())) / 2.0; }

double gamma_ratio(std::int64_t n, double a) {
    if (n < 1) throw contract_error("gamma_ratio requires n >= 1");
    if (!(a > 0.0)) throw contract_error("gamma_ratio requires a > 0");
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) s += std::log(static_cast<double>(i) + a);
    return s;
}

double bic_value_from_counts(const CountTable& ct, std::int64_t r_target, double w,
                             double* t_out) {
    // -sum n_ijk ln(n_ijk / n_ij) = sum_j [ n_ij ln n_ij - sum_k n_ijk ln n_ijk ]
    double like = 0.0;
    for (const auto& cell : ct.cells) {
        const double nij = static_cast<double>(cell.n_ij);
        double s = nij * std::log(nij);
        for (auto c : cell.n_ijk)
            if (c > 0) s -= static_cast<double>(c) * std::log(static_cast<double>(c));
        like += s;
    }
    const double t = static_cast<double>(ct.r_parents) * static_cast<double>(r_target - 1);
    if (t_out) *t_out = t;
    return like + t * w;
}

double bdeu_value_from_counts(const CountTable& ct, std::int64_t r_target, double ess) {
    const double a_j = ess / static_cast<double>(ct.r_parents);
    const double a_jk = a_j / static_cast<double>(r_target);
    double value = 0.0;
    for (const auto& cell : ct.cells) {
        value += gamma_ratio(cell.n_ij, a_j);
        for (auto c : cell.n_ijk)
            if (c > 0) value -= gamma_ratio(c, a_jk);
    }
    return value;
}

LocalScore bic_local(const Dataset& ds, const ScoringConfig& cfg, int target, Mask parents) {
    if (cfg.family != Family::bic) throw contract_error("bic_local called with a non-BIC config");
    check_score_pre(ds, target, parents);
    const auto ct = count(ds, target, parents);
    double t = 0.0;
    const double value = bic_value_from_counts(ct, ds.arities[target], bic_weight(ds), &t);
    return LocalScore{target, parents, value, t};
}

LocalScore bdeu_local(const Dataset& ds, const ScoringConfig& cfg, int target, Mask parents) {
    if (cfg.family != Family::bdeu)
        throw contract_error("bdeu_local called with a non-BDeu config");
    if (!(cfg.ess > 0.0)) throw contract_error("equivalent sample size must be positive");
    check_score_pre(ds, target, parents);
    const auto ct = count(ds, target, parents);
    return LocalScore{target, parents, bdeu_value_from_counts(ct, ds.arities[target], cfg.ess),
                      0.0};
}

LocalScore bdeu_local_reference(const Dataset& ds, const ScoringConfig& cfg, int target,
                                Mask parents) {
    if (cfg.family != Family::bdeu)
        throw contract_error("bdeu_local_reference called with a non-BDeu config");
    if (!(cfg.ess > 0.0)) throw contract_error("equivalent sample size must be positive");
    check_score_pre(ds, target, parents);
    const auto ct = count(ds, target, parents);
    const double a_j = cfg.ess / static_cast<double>(ct.r_parents);
    const double a_jk = a_j / static_cast<double>(ds.arities[target]);
    double value = 0.0;
    for (const auto& cell : ct.cells) {
        value -= std::lgamma(a_j) - std::lgamma(a_j + static_cast<double>(cell.n_ij));
        for (auto c : cell.n_ijk)
            if (c > 0)
                value -= std::lgamma(a_jk + static_cast<double>(c)) - std::lgamma(a_jk);
    }
    return LocalScore{target, parents, value, 0.0};
}

LocalScore local_score(const Dataset& ds, const ScoringConfig& cfg, int target, Mask parents) {
    return cfg.family == Family::bic ? bic_local(ds, cfg, target, parents)
                                     : bdeu_local(ds, cfg, target, parents);
}

double network_score(const ScoreTable& table, const Dag& dag) {
    if (dag.n() != table.n())
        throw contract_error("network and score table disagree on the variable count");
    double total = 0.0;
    for (int v = 0; v < dag.n(); ++v) {
        const Mask want = dag.parents[v];
        bool found = false;
        for (const auto& e : table.entries[v]) {
            if (e.parents == want) {
                total += e.value;
                found = true;
                break;
            }
        }
        if (!found)
            throw contract_error("no scored entry for variable " + table.names[v] +
                                 " with the requested parent set");
    }
    return total;
}

double network_score_from_data(const Dataset& ds, const ScoringConfig& cfg, const Dag& dag) {
    if (dag.n() != ds.n())
        throw contract_error("network and dataset disagree on the variable count");
    double total = 0.0;
    for (int v = 0; v < dag.n(); ++v) total += local_score(ds, cfg, v, dag.parents[v]).value;
    return total;
}

}  // namespace credible
