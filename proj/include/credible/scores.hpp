#pragma once

#include <cstdint>

#include "credible/data.hpp"

namespace credible {

struct ScoreTable;  // prune.hpp
struct Dag;         // search.hpp

enum class Family { bic, bdeu };

struct ScoringConfig {
    Family family = Family::bic;
    double ess = 1.0;  // equivalent sample size (bdeu only), > 0
};

// Positive minimization convention throughout: lower scores are better.
struct LocalScore {
    int target;
    Mask parents;
    double value;
    double penalty;  // structural term r_parents * (r_target - 1); 0 under bdeu
};

// Complexity weight w = ln(N) / 2, recomputed from the dataset it scores.
double bic_weight(const Dataset& ds);

// value = -sum_{j,k} n_ijk * ln(n_ijk / n_ij) + r_parents * (r_i - 1) * w.
// The likelihood part uses only instantiations with positive counts; the penalty uses
// the full declared-arity product.
LocalScore bic_local(const Dataset& ds, const ScoringConfig& cfg, int target, Mask parents);

// Negative log marginal likelihood under a uniform Dirichlet prior with strength ess,
// evaluated through log-gamma ratio sums for stability.
LocalScore bdeu_local(const Dataset& ds, const ScoringConfig& cfg, int target, Mask parents);

// Same quantity via direct lgamma differences; validation path for the sum evaluation.
LocalScore bdeu_local_reference(const Dataset& ds, const ScoringConfig& cfg, int target,
                                Mask parents);

// Dispatch on cfg.family.
LocalScore local_score(const Dataset& ds, const ScoringConfig& cfg, int target, Mask parents);

// ln Γ(n + a) − ln Γ(a) computed as sum_{i=0}^{n-1} ln(i + a); exact for the ratio of
// gammas at integer offsets and immune to cancellation for tiny a.
double gamma_ratio(std::int64_t n, double a);

// Low-level evaluators over an already-built contingency table; used by candidate
// generation to score and inspect counts in one pass. t_out receives the structural
// penalty term when non-null.
double bic_value_from_counts(const CountTable& ct, std::int64_t r_target, double w,
                             double* t_out = nullptr);
double bdeu_value_from_counts(const CountTable& ct, std::int64_t r_target, double ess);

// Network score = sum of per-variable local scores (decomposability).
double network_score(const ScoreTable& table, const Dag& dag);
double network_score_from_data(const Dataset& ds, const ScoringConfig& cfg, const Dag& dag);

}  // namespace credible
