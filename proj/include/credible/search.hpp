#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "credible/prune.hpp"

namespace credible {

// One parent set per variable; acyclicity is a property, not an invariant of the
// representation (check_acyclic verifies it).
struct Dag {
    std::vector<Mask> parents;  // parents[v] = mask of direct parents of v

    int n() const { return static_cast<int>(parents.size()); }
    bool operator==(const Dag&) const = default;
    // Canonical encoding order: lexicographic over the per-variable masks.
    bool operator<(const Dag& o) const { return parents < o.parents; }
};

bool check_acyclic(const Dag& dag);

struct OptResult {
    double opt;
    Dag witness;
};

// Exact optimum by dynamic programming over variable subsets (best parent set per
// (v, S), then best sink per S). Memory grows as n * 2^n; n_cap guards it.
OptResult solve_opt(const ScoreTable& table, int n_cap = 24);

struct CredibleDag {
    Dag dag;
    double score;
};

constexpr std::int64_t kDefaultDagLimit = 150'000;

// All distinct DAGs with score <= opt + epsilon (+ slack), sorted by score then by
// canonical encoding. `truncated` is set when the collection limit stopped enumeration;
// no best-k claim is made for a truncated collection.
struct CredibleSet {
    double opt = 0.0;
    double epsilon = 0.0;
    std::vector<CredibleDag> dags;
    bool truncated = false;
    std::int64_t limit = kDefaultDagLimit;
};

struct EnumStats {
    std::int64_t emitted = 0;
    std::int64_t duplicates = 0;  // canonical-order enumeration keeps this at zero
};

// Budgeted sink-decomposition enumeration. Requires the table to have been generated
// with a window at least as wide as `epsilon` (completeness is not guaranteed
// otherwise; enforced).
CredibleSet enumerate_credible(const ScoreTable& table, double epsilon,
                               std::int64_t limit = kDefaultDagLimit, int n_cap = 24,
                               EnumStats* stats = nullptr);

// Reference semantics for every property test: enumerate all parent-set assignments,
// keep the acyclic ones, score directly from data. n <= 5 only.
// epsilon = +inf collects every acyclic DAG.
CredibleSet brute_force_credible(const Dataset& ds, const ScoringConfig& cfg,
                                 double epsilon);

// All acyclic parent-mask assignments on n unlabeled-data variables (cached per n).
// Sizes recount the known DAG tallies: 25 for n=3, 543 for n=4, 29281 for n=5.
const std::vector<std::vector<Mask>>& all_acyclic_assignments(int n);

}  // namespace credible
