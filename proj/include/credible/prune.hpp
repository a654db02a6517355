#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "credible/data.hpp"
#include "credible/scores.hpp"

namespace credible {

// Absolute slack for boundary comparisons: ties at the window edge are kept.
constexpr double kScoreSlack = 1e-9;

struct TableEntry {
    Mask parents;
    double value;
    double penalty;  // r_parents * (r_target - 1); 0 under bdeu
};

// Per-variable pruned candidate parent sets; the solver's sole input.
struct ScoreTable {
    std::vector<std::string> names;
    Family family = Family::bic;
    double ess = 1.0;
    double epsilon = 0.0;  // window the table was generated for (may be +inf)
    int palim = 0;         // parent-set size cap applied during generation
    std::vector<std::vector<TableEntry>> entries;  // entries[v] sorted by (value, mask)

    int n() const { return static_cast<int>(names.size()); }
};

// Candidate accounting. `generated` counts parent sets actually scored; the
// instantiation/size/entropy/penalty/sparse counters track candidates suppressed before
// scoring by an inherited superset block; `pruned_dominated` counts scored candidates
// rejected by subset domination. generated == survivors + pruned_dominated.
struct PruneStats {
    std::int64_t generated = 0;
    std::int64_t survivors = 0;
    std::int64_t pruned_dominated = 0;
    std::int64_t pruned_penalty = 0;
    std::int64_t pruned_instantiation = 0;
    std::int64_t pruned_size = 0;
    std::int64_t pruned_entropy = 0;
    std::int64_t pruned_sparse = 0;

    std::int64_t considered() const {
        return generated + pruned_penalty + pruned_instantiation + pruned_size +
               pruned_entropy + pruned_sparse;
    }
    std::int64_t eliminated() const { return considered() - survivors; }
};

struct GenOptions {
    std::optional<int> palim_override;
    std::int64_t candidate_limit = 5'000'000;  // scored candidates per variable
    int workers = 1;
    // Test hook: apply subset-domination pruning with a zero window while the table
    // still claims the requested epsilon. Deliberately unsound; the oracle checker
    // must catch the networks this loses.
    bool fault_subset_prune_at_zero = false;
};

// Should the superset be dropped because a subset scores no worse up to the window?
// Keeps ties and boundary cases: a superset is useless only if strictly worse by more
// than epsilon (a network using it could then never land inside the window).
bool epsilon_subset_prune(double score_subset, double score_superset, double epsilon);

// BIC: a superset whose penalty alone exceeds some subset's full score by more than
// epsilon can never participate; fires for the superset and everything above it.
bool bic_penalty_prune(double score_subset, double penalty_superset, double epsilon);

// BIC: once the parent state space is large enough, every proper superset is dominated.
// Pure predicate; generation adds the guards that make superset blocking exact.
bool instantiation_count_prune(const Dataset& ds, const ScoringConfig& cfg, int target,
                               Mask parents, double epsilon);

// ceil(log2(N + epsilon)): no candidate parent set larger than this participates in any
// within-epsilon network under BIC.
int parent_size_limit(std::int64_t N, double epsilon);

// BIC: extension of `parents` by `candidate` (and all supersets) is dominated when the
// data cannot pay for the penalty growth.
bool entropy_prune(const Dataset& ds, int target, Mask parents, int candidate,
                   double epsilon);

// BDeu: every positive parent instantiation costs at least ln r_i, so a superset with
// enough populated cells is dominated by the subset.
bool bdeu_count_prune(double score_subset, std::int64_t positive_cells,
                      std::int64_t r_target, double epsilon);

// Breadth-first candidate generation over parent-set size with all applicable rules.
// Deterministic for fixed input, for any worker count.
std::pair<ScoreTable, PruneStats> generate_score_table(const Dataset& ds,
                                                       const ScoringConfig& cfg,
                                                       double epsilon,
                                                       const GenOptions& options = {});

// Exchange format: scores negated to the maximization convention, 8 decimal digits;
// '#' comments carry family/ess/epsilon/palim so that read(write(t)) == t.
void write_score_file(const ScoreTable& table, const std::string& path);
ScoreTable read_score_file(const std::string& path);

}  // namespace credible
