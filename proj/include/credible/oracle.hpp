#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "credible/analyze.hpp"
#include "credible/prune.hpp"
#include "credible/search.hpp"

namespace credible {

// Seeded instance generation and pipeline-vs-reference equivalence checking, shared by
// the command-line checker, the acceptance suite, and property tests.

// Random discrete dataset: arities in {2,3}; rows either uniform noise or sampled from
// a random ground-truth network with peaked conditionals (mixed per instance).
Dataset random_dataset(std::mt19937_64& rng, int n, std::int64_t N);

// The 8-row exhaustive 3-binary-variable fixture (every joint state once): every
// nonempty parent set is exactly one penalty step above the empty set, which makes
// window-boundary behavior fully predictable.
Dataset uniform8_dataset();

struct OracleMismatch {
    std::string description;  // serialized counterexample: instance, family, window, DAG
};

struct OracleOptions {
    std::vector<double> epsilons;  // default {0, ln 3, ln 20, ln 150}
    bool fault_subset_prune_at_zero = false;
    std::int64_t limit = 1'000'000;
};

// Compares generate_score_table + enumerate_credible against brute_force_credible as
// sets (scores within 1e-9), and checks window monotonicity across the epsilon grid.
// Returns the first mismatch, or nullopt when the instance passes. n <= 5.
std::optional<OracleMismatch> check_instance(const Dataset& ds, const ScoringConfig& cfg,
                                             const OracleOptions& options = {});

struct OracleRunConfig {
    std::uint64_t seed = 1;
    int instances = 25;
    std::optional<int> fixed_n;  // default mixes n in {3,4,5}; n > 5 is a resource error
    OracleOptions options;
};

struct OracleRunResult {
    int instances_run = 0;
    int checks_run = 0;
    std::optional<OracleMismatch> first_failure;
};

// Deterministic fixture first, then seeded random instances, both scoring families.
OracleRunResult run_oracle_suite(const OracleRunConfig& cfg);

}  // namespace credible
