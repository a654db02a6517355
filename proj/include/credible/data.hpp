#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "credible/errors.hpp"

namespace credible {

// Variable subsets are bitmasks; bit i == variable i. Everything downstream of the
// data layer works on masks, so the variable count is capped where masks are used.
using Mask = std::uint32_t;

constexpr int kMaxVars = 31;

inline int popcount(Mask m) { return std::popcount(m); }
inline Mask bit(int v) { return Mask{1} << v; }

std::vector<int> mask_to_indices(Mask m);
Mask mask_of(const std::vector<int>& indices);

// Immutable discrete dataset: named variables, declared state counts, and complete
// rows of state indices. Declared arity may exceed the observed distinct count when a
// schema sidecar pins states that never occur in the sample.
struct Dataset {
    std::vector<std::string> names;
    std::vector<std::int64_t> arities;             // declared state counts, >= 1
    std::vector<std::vector<std::uint32_t>> rows;  // rows[r][v] in [0, arities[v])
    std::vector<std::string> warnings;             // non-fatal load diagnostics

    int n() const { return static_cast<int>(names.size()); }
    std::int64_t N() const { return static_cast<std::int64_t>(rows.size()); }
};

// Validating constructor used by loaders, generators, and tests.
Dataset make_dataset(std::vector<std::string> names, std::vector<std::int64_t> arities,
                     std::vector<std::vector<std::uint32_t>> rows);

struct CsvOptions {
    std::string missing_token = "?";
    std::string schema_path;  // optional JSON sidecar {name -> declared arity}
};

// CSV loader: header row of unique names, comma-separated cells, no quoting.
// Values map to state indices in order of first appearance per column.
Dataset load_csv(const std::string& path, const CsvOptions& options = {});

// Sparse contingency table for one target given an ordered parent set.
// j is the mixed-radix encoding of the parents' joint state.
struct CountCell {
    std::uint64_t j;
    std::int64_t n_ij;
    std::vector<std::int64_t> n_ijk;  // dense over the target's states
};

struct CountTable {
    int target;
    std::vector<int> parents;  // ascending
    std::uint64_t r_parents;   // product of declared parent arities
    std::vector<CountCell> cells;  // sorted by j; only positive-count instantiations
};

CountTable count(const Dataset& ds, int target, Mask parents);
CountTable count(const Dataset& ds, int target, const std::vector<int>& parents);

// Sample entropy of the joint distribution over `vars`, in nats; 0·ln 0 = 0.
double entropy(const Dataset& ds, Mask vars);
double entropy(const Dataset& ds, const std::vector<int>& vars);

// H(x | given) = H(x ∪ given) − H(given), with H(∅) = 0.
double conditional_entropy(const Dataset& ds, Mask x, Mask given);
double conditional_entropy(const Dataset& ds, const std::vector<int>& x,
                           const std::vector<int>& given);

}  // namespace credible
