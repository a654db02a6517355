#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "credible/search.hpp"

namespace credible {

// Window width for a desired Bayes factor: ln(bf). bf < 1 is a contract error.
double epsilon_from_bf(double bf);

// Heckerman-style evidence scale: [1,3) anecdotal, [3,20) positive, [20,150) strong,
// >= 150 very strong.
std::string interpret_bf(double bf);

// Markov-equivalence fingerprint: undirected skeleton plus v-structures
// (a -> c <- b with a < b and a, b non-adjacent).
struct MecKey {
    std::vector<std::pair<int, int>> skeleton;       // sorted (u, v), u < v
    std::vector<std::array<int, 3>> vstructs;        // sorted (a, c, b), a < b

    bool operator==(const MecKey&) const = default;
    bool operator<(const MecKey& o) const {
        if (skeleton != o.skeleton) return skeleton < o.skeleton;
        return vstructs < o.vstructs;
    }
};

MecKey mec_key(const Dag& dag);

struct MecGroup {
    MecKey key;
    std::vector<int> members;  // indices into CredibleSet::dags
    double min_score;
};

// Partition of the credible set by mec_key, ordered by (min member score, key).
std::vector<MecGroup> group_mecs(const CredibleSet& cs);

struct MecSummary {
    int id;
    std::int64_t members;
    double min_score;
};

// Posterior-weighted edge statistics. weights[i] = exp(best - score_i) relative to the
// collected set's best score, so the argmin weight is exactly 1; `uniform` switches to
// unweighted frequencies. When the set was truncated the probabilities are conditional
// on the collected networks (flagged, not refused).
struct AveragingReport {
    int n = 0;
    std::vector<double> edge_prob;  // row-major n*n, entry (i,j) = P(i -> j)
    std::vector<double> weights;
    double normalizer = 0.0;
    bool truncated = false;
    std::vector<MecSummary> mec_summary;
};

AveragingReport average(const CredibleSet& cs, bool uniform = false);

}  // namespace credible
