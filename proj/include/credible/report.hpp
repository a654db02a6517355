#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "credible/analyze.hpp"

namespace credible {

// Machine-readable credible-set report:
//   {opt, epsilon, bf, truncated, n_dags, dags:[{parents, score}]}
// plus, when provided, MEC grouping (n_mecs, per-DAG mec_id) and model averaging
// (edge_prob as a row-major flat matrix).
nlohmann::json credible_report(const CredibleSet& cs, double bf,
                               const std::vector<MecGroup>* mecs,
                               const AveragingReport* avg);

// Edge-probability matrix as CSV: header row of names, then one row per source
// variable ("name,p0,...,p{n-1}").
std::string edge_prob_csv(const AveragingReport& avg, const std::vector<std::string>& names);

}  // namespace credible
