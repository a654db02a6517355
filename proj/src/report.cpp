#include "credible/report.hpp"

#include <cmath>
#include <cstdio>

#include "credible/errors.hpp"

namespace credible {

nlohmann::json credible_report(const CredibleSet& cs, double bf,
                               const std::vector<MecGroup>* mecs,
                               const AveragingReport* avg) {
    nlohmann::json j;
    j["opt"] = cs.opt;
    j["epsilon"] = cs.epsilon;
    if (std::isfinite(bf))
        j["bf"] = bf;
    else
        j["bf"] = nullptr;
    j["truncated"] = cs.truncated;
    j["n_dags"] = cs.dags.size();

    std::vector<int> mec_of;
    if (mecs) {
        j["n_mecs"] = mecs->size();
        mec_of.assign(cs.dags.size(), -1);
        for (std::size_t g = 0; g < mecs->size(); ++g)
            for (int member : (*mecs)[g].members) {
                if (member < 0 || static_cast<std::size_t>(member) >= mec_of.size())
                    throw contract_error("equivalence grouping references a missing network");
                mec_of[static_cast<std::size_t>(member)] = static_cast<int>(g);
            }
    }

    auto dags = nlohmann::json::array();
    for (std::size_t i = 0; i < cs.dags.size(); ++i) {
        nlohmann::json d;
        auto parents = nlohmann::json::array();
        for (const Mask m : cs.dags[i].dag.parents) parents.push_back(mask_to_indices(m));
        d["parents"] = std::move(parents);
        d["score"] = cs.dags[i].score;
        if (mecs) d["mec_id"] = mec_of[i];
        dags.push_back(std::move(d));
    }
    j["dags"] = std::move(dags);

    if (avg) j["edge_prob"] = avg->edge_prob;
    return j;
}

std::string edge_prob_csv(const AveragingReport& avg, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) != avg.n)
        throw contract_error("name list and averaging report disagree on the variable count");
    std::string out;
    for (const auto& name : names) {
        out += ',';
        out += name;
    }
    out += '\n';
    char buf[64];
    for (int i = 0; i < avg.n; ++i) {
        out += names[i];
        for (int j = 0; j < avg.n; ++j) {
            std::snprintf(buf, sizeof buf, "%.10g",
                          avg.edge_prob[static_cast<std::size_t>(i) * avg.n + j]);
            out += ',';
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace credible
