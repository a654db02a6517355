#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "credible/analyze.hpp"
#include "credible/errors.hpp"
#include "credible/oracle.hpp"
#include "credible/prune.hpp"
#include "credible/report.hpp"
#include "credible/search.hpp"

using namespace credible;

namespace {

CredibleSet small_window() {
    auto ds = uniform8_dataset();
    auto table = generate_score_table(ds, ScoringConfig{}, std::log(3.0)).first;
    return enumerate_credible(table, std::log(3.0));
}

}  // namespace

TEST_CASE("report carries the window and the networks") {
    auto cs = small_window();
    auto j = credible_report(cs, 3.0, nullptr, nullptr);

    CHECK(j["opt"].get<double>() == doctest::Approx(cs.opt).epsilon(1e-15));
    CHECK(j["epsilon"].get<double>() == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(j["bf"].get<double>() == 3.0);
    CHECK(j["truncated"].get<bool>() == false);
    CHECK(j["n_dags"].get<int>() == 7);
    REQUIRE(j["dags"].size() == 7);
    // The best network comes first; parents serialize as index lists.
    CHECK(j["dags"][0]["parents"] == nlohmann::json::parse("[[],[],[]]"));
    CHECK(j["dags"][0]["score"].get<double>() == doctest::Approx(cs.opt).epsilon(1e-15));
    CHECK(!j.contains("n_mecs"));
    CHECK(!j["dags"][0].contains("mec_id"));
    CHECK(!j.contains("edge_prob"));
}

TEST_CASE("report attaches class ids and edge probabilities when supplied") {
    auto cs = small_window();
    auto groups = group_mecs(cs);
    auto avg = average(cs);
    auto j = credible_report(cs, 3.0, &groups, &avg);

    CHECK(j["n_mecs"].get<int>() == 4);
    CHECK(j["dags"][0]["mec_id"].get<int>() == 0);
    for (const auto& d : j["dags"]) {
        const int id = d["mec_id"].get<int>();
        CHECK(id >= 0);
        CHECK(id < 4);
    }
    REQUIRE(j["edge_prob"].size() == 9);
    CHECK(j["edge_prob"][0].get<double>() == 0.0);  // diagonal (0,0)
    CHECK(j["edge_prob"][1].get<double>() ==
          doctest::Approx(1.0 / (std::sqrt(8.0) + 6.0)).epsilon(1e-9));
}

TEST_CASE("an unbounded Bayes factor serializes as null") {
    auto cs = small_window();
    auto j = credible_report(cs, std::numeric_limits<double>::infinity(), nullptr, nullptr);
    CHECK(j["bf"].is_null());
}

TEST_CASE("report rejects a grouping that references missing networks") {
    auto cs = small_window();
    auto groups = group_mecs(cs);
    groups[0].members.push_back(99);
    CHECK_THROWS_AS(credible_report(cs, 3.0, &groups, nullptr), contract_error);
}

TEST_CASE("edge probability matrix as csv") {
    AveragingReport avg;
    avg.n = 2;
    avg.edge_prob = {0.0, 0.25, 0.5, 0.0};
    CHECK(edge_prob_csv(avg, {"A", "B"}) == ",A,B\nA,0,0.25\nB,0.5,0\n");
    CHECK_THROWS_AS(edge_prob_csv(avg, {"A"}), contract_error);
}
