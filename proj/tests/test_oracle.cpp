#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "credible/errors.hpp"
#include "credible/oracle.hpp"

using namespace credible;

TEST_CASE("exhaustive three-variable fixture") {
    auto ds = uniform8_dataset();
    CHECK(ds.names == std::vector<std::string>{"A", "B", "C"});
    CHECK(ds.N() == 8);
    CHECK(ds.arities == std::vector<std::int64_t>{2, 2, 2});
}

TEST_CASE("random instances are reproducible from the seed") {
    std::mt19937_64 a(99), b(99);
    auto d1 = random_dataset(a, 4, 50);
    auto d2 = random_dataset(b, 4, 50);
    CHECK(d1.names == d2.names);
    CHECK(d1.arities == d2.arities);
    CHECK(d1.rows == d2.rows);

    SUBCASE("contracts") {
        std::mt19937_64 rng(1);
        CHECK_THROWS_AS(random_dataset(rng, 0, 10), contract_error);
        CHECK_THROWS_AS(random_dataset(rng, 3, 0), contract_error);
    }
}

TEST_CASE("instance check passes on the fixture for both families") {
    auto ds = uniform8_dataset();
    ScoringConfig bic;
    CHECK(!check_instance(ds, bic).has_value());
    ScoringConfig bdeu;
    bdeu.family = Family::bdeu;
    CHECK(!check_instance(ds, bdeu).has_value());
}

TEST_CASE("instance check catches an over-aggressive pruning fault") {
    auto ds = uniform8_dataset();
    OracleOptions opt;
    opt.fault_subset_prune_at_zero = true;
    auto fail = check_instance(ds, ScoringConfig{}, opt);
    REQUIRE(fail.has_value());
    CHECK(fail->description.find("missing network") != std::string::npos);
}

TEST_CASE("instance check reports a window that hit the collection limit") {
    auto ds = uniform8_dataset();
    OracleOptions opt;
    opt.epsilons = {std::log(3.0)};  // window holds 7 networks
    opt.limit = 2;
    auto fail = check_instance(ds, ScoringConfig{}, opt);
    REQUIRE(fail.has_value());
    CHECK(fail->description.find("enumeration truncated") != std::string::npos);
}

TEST_CASE("suite runs both families per instance and stops on first failure") {
    OracleRunConfig cfg;
    cfg.seed = 42;
    cfg.instances = 3;
    auto res = run_oracle_suite(cfg);
    CHECK(!res.first_failure.has_value());
    CHECK(res.instances_run == 3);
    CHECK(res.checks_run == 6);

    SUBCASE("injected fault is attributed to its instance") {
        cfg.instances = 1;
        cfg.options.fault_subset_prune_at_zero = true;
        auto bad = run_oracle_suite(cfg);
        REQUIRE(bad.first_failure.has_value());
        CHECK(bad.first_failure->description.find("instance 0") != std::string::npos);
    }

    SUBCASE("contracts") {
        OracleRunConfig big;
        big.fixed_n = 6;  // reference enumeration is capped at five variables
        CHECK_THROWS_AS(run_oracle_suite(big), resource_error);
        OracleRunConfig none;
        none.instances = 0;
        CHECK_THROWS_AS(run_oracle_suite(none), contract_error);
    }
}
