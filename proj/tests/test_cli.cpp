#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_app.hpp"
#include "credible/prune.hpp"
#include "support/temp.hpp"

using testsupport::TempDir;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
    nlohmann::json json() const { return nlohmann::json::parse(out); }
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = credible::cli::run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

// Every joint state of three binary variables exactly once.
std::string exhaustive_csv() {
    std::string s = "A,B,C\n";
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                s += std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + "\n";
    return s;
}

constexpr double kOptEmpty = 19.754694645958441;  // 3 * (8 ln 2 + ln(8)/2)

}  // namespace

TEST_CASE("score writes a reloadable file and reports generation statistics") {
    TempDir td;
    const auto csv = td.write("d.csv", exhaustive_csv());
    const auto out_path = (td.path() / "d.scores").string();
    auto r = run({"score", "--data", csv, "-o", out_path});
    REQUIRE(r.code == 0);
    auto j = r.json();
    CHECK(j["stats"]["generated"].get<int>() == 12);
    CHECK(j["variables"].get<int>() == 3);
    CHECK(j["family"].get<std::string>() == "bic");
    CHECK(j["output"].get<std::string>() == out_path);
    auto table = credible::read_score_file(out_path);
    CHECK(table.n() == 3);
    CHECK(table.names == std::vector<std::string>{"A", "B", "C"});
}

TEST_CASE("solve finds the empty network on the exhaustive fixture") {
    TempDir td;
    const auto csv = td.write("d.csv", exhaustive_csv());
    auto r = run({"solve", "--data", csv});
    REQUIRE(r.code == 0);
    auto j = r.json();
    CHECK(j["opt"].get<double>() == doctest::Approx(kOptEmpty).epsilon(1e-12));
    CHECK(j["parents"] == nlohmann::json::parse("[[],[],[]]"));
    CHECK(j["names"] == nlohmann::json::parse("[\"A\",\"B\",\"C\"]"));
}

TEST_CASE("solve accepts a pre-generated score file in place of data") {
    TempDir td;
    const auto csv = td.write("d.csv", exhaustive_csv());
    const auto scores = (td.path() / "d.scores").string();
    REQUIRE(run({"score", "--data", csv, "-o", scores}).code == 0);
    auto r = run({"solve", "--scores", scores});
    REQUIRE(r.code == 0);
    CHECK(r.json()["opt"].get<double>() == doctest::Approx(kOptEmpty).epsilon(1e-6));
}

TEST_CASE("enumerate windows") {
    TempDir td;
    const auto csv = td.write("d.csv", exhaustive_csv());

    SUBCASE("bayes-factor window of 3") {
        auto r = run({"enumerate", "--data", csv, "--bf", "3"});
        REQUIRE(r.code == 0);
        auto j = r.json();
        CHECK(j["n_dags"].get<int>() == 7);
        CHECK(j["bf"].get<double>() == 3.0);
        CHECK(j["truncated"].get<bool>() == false);
        CHECK(!j.contains("n_mecs"));
        CHECK(!j["dags"][0].contains("mec_id"));
        CHECK(!j.contains("edge_prob"));
    }

    SUBCASE("explicit window width matches the equivalent bayes factor") {
        auto r = run({"enumerate", "--data", csv, "--epsilon", "1.0986122886681098"});
        REQUIRE(r.code == 0);
        CHECK(r.json()["n_dags"].get<int>() == 7);
    }

    SUBCASE("default window is a bayes factor of 20") {
        auto r = run({"enumerate", "--data", csv});
        REQUIRE(r.code == 0);
        CHECK(r.json()["n_dags"].get<int>() == 16);
    }

    SUBCASE("equivalence-class grouping") {
        auto r = run({"enumerate", "--data", csv, "--bf", "3", "--mec"});
        REQUIRE(r.code == 0);
        auto j = r.json();
        CHECK(j["n_mecs"].get<int>() == 4);
        CHECK(j["dags"][0]["mec_id"].get<int>() == 0);
    }

    SUBCASE("uniform averaging with a csv matrix") {
        const auto matrix = (td.path() / "edges.csv").string();
        auto r = run({"enumerate", "--data", csv, "--bf", "3", "--average", "--uniform",
                      "--edge-csv", matrix});
        REQUIRE(r.code == 0);
        auto j = r.json();
        REQUIRE(j["edge_prob"].size() == 9);
        CHECK(j["edge_prob"][1].get<double>() == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
        CHECK(j["edge_prob"][0].get<double>() == 0.0);
        const auto text = testsupport::read_file(matrix);
        CHECK(text.rfind(",A,B,C\n", 0) == 0);
        CHECK(text.find("0.1428571429") != std::string::npos);
    }

    SUBCASE("collection limit truncates with a warning") {
        auto r = run({"enumerate", "--data", csv, "--bf", "3", "--limit", "3"});
        REQUIRE(r.code == 0);
        auto j = r.json();
        CHECK(j["truncated"].get<bool>() == true);
        CHECK(j["n_dags"].get<int>() == 3);
        CHECK(j["dags"].size() == 3);
        CHECK(r.err.find("truncated") != std::string::npos);
    }
}

TEST_CASE("usage errors exit with code 2") {
    TempDir td;
    const auto csv = td.write("d.csv", exhaustive_csv());
    CHECK(run({}).code == 2);
    CHECK(run({"solve", "--data", csv, "--bogus"}).code == 2);
    CHECK(run({"enumerate", "--data", csv, "--bf", "3", "--epsilon", "1"}).code == 2);
    CHECK(run({"solve", "--data", csv, "--ess", "0"}).code == 2);
    CHECK(run({"score", "--data", csv}).code == 2);  // missing -o
    CHECK(run({"enumerate", "--data", csv, "--edge-csv", "x.csv"}).code == 2);
    CHECK(run({"enumerate", "--data", csv, "--uniform"}).code == 2);
    CHECK(run({"solve", "--data", csv, "--palim", "-1"}).code == 2);

    auto r = run({"solve"});  // neither --data nor --scores
    CHECK(r.code == 2);
    CHECK(r.err.find("provide --data or --scores") != std::string::npos);
}

TEST_CASE("malformed input and contract violations exit with code 3") {
    TempDir td;
    const auto csv = td.write("d.csv", exhaustive_csv());
    CHECK(run({"enumerate", "--data", csv, "--bf", "0.5"}).code == 3);

    const auto bad = td.write("bad.csv", "A,B\n0,1\n0\n");
    auto r = run({"solve", "--data", bad});
    CHECK(r.code == 3);
    CHECK(r.err.find("error:") != std::string::npos);

    // A table generated for a narrow window cannot serve a wider one.
    const auto scores = (td.path() / "narrow.scores").string();
    REQUIRE(run({"score", "--data", csv, "--epsilon", "1.0986122886681098", "-o", scores})
                .code == 0);
    CHECK(run({"enumerate", "--scores", scores, "--bf", "20"}).code == 3);
}

TEST_CASE("resource limits exit with code 4") {
    TempDir td;
    const auto csv = td.write("d.csv", exhaustive_csv());
    CHECK(run({"oracle-check", "--n", "6"}).code == 4);
    CHECK(run({"enumerate", "--data", csv, "--n-cap", "2"}).code == 4);
}

TEST_CASE("oracle-check subcommand") {
    SUBCASE("clean run") {
        auto r = run({"oracle-check", "--instances", "2", "--seed", "7"});
        REQUIRE(r.code == 0);
        auto j = r.json();
        CHECK(j["ok"].get<bool>() == true);
        CHECK(j["instances"].get<int>() == 2);
        CHECK(j["checks"].get<int>() == 4);
        CHECK(j["failure"].is_null());
    }

    SUBCASE("injected fault is caught and reported") {
        auto r = run({"oracle-check", "--instances", "1", "--inject-fault"});
        CHECK(r.code == 1);
        CHECK(r.err.find("counterexample") != std::string::npos);
        auto j = r.json();
        CHECK(j["ok"].get<bool>() == false);
        CHECK(j["failure"].is_string());
    }
}

TEST_CASE("help text") {
    auto top = run({"--help"});
    CHECK(top.code == 0);
    CHECK(top.out.find("credible") != std::string::npos);
    auto sub = run({"enumerate", "--help"});
    CHECK(sub.code == 0);
    CHECK(sub.out.find("--mec") != std::string::npos);
}

TEST_CASE("output is deterministic and independent of the worker count") {
    TempDir td;
    const auto csv = td.write("d.csv", exhaustive_csv());
    const std::vector<std::string> cmd = {"enumerate", "--data", csv, "--bf", "150", "--mec"};
    auto base = run(cmd);
    REQUIRE(base.code == 0);
    CHECK(run(cmd).out == base.out);

    auto threaded = cmd;
    threaded.insert(threaded.end(), {"--workers", "3"});
    CHECK(run(threaded).out == base.out);

    ::setenv("CREDIBLE_WORKERS", "4", 1);
    CHECK(run(cmd).out == base.out);
    ::setenv("CREDIBLE_WORKERS", "abc", 1);  // ignored, falls back to one worker
    CHECK(run(cmd).out == base.out);
    ::unsetenv("CREDIBLE_WORKERS");
}
