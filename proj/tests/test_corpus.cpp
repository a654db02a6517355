#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "credible/data.hpp"
#include "support/temp.hpp"
#include "support/tictactoe.hpp"

#ifndef CREDIBLE_DATA_DIR
#error "CREDIBLE_DATA_DIR must point at the committed datasets"
#endif

namespace {
const std::string kCorpusCsv = std::string(CREDIBLE_DATA_DIR) + "/tic_tac_toe.csv";
}

TEST_CASE("terminal tic-tac-toe positions") {
    auto boards = ttt::terminal_boards();
    CHECK(boards.size() == 958);
    CHECK(std::is_sorted(boards.begin(), boards.end()));
    CHECK(std::adjacent_find(boards.begin(), boards.end()) == boards.end());
    const auto wins = std::count_if(boards.begin(), boards.end(), ttt::x_wins);
    CHECK(wins == 626);
}

TEST_CASE("committed dataset is byte-identical to the generator") {
    CHECK(testsupport::read_file(kCorpusCsv) == ttt::to_csv());
}

TEST_CASE("committed dataset loads with the expected shape") {
    auto ds = credible::load_csv(kCorpusCsv);
    CHECK(ds.n() == 10);
    CHECK(ds.N() == 958);
    CHECK(ds.names.front() == "top-left-square");
    CHECK(ds.names.back() == "Class");
    for (int v = 0; v < 9; ++v) CHECK(ds.arities[v] == 3);
    CHECK(ds.arities[9] == 2);
}
