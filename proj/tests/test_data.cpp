#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rtmix/data.hpp"
#include "rtmix/error.hpp"
#include "support.hpp"

using namespace rtmix;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

template <class E>
std::string message_of(const std::string& text) {
  try {
    parse(text);
  } catch (const E& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("sum coding") {
  CHECK(sum_code(Condition::SubjectRelative) == -0.5);
  CHECK(sum_code(Condition::ObjectRelative) == 0.5);
  CHECK(sum_code(Condition::SubjectRelative) + sum_code(Condition::ObjectRelative) == 0.0);
}

TEST_CASE("condition labels") {
  CHECK(parse_condition("SR") == Condition::SubjectRelative);
  CHECK(parse_condition("or") == Condition::ObjectRelative);
  CHECK(parse_condition("Subj-Ext") == Condition::SubjectRelative);
  CHECK(parse_condition("obj-ext") == Condition::ObjectRelative);
  CHECK_FALSE(parse_condition("subject").has_value());
  CHECK_FALSE(parse_condition("").has_value());
}

TEST_CASE("load a small file") {
  const Dataset d = parse(
      "participant,item,condition,rt\n"
      "s7,i3,SR,350\n"
      "s7,i9,OR,412.5\n"
      "s2,i3,obj-ext,298\n"
      "s2,i9,subj-ext,505\n");
  CHECK(d.size() == 4);
  CHECK(d.n_participants() == 2);
  CHECK(d.n_items() == 2);
  // ids are relabelled in order of first appearance
  CHECK(d[0].participant == 0);
  CHECK(d[2].participant == 1);
  CHECK(d.participant_label(1) == "s2");
  CHECK(d[1].item == 1);
  CHECK(d[1].rt_ms == 412.5);
  CHECK(d[2].condition == Condition::ObjectRelative);
  CHECK(d[3].condition == Condition::SubjectRelative);
}

TEST_CASE("header handling") {
  SUBCASE("columns in any order, extra columns, case, BOM, CRLF") {
    const Dataset d = parse(
        "\xEF\xBB\xBFRT,Condition,extra,Item,Participant\r\n"
        "300,sr,x,1,1\r\n"
        "\r\n"
        "\"310\",or,y,2,1\r\n");
    CHECK(d.size() == 2);
    CHECK(d[1].rt_ms == 310.0);
  }
  SUBCASE("missing column") {
    CHECK_THROWS_AS(parse("participant,item,rt\n1,1,300\n"), FormatError);
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(parse(""), FormatError);
  }
}

TEST_CASE("row errors carry the line number") {
  const std::string head = "participant,item,condition,rt\n1,1,SR,300\n";
  CHECK(message_of<RowError>(head + "1,2,OR,-5\n").rfind("line 3: ", 0) == 0);
  CHECK(message_of<RowError>(head + "1,2,OR,abc\n").rfind("line 3: ", 0) == 0);
  CHECK(message_of<RowError>(head + "1,2,XX,300\n").rfind("line 3: ", 0) == 0);
  CHECK(message_of<RowError>(head + "1,2,OR\n").rfind("line 3: ", 0) == 0);
  CHECK(message_of<RowError>(head + "1,2,OR,\n").rfind("line 3: ", 0) == 0);
  CHECK(message_of<RowError>(head + "1,1,OR,320\n").rfind("line 3: ", 0) == 0);
  try {
    parse(head + "\n1,2,OR,0\n");
    FAIL("expected a row error");
  } catch (const RowError& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("dataset invariants") {
  std::vector<Trial> t{{0, 0, Condition::SubjectRelative, 300.0},
                       {0, 0, Condition::ObjectRelative, 310.0}};
  CHECK_THROWS_AS(Dataset(t, {"a"}, {"x"}), DomainError);
  t[1] = {0, 1, Condition::ObjectRelative, 310.0};
  CHECK_THROWS_AS(Dataset(t, {"a"}, {"x"}), DomainError);
  t[1].rt_ms = std::nan("");
  CHECK_THROWS_AS(Dataset(t, {"a"}, {"x", "y"}), DomainError);
}

TEST_CASE("csv round trip") {
  const Dataset d = test::grid_dataset(3, 4, 5);
  std::ostringstream out;
  write_csv(d, out);
  const Dataset back = parse(out.str());
  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back[i].participant == d[i].participant);
    CHECK(back[i].item == d[i].item);
    CHECK(back[i].condition == d[i].condition);
    CHECK(back[i].rt_ms == d[i].rt_ms);
  }
}

TEST_CASE("subset keeps the label tables") {
  const Dataset d = test::grid_dataset(3, 4, 5);
  const std::vector<std::size_t> idx{0, 5, 11};
  const Dataset s = d.subset(idx);
  CHECK(s.size() == 3);
  CHECK(s.n_participants() == 3);
  CHECK(s.n_items() == 4);
  CHECK(s[1].rt_ms == d[5].rt_ms);
}

TEST_CASE("folds: 40 trials, k = 10") {
  const Dataset d = test::grid_dataset(4, 10, 2);
  const FoldPlan plan = make_folds(d, 10, 7);
  for (std::size_t f = 0; f < 10; ++f) CHECK(plan.heldout(f).size() == 4);
}

TEST_CASE("folds: partition, stratification, coverage, determinism") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset d = test::grid_dataset(3 + seed % 5, 4 + seed % 7, seed);
    const std::size_t k = 2 + seed % 9;
    const FoldPlan plan = make_folds(d, k, seed * 31);
    CAPTURE(seed);

    std::vector<int> seen(d.size(), 0);
    for (std::size_t f = 0; f < k; ++f) {
      for (std::size_t i : plan.heldout(f)) ++seen[i];
      const auto train = plan.training(f);
      CHECK(train.size() + plan.heldout(f).size() == d.size());
      std::set<std::size_t> ps, items;
      for (std::size_t i : train) {
        ps.insert(d[i].participant);
        items.insert(d[i].item);
      }
      CHECK(ps.size() == d.n_participants());
      CHECK(items.size() == d.n_items());
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));

    for (std::size_t p = 0; p < d.n_participants(); ++p)
      for (auto c : {Condition::SubjectRelative, Condition::ObjectRelative}) {
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < d.size(); ++i)
          if (d[i].participant == p && d[i].condition == c)
            ++counts[plan.assignment[i]];
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        CHECK(*hi - *lo <= 1);
      }

    const FoldPlan again = make_folds(d, k, seed * 31);
    CHECK(again.assignment == plan.assignment);
    CHECK(again.fingerprint() == plan.fingerprint());
  }
}

TEST_CASE("folds: participant with nine trials under k = 10") {
  // Participant 0 reads 9 items, others read all 12.
  std::vector<Trial> trials;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 12; ++j) {
      if (i == 0 && j >= 9) continue;
      const auto c = (i + j) % 2 ? Condition::ObjectRelative : Condition::SubjectRelative;
      trials.push_back({i, j, c, 300.0 + 10.0 * static_cast<double>(i * 12 + j)});
    }
  const Dataset d(trials, {"a", "b", "c", "d"},
                  {"1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11", "12"});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const FoldPlan plan = make_folds(d, 10, seed);
    std::vector<int> per_fold(10, 0);
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i].participant == 0) ++per_fold[plan.assignment[i]];
    // Enumerate: every fold holds at most one of the nine trials, so the
    // remaining eight are always in training.
    CHECK(*std::max_element(per_fold.begin(), per_fold.end()) <= 1);
    CHECK(std::count(per_fold.begin(), per_fold.end(), 1) == 9);
  }
}

TEST_CASE("folds: errors") {
  const Dataset d = test::grid_dataset(3, 4, 1);
  CHECK_THROWS_AS(make_folds(d, 1, 1), DomainError);
  CHECK_THROWS_AS(make_folds(d, 13, 1), InfeasibleSplitError);

  std::vector<Trial> t{{0, 0, Condition::SubjectRelative, 300.0},
                       {0, 1, Condition::ObjectRelative, 310.0},
                       {1, 0, Condition::ObjectRelative, 320.0}};
  const Dataset lonely(t, {"a", "b"}, {"x", "y"});
  CHECK_THROWS_AS(make_folds(lonely, 2, 1), InfeasibleSplitError);
}

TEST_CASE("fold plan csv") {
  const Dataset d = test::grid_dataset(2, 4, 3);
  const FoldPlan plan = make_folds(d, 2, 3);
  std::ostringstream out;
  write_csv(plan, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "trial_index,fold");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    CHECK(std::stoul(line.substr(0, comma)) == rows);
    const auto fold = std::stoul(line.substr(comma + 1));
    CHECK(fold == plan.assignment[rows] + 1);
    ++rows;
  }
  CHECK(rows == d.size());
}

TEST_CASE("mean log rt") {
  std::vector<Trial> t{{0, 0, Condition::SubjectRelative, std::exp(5.0)},
                       {0, 1, Condition::ObjectRelative, std::exp(7.0)}};
  CHECK(mean_log_rt(Dataset(t, {"a"}, {"x", "y"})) == doctest::Approx(6.0).epsilon(1e-14));
}
