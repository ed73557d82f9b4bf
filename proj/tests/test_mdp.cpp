#include <doctest.h>

#include <filesystem>

#include "safe_explore/error.hpp"
#include "safe_explore/mdp.hpp"
#include "safe_explore/mdp_io.hpp"

using namespace safe_explore;

namespace {

TabularMDP two_state() {
  TabularMDP m(2, 2);
  m.add_branch(0, 0, {0, 0.25, 1.0, 0});
  m.add_branch(0, 0, {1, 0.75, 0.0, 1});
  m.add_branch(0, 1, {0, 1.0, 0.5, 0});
  m.make_terminal(1);
  return m;
}

}  // namespace

TEST_CASE("construction and indexing") {
  CHECK_THROWS_AS(TabularMDP(0, 1), ParameterError);
  auto m = two_state();
  CHECK(m.num_pairs() == 4);
  CHECK(m.pair_index(1, 1) == 3);
  CHECK(m.is_terminal(1));
  CHECK(m.terminal_states() == std::vector<StateId>{1});
  CHECK_THROWS_AS(m.branches(2, 0), IndexError);
  CHECK_THROWS_AS(m.add_branch(0, 0, {5, 1.0, 0.0, 0}), IndexError);
  CHECK(validate(m).empty());
  CHECK(min_nonzero_prob(m) == 0.25);
  CHECK(has_immediate_damage(m, 0, 0));
  CHECK_FALSE(has_immediate_damage(m, 0, 1));
}

TEST_CASE("step frequencies follow the kernel") {
  const auto m = two_state();
  Rng rng(1);
  int damage = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto tr = step(m, 0, 0, rng);
    if (tr.damage) {
      ++damage;
      CHECK(tr.next == 1);
    } else {
      CHECK(tr.reward == 1.0);
    }
  }
  CHECK(std::abs(damage / double(n) - 0.75) < 0.015);
}

TEST_CASE("validation reports every violation") {
  TabularMDP m(2, 1);
  m.add_branch(0, 0, {1, 0.5, 0.0, 2});
  m.add_branch(0, 0, {1, -0.1, 0.0, 0});
  m.set_terminal_flag(1, true);
  m.add_branch(1, 0, {0, 1.0, 0.0, 0});
  const auto v = validate(m);
  CHECK(v.size() == 4);  // bad damage, non-positive p, bad sum, terminal not self-looping
  CHECK_THROWS_AS(require_valid(m), FormatError);
  CHECK(format_violations(v).find("(s=0, a=0)") != std::string::npos);
  TabularMDP empty(1, 1);
  CHECK(validate(empty).size() == 1);
}

TEST_CASE("json round trip") {
  const auto m = two_state();
  const auto back = parse_mdp_json(mdp_to_json(m));
  CHECK(back == m);
  const auto path = std::filesystem::temp_directory_path() / "safe_explore_mdp.json";
  save_mdp(m, path);
  CHECK(load_mdp(path) == m);
  std::filesystem::remove(path);
}

TEST_CASE("json errors") {
  CHECK_THROWS_AS(parse_mdp_json("{"), FormatError);
  CHECK_THROWS_AS(parse_mdp_json(R"({"n_states": 1})"), FormatError);
  CHECK_THROWS_AS(parse_mdp_json(R"({"n_states": 1, "n_actions": 1, "terminal": [],
      "transitions": [{"s": 3, "a": 0, "branches": []}]})"),
                  FormatError);
  const auto bad = parse_mdp_json(R"({"n_states": 1, "n_actions": 1, "terminal": [],
      "transitions": [{"s": 0, "a": 0, "branches": [{"sp": 0, "p": 0.5, "r": 0, "d": 0}]}]})");
  CHECK(validate(bad).size() == 1);
  CHECK_THROWS_AS(load_mdp("/nonexistent/m.json"), FormatError);
}
