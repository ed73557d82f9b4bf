#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "safe_explore/environments.hpp"
#include "safe_explore/error.hpp"
#include "safe_explore/experiments.hpp"

using namespace safe_explore;

TEST_CASE("config json") {
  ExperimentConfig c;
  apply_json(c, R"({"experiment": "corridor_compare", "base_seed": 9, "corridor": {"length": 7, "tie_break": "lowest_index"}})");
  CHECK(c.experiment == ExperimentKind::corridor_compare);
  CHECK(c.base_seed == 9);
  CHECK(c.corridor.length == 7);
  CHECK(c.corridor.tie_break == TieBreak::lowest_index);
  CHECK_THROWS_AS(apply_json(c, R"({"bogus": 1})"), FormatError);
  CHECK_THROWS_AS(apply_json(c, R"({"grid": {"size": "big"}})"), FormatError);
  CHECK_THROWS_AS(apply_json(c, "[1, 2"), FormatError);
}

TEST_CASE("paper scale is applied before explicit config fields") {
  ExperimentConfig c;
  apply_json(c, R"({"paper_scale": true, "bandit": {"k": 50}})");
  CHECK(c.bandit.k == 50);
  CHECK(c.n_runs == 16);
  CHECK(c.grid.size == 15);
  CHECK(c.corridor.n_agents == 1000);
}

TEST_CASE("config range checks") {
  ExperimentConfig c;
  CHECK_NOTHROW(check_config(c));
  c.bandit.epsilons = {0.2};
  CHECK_THROWS_AS(check_config(c), ParameterError);
  c = ExperimentConfig{};
  c.n_runs = 0;
  CHECK_THROWS_AS(check_config(c), ParameterError);
  c = ExperimentConfig{};
  c.corridor.length = 1;
  CHECK_THROWS_AS(check_config(c), ParameterError);
}

TEST_CASE("run seeds") {
  ExperimentConfig c;
  c.base_seed = 5;
  CHECK(c.run_seed(3) == Rng::derive_seed(5, 3));
  c.seeds = {11, 12};
  CHECK(c.runs() == 2);
  CHECK(c.run_seed(1) == 12);
  CHECK_THROWS_AS(c.run_seed(2), IndexError);
}

TEST_CASE("parallel_map keeps index order and propagates errors") {
  const auto out = parallel_map<std::size_t>(100, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < 100; ++i) CHECK(out[i] == i * i);
  CHECK_THROWS_AS(parallel_map<int>(10,
                                    [](std::size_t i) -> int {
                                      if (i == 7) throw ParameterError("boom");
                                      return 0;
                                    }),
                  ParameterError);
}

TEST_CASE("corridor comparison output does not depend on the worker count") {
  ExperimentConfig c;
  c.corridor.n_agents = 12;
  c.corridor.length = 8;
  std::string first;
  for (const char* threads : {"1", "4"}) {
    setenv("SAFE_EXPLORE_THREADS", threads, 1);
    std::ostringstream os;
    write_csv(run_corridor_comparison(c), os);
    if (first.empty())
      first = os.str();
    else
      CHECK(os.str() == first);
  }
  unsetenv("SAFE_EXPLORE_THREADS");
  CHECK(first.rfind("row_type,mode,agent,seed,complete,transitions_to_goal,bumps_to_goal", 0) == 0);
}

TEST_CASE("corridor summaries are recomputable from agent rows") {
  ExperimentConfig c;
  c.corridor.n_agents = 10;
  c.corridor.length = 6;
  const auto r = run_corridor_comparison(c);
  CHECK(r.agents.size() == 20);
  for (AgentMode m : {AgentMode::assured, AgentMode::classic}) {
    std::vector<double> xs;
    for (const auto& a : r.agents)
      if (a.mode == m && a.complete) xs.push_back(static_cast<double>(*a.transitions_to_goal));
    const auto s = r.summary(m, "transitions_to_goal");
    REQUIRE(s.stat.has_value());
    CHECK(s.stat->mean == doctest::Approx(aggregate(xs).mean));
    CHECK(s.stat->std_error == doctest::Approx(aggregate(xs).std_error));
  }
}

TEST_CASE("bandit sweep") {
  ExperimentConfig c;
  c.bandit.k = 20;
  c.bandit.epsilons = {0.05, 0.1};
  c.bandit.alphas = {0.1, 1.0};
  c.n_runs = 3;
  const auto r = run_bandit_sweep(c);
  CHECK(r.runs.size() == 12);
  CHECK(r.summaries.size() == 8);
  for (const auto& run : r.runs) {
    if (run.alpha == 1.0 && run.epsilon < 0.1)
      CHECK(run.exposure_bound_over_k == doctest::Approx(static_cast<double>(run.num_unsafe) / 20.0));
  }
  std::ostringstream a, b;
  write_csv(r, a);
  write_csv(run_bandit_sweep(c), b);
  CHECK(a.str() == b.str());
}

TEST_CASE("grid experiment") {
  ExperimentConfig c;
  c.n_runs = 3;
  const auto r = run_grid_experiment(c);
  CHECK(r.all_complete());
  CHECK(r.mu == doctest::Approx(0.1));
  for (const auto& run : r.runs) {
    CHECK(run.series.back().fraction_states_condemned == doctest::Approx(1.0));
    CHECK(run.completion_step <= r.detection_time_bound);
    for (std::size_t i = 1; i < run.series.size(); ++i)
      CHECK(run.series[i].fraction_pairs_condemned >= run.series[i - 1].fraction_pairs_condemned);
  }
}

TEST_CASE("grid without holes gives a flat zero series") {
  const auto path = std::string("/tmp/safe_explore_open_grid.txt");
  {
    std::ofstream f(path);
    f << "...\n.#.\n...\n";
  }
  ExperimentConfig c;
  c.n_runs = 1;
  c.grid.map_path = path;
  c.grid.max_steps = 500;
  const auto r = run_grid_experiment(c);
  CHECK(r.all_complete());
  CHECK(r.num_unsafe_pairs == 0);
  for (const auto& p : r.runs[0].series) CHECK(p.fraction_pairs_condemned == 0.0);
  std::remove(path.c_str());
}
