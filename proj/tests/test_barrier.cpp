#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "safe_explore/barrier.hpp"
#include "safe_explore/environments.hpp"
#include "safe_explore/error.hpp"

using namespace safe_explore;

namespace {

TabularMDP forced_chain() {
  // s_a = 0 always moves to s_b = 1; every action of s_b damages
  TabularMDP m(2, 2);
  for (ActionId a = 0; a < 2; ++a) {
    m.add_branch(0, a, {1, 1.0, 0.0, 0});
    m.add_branch(1, a, {1, 1.0, 0.0, 1});
  }
  return m;
}

std::vector<char> condemned_flags(const BarrierTable& b) {
  std::vector<char> out;
  for (StateId s = 0; s < b.num_states(); ++s)
    for (ActionId a = 0; a < b.num_actions(); ++a) out.push_back(b.condemned(s, a) ? 1 : 0);
  return out;
}

}  // namespace

TEST_CASE("barrier table basics") {
  BarrierTable b(2, 3);
  CHECK(b.at(1, 2) == XReal(0.0));
  b.condemn(1, 2);
  CHECK(b.condemned(1, 2));
  CHECK(b.admissible(1) == std::vector<ActionId>{0, 1});
  CHECK(b.state_value(1) == XReal(0.0));
  b.condemn(1, 0);
  b.condemn(1, 1);
  CHECK(b.state_value(1).is_neg_inf());
  CHECK(b.count_condemned() == 3);
  CHECK_THROWS_AS(b.at(2, 0), IndexError);
  BarrierTable c(2, 3);
  CHECK(c.condemned_subset_of(b));
  CHECK_FALSE(b.condemned_subset_of(c));
}

TEST_CASE("barrier_update") {
  BarrierTable b(3, 2);
  CHECK(barrier_update(b, 0, 0, 1, 1));  // damage
  CHECK(b.condemned(0, 0));
  CHECK_FALSE(barrier_update(b, 0, 0, 1, 0));  // -inf is absorbing
  CHECK(b.condemned(0, 0));
  CHECK_FALSE(barrier_update(b, 0, 1, 1, 0));  // safe observation, live successor
  CHECK_FALSE(b.condemned(0, 1));
  b.condemn(2, 0);
  b.condemn(2, 1);
  CHECK(barrier_update(b, 1, 0, 2, 0));  // dead successor
}

TEST_CASE("B* on the corridor") {
  const auto c = build_corridor(15);
  const auto bstar = bstar_oracle(c.mdp);
  CHECK(bstar.count_condemned() == 31);
  for (std::size_t i = 1; i <= 15; ++i) {
    CHECK(bstar.at(c.cell(i), kRight) == XReal(0.0));
    CHECK(bstar.condemned(c.cell(i), kUp));
    CHECK(bstar.condemned(c.cell(i), kDown));
    CHECK(bstar.condemned(c.cell(i), kLeft) == (i == 1));
  }
}

TEST_CASE("B* agrees with policy enumeration on small random MDPs") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 2 + seed % 4, a = 1 + seed % 3;
    const auto m = gen_random_mdp(n, a, 1 + seed % 2, 0.15, seed);
    CHECK(condemned_flags(bstar_oracle(m)) == oracle::bstar_by_enumeration(m));
  }
}

TEST_CASE("bellman residual selects the greatest fixed point") {
  const auto c = build_corridor(6);
  CHECK(bellman_residual(bstar_oracle(c.mdp), c.mdp));
  BarrierTable none(c.mdp);
  CHECK_FALSE(bellman_residual(none, c.mdp));

  TabularMDP safe(2, 1);
  safe.add_branch(0, 0, {1, 1.0, 0.0, 0});
  safe.add_branch(1, 0, {0, 1.0, 0.0, 0});
  BarrierTable all(safe);
  all.condemn(0, 0);
  all.condemn(1, 0);
  CHECK(is_barrier_fixed_point(all, safe));
  CHECK_FALSE(bellman_residual(all, safe));
  CHECK(bellman_residual(BarrierTable(safe), safe));
}

TEST_CASE("lag partition") {
  SUBCASE("corridor has no forced state") {
    const auto c = build_corridor(15);
    const auto lp = lag_partition(c.mdp);
    CHECK(lp.lag == 0);
    CHECK(lp.unsafe_levels.empty());
    CHECK(lp.safe_remainder.size() == 17);
  }
  SUBCASE("two-state forced chain") {
    const auto lp = lag_partition(forced_chain());
    CHECK(lp.lag == 2);
    REQUIRE(lp.unsafe_levels.size() == 2);
    CHECK(lp.unsafe_levels[0] == std::vector<StateId>{1});
    CHECK(lp.unsafe_levels[1] == std::vector<StateId>{0});
    CHECK(lp.safe_remainder.empty());
  }
  SUBCASE("levels are exactly the states B* condemns entirely") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const auto m = gen_random_mdp(5, 2, 2, 0.3, seed);
      const auto lp = lag_partition(m);
      const auto bstar = bstar_oracle(m);
      std::vector<char> in_level(m.num_states(), 0);
      for (const auto& level : lp.unsafe_levels)
        for (StateId s : level) in_level[s] = 1;
      for (StateId s = 0; s < m.num_states(); ++s) CHECK((in_level[s] != 0) == bstar.state_value(s).is_neg_inf());
    }
  }
}

TEST_CASE("barrier time bound") {
  CHECK(bound_barrier_time(build_corridor(15).mdp) == doctest::Approx(326.67596370158344).epsilon(1e-12));
  // forced chain: L = 2, 4 pairs, mu = 1
  CHECK(bound_barrier_time(forced_chain()) == doctest::Approx(3 * 4 * (1 + 0.5 + 1.0 / 3 + 0.25)));
}

TEST_CASE("barrier learner is sound and stops at B*") {
  const auto c = build_corridor(8);
  const auto bstar = bstar_oracle(c.mdp);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto run = barrier_learner(c.mdp, rng, 100000);
    CHECK(run.complete);
    CHECK(run.table == bstar);
    CHECK(static_cast<std::int64_t>(run.trace.size()) == run.steps);
    std::size_t n = 0;
    for (const auto& t : run.trace) {
      if (t.newly_condemned) {
        ++n;
        CHECK(bstar.condemned(t.s, t.a));
        CHECK(run.detection_step[c.mdp.pair_index(t.s, t.a)] == t.step);
      }
      CHECK(t.n_condemned == n);
    }
    for (StateId s = 0; s < c.mdp.num_states(); ++s)
      for (ActionId a = 0; a < kNumMoves; ++a)
        CHECK(run.detection_step[c.mdp.pair_index(s, a)].has_value() == bstar.condemned(s, a));
  }
}

TEST_CASE("barrier learner on a damage-free MDP stops immediately") {
  TabularMDP m(1, 1);
  m.add_branch(0, 0, {0, 1.0, 0.0, 0});
  Rng rng(1);
  const auto run = barrier_learner(m, rng, 10);
  CHECK(run.complete);
  CHECK(run.steps == 0);
}

TEST_CASE("barrier learner respects max_steps") {
  const auto w = build_unstable_grid(GridSpec::default_layout(9, 0.6));
  Rng rng(1);
  const auto run = barrier_learner(w.mdp, rng, 50);
  CHECK_FALSE(run.complete);
  CHECK(run.steps == 50);
}

TEST_CASE("barrier csv output") {
  const auto c = build_corridor(3);
  Rng rng(2);
  const auto run = barrier_learner(c.mdp, rng, 10000);
  std::ostringstream trace, summary;
  write_barrier_trace_csv(run, trace);
  write_barrier_summary_csv(run, c.mdp, summary);
  CHECK(trace.str().rfind("step,s,a,s_next,d,newly_condemned,n_condemned\n", 0) == 0);
  CHECK(summary.str().rfind("s,a,detection_step,bound,lag,mu\n", 0) == 0);
  // one row per pair plus header
  const std::string text = summary.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 20);
}
