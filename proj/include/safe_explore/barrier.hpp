#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "safe_explore/mdp.hpp"
#include "safe_explore/rng.hpp"
#include "safe_explore/xreal.hpp"

namespace safe_explore {

/// Extended-real table over state-action pairs holding only 0 or -inf.
class BarrierTable {
 public:
  BarrierTable(std::size_t num_states, std::size_t num_actions);
  explicit BarrierTable(const TabularMDP& mdp) : BarrierTable(mdp.num_states(), mdp.num_actions()) {}

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }

  XReal at(StateId s, ActionId a) const;
  bool condemned(StateId s, ActionId a) const { return at(s, a).is_neg_inf(); }
  void condemn(StateId s, ActionId a);

  /// max over a' of B(s, a'): 0 if some action is still admissible, else -inf.
  XReal state_value(StateId s) const;
  std::vector<ActionId> admissible(StateId s) const;
  std::size_t count_condemned() const;
  /// Every -inf entry of this table is also -inf in other.
  bool condemned_subset_of(const BarrierTable& other) const;

  bool operator==(const BarrierTable&) const = default;

 private:
  std::size_t index(StateId s, ActionId a) const;
  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<char> condemned_;
};

/// B(s,a) <- B(s,a) + log(1-d) + max_a' B(s',a'). Returns true if (s,a) became -inf.
bool barrier_update(BarrierTable& b, StateId s, ActionId a, StateId next, int damage);

/// Greatest {0,-inf} fixed point of the barrier Bellman equation, by backward closure.
BarrierTable bstar_oracle(const TabularMDP& mdp);

/// The local Bellman condition holds at every pair: B(s,a) = -inf exactly when
/// some branch has damage or leads to a state whose actions are all -inf.
bool is_barrier_fixed_point(const BarrierTable& b, const TabularMDP& mdp);

/// True iff b is the greatest fixed point, i.e. satisfies the Bellman
/// condition and condemns nothing beyond what damage forces.
bool bellman_residual(const BarrierTable& b, const TabularMDP& mdp);

struct LagPartition {
  std::vector<std::vector<StateId>> unsafe_levels;  // S_1..S_L
  std::vector<StateId> safe_remainder;
  std::size_t lag = 0;
};

/**
 * S_1: states where every action can damage immediately. S_l: remaining
 * states where every action can damage immediately or enter S_1..S_{l-1}.
 * Levels stop at the first empty set; the remainder holds the states with a
 * surely-safe action.
 */
LagPartition lag_partition(const TabularMDP& mdp);

/// (L+1) * (|S||A| / mu) * H_{|S||A|}, with mu the smallest branch probability.
double bound_barrier_time(const TabularMDP& mdp);

struct BarrierStep {
  std::int64_t step = 0;  // 1-based
  StateId s = 0;
  ActionId a = 0;
  StateId next = 0;
  int damage = 0;
  bool newly_condemned = false;
  std::size_t n_condemned = 0;
};

struct BarrierRun {
  BarrierTable table;
  std::vector<BarrierStep> trace;                         // empty unless recorded
  std::vector<std::optional<std::int64_t>> detection_step;  // per pair_index
  std::vector<std::size_t> condemned_series;              // n_condemned after each step, if recorded
  std::int64_t steps = 0;
  bool complete = false;  // reached B*
};

struct BarrierLearnerOptions {
  bool record_trace = true;
  bool record_series = false;
};

/**
 * Draws (s,a) uniformly among pairs with B != -inf, samples one transition and
 * applies barrier_update, until B equals bstar_oracle(mdp) or max_steps.
 */
BarrierRun barrier_learner(const TabularMDP& mdp, Rng& rng, std::int64_t max_steps,
                           const BarrierLearnerOptions& options = {});

void write_barrier_trace_csv(const BarrierRun& run, std::ostream& out);
/// One row per pair: s, a, detection_step (blank if never), plus run-level bound, lag, mu.
void write_barrier_summary_csv(const BarrierRun& run, const TabularMDP& mdp, std::ostream& out);

}  // namespace safe_explore
