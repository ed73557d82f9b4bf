#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "safe_explore/barrier.hpp"
#include "safe_explore/mdp.hpp"
#include "safe_explore/rng.hpp"
#include "safe_explore/xreal.hpp"

namespace safe_explore {

class QTable {
 public:
  QTable(std::size_t num_states, std::size_t num_actions);
  explicit QTable(const TabularMDP& mdp) : QTable(mdp.num_states(), mdp.num_actions()) {}

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  XReal at(StateId s, ActionId a) const;
  void set(StateId s, ActionId a, XReal v);
  /// max over actions; -inf when every entry is -inf.
  XReal state_value(StateId s) const;

  bool operator==(const QTable&) const = default;

 private:
  std::size_t index(StateId s, ActionId a) const;
  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<XReal> values_;
};

enum class StepSchedule { constant, inverse_visits };  // eta, or 1/(1+visits(s,a))
enum class TieBreak { random, lowest_index };

struct LearnerParams {
  double eta = 0.1;
  double gamma = 0.9;
  double eps_explore = 0.1;
  std::int64_t episode_cap = 1000;
  StepSchedule schedule = StepSchedule::constant;
  TieBreak tie_break = TieBreak::random;
};

void check_params(const LearnerParams& p);

/**
 * Q(s,a) <- (1-eta) Q(s,a) + eta (r + gamma max_a' Q(s',a')), then
 * Q(s,a) <- B(s,a) + Q(s,a). The bootstrap term is 0 when s' is terminal.
 */
void q_update(QTable& q, const BarrierTable& b, StateId s, ActionId a, StateId next, XReal reward,
              bool next_terminal, double eta, double gamma);

/// Plain Q-learning update (no barrier term). Reward may be -inf.
void classic_q_update(QTable& q, StateId s, ActionId a, StateId next, XReal reward, bool next_terminal,
                      double eta, double gamma);

struct GenerativeRun {
  QTable q;
  BarrierTable b;
  std::int64_t steps = 0;
  bool exhausted = false;  // every pair condemned before max_steps
};

/// Called after each update with the tables and the transition just applied.
using GenerativeObserver = std::function<void(const QTable&, const BarrierTable&, const Transition&)>;

/**
 * Draws (s,a) uniformly among pairs with B != -inf, samples one transition,
 * applies barrier_update and then q_update with the updated barrier.
 */
GenerativeRun generative_assured_q(const TabularMDP& mdp, const LearnerParams& params, Rng& rng,
                                   std::int64_t max_steps, const GenerativeObserver& observer = {});

enum class AgentMode { assured, classic };

/**
 * With probability eps a uniform draw from the admissible set, otherwise an
 * argmax over it. Assured mode admits actions with B != -inf; classic admits
 * every action. Throws DeadStateError when assured mode has no admissible action.
 */
ActionId epsilon_greedy(const QTable& q, const BarrierTable* b, StateId s, double eps, Rng& rng,
                        TieBreak tie_break = TieBreak::lowest_index);

struct EpisodeRecord {
  std::int64_t episode = 0;  // 1-based
  std::int64_t steps = 0;
  std::int64_t bumps = 0;
  bool reached_goal = false;
  std::int64_t cumulative_steps = 0;
};

struct EpisodeLog {
  std::vector<EpisodeRecord> episodes;
  std::optional<std::int64_t> transitions_to_goal;  // steps up to and including the first goal arrival
  std::optional<std::int64_t> bumps_to_goal;        // damaged episodes before the first goal arrival
  std::optional<std::int64_t> episodes_to_goal;
  std::int64_t condemned_reselections = 0;  // assured picks of an action already at B = -inf
  bool complete = false;
};

struct EpisodicOptions {
  StateId start = 0;
  StateId goal = 0;
  std::int64_t max_episodes = 1000;
  bool stop_at_goal = true;  // stop training after the first goal arrival
};

/**
 * Runs episodes from options.start under epsilon-greedy. An episode ends on
 * damage, on entering a terminal state, or after episode_cap steps. Classic
 * mode learns with reward -inf on damage; assured mode runs barrier_update
 * and q_update each step and masks condemned actions.
 */
EpisodeLog run_episodic(const TabularMDP& env, AgentMode mode, const LearnerParams& params, Rng& rng,
                        const EpisodicOptions& options, QTable* q_out = nullptr, BarrierTable* b_out = nullptr);

void write_episode_log_csv(const EpisodeLog& log, std::ostream& out);

struct Decomposition {
  std::vector<double> finite_part;  // reward-only Q^pi per pair_index
  BarrierTable barrier_part;        // B^pi
  XReal q(const TabularMDP& mdp, StateId s, ActionId a) const {
    return barrier_part.at(s, a) + XReal(finite_part[mdp.pair_index(s, a)]);
  }
};

/**
 * Q^pi of a deterministic policy split into its reward-only part (linear
 * solve) and its barrier part B^pi (closure of damage reachability under pi).
 */
Decomposition policy_eval_decomposed(const TabularMDP& mdp, const std::vector<ActionId>& policy, double gamma);

}  // namespace safe_explore
