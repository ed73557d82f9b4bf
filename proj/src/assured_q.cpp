#include "safe_explore/assured_q.hpp"

#include <Eigen/Dense>

#include "safe_explore/csv.hpp"
#include "safe_explore/error.hpp"
#include "pair_pool.hpp"

namespace safe_explore {

QTable::QTable(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states), num_actions_(num_actions), values_(num_states * num_actions, XReal(0.0)) {
  if (num_states == 0 || num_actions == 0) throw ParameterError("Q table needs at least one pair");
}

std::size_t QTable::index(StateId s, ActionId a) const {
  if (s >= num_states_) throw IndexError("state " + std::to_string(s) + " out of range");
  if (a >= num_actions_) throw IndexError("action " + std::to_string(a) + " out of range");
  return s * num_actions_ + a;
}

XReal QTable::at(StateId s, ActionId a) const { return values_[index(s, a)]; }
void QTable::set(StateId s, ActionId a, XReal v) { values_[index(s, a)] = v; }

XReal QTable::state_value(StateId s) const {
  XReal m = XReal::neg_inf();
  for (ActionId a = 0; a < num_actions_; ++a) m = max(m, at(s, a));
  return m;
}

void check_params(const LearnerParams& p) {
  if (!(p.eta > 0.0 && p.eta <= 1.0)) throw ParameterError("eta must lie in (0, 1]");
  if (!(p.gamma >= 0.0 && p.gamma < 1.0)) throw ParameterError("gamma must lie in [0, 1)");
  if (!(p.eps_explore >= 0.0 && p.eps_explore <= 1.0)) throw ParameterError("eps_explore must lie in [0, 1]");
  if (p.episode_cap <= 0) throw ParameterError("episode_cap must be positive");
}

namespace {

XReal td_blend(const QTable& q, StateId s, ActionId a, StateId next, XReal reward, bool next_terminal, double eta,
               double gamma) {
  const XReal bootstrap = next_terminal ? XReal(0.0) : gamma * q.state_value(next);
  return (1.0 - eta) * q.at(s, a) + eta * (reward + bootstrap);
}

double step_size(const LearnerParams& p, std::vector<std::int64_t>& visits, std::size_t pair) {
  if (p.schedule == StepSchedule::constant) return p.eta;
  return 1.0 / (1.0 + static_cast<double>(visits[pair]++));
}

}  // namespace

void q_update(QTable& q, const BarrierTable& b, StateId s, ActionId a, StateId next, XReal reward, bool next_terminal,
              double eta, double gamma) {
  q.set(s, a, b.at(s, a) + td_blend(q, s, a, next, reward, next_terminal, eta, gamma));
}

void classic_q_update(QTable& q, StateId s, ActionId a, StateId next, XReal reward, bool next_terminal, double eta,
                      double gamma) {
  q.set(s, a, td_blend(q, s, a, next, reward, next_terminal, eta, gamma));
}

GenerativeRun generative_assured_q(const TabularMDP& mdp, const LearnerParams& params, Rng& rng,
                                   std::int64_t max_steps, const GenerativeObserver& observer) {
  check_params(params);
  if (max_steps <= 0) throw ParameterError("max_steps must be positive");
  GenerativeRun run{QTable(mdp), BarrierTable(mdp), 0, false};
  detail::PairPool alive(mdp.num_pairs());
  std::vector<std::int64_t> visits(mdp.num_pairs(), 0);

  while (run.steps < max_steps) {
    if (alive.empty()) {
      run.exhausted = true;
      break;
    }
    const std::size_t pair = alive[rng.index(alive.size())];
    const StateId s = pair / mdp.num_actions();
    const ActionId a = pair % mdp.num_actions();
    const Transition tr = step(mdp, s, a, rng);
    ++run.steps;
    if (barrier_update(run.b, s, a, tr.next, tr.damage)) alive.remove(pair);
    q_update(run.q, run.b, s, a, tr.next, XReal(tr.reward), mdp.is_terminal(tr.next), step_size(params, visits, pair),
             params.gamma);
    if (observer) observer(run.q, run.b, tr);
  }
  return run;
}

ActionId epsilon_greedy(const QTable& q, const BarrierTable* b, StateId s, double eps, Rng& rng, TieBreak tie_break) {
  std::vector<ActionId> admissible;
  if (b) {
    admissible = b->admissible(s);
    if (admissible.empty()) throw DeadStateError("every action at state " + std::to_string(s) + " is condemned");
  } else {
    for (ActionId a = 0; a < q.num_actions(); ++a) admissible.push_back(a);
  }
  if (rng.bernoulli(eps)) return admissible[rng.index(admissible.size())];

  XReal best = XReal::neg_inf();
  std::vector<ActionId> argmax;
  for (ActionId a : admissible) {
    const XReal v = q.at(s, a);
    if (argmax.empty() || v > best) {
      best = v;
      argmax.assign(1, a);
    } else if (v == best) {
      argmax.push_back(a);
    }
  }
  if (argmax.size() == 1 || tie_break == TieBreak::lowest_index) return argmax.front();
  return argmax[rng.index(argmax.size())];
}

EpisodeLog run_episodic(const TabularMDP& env, AgentMode mode, const LearnerParams& params, Rng& rng,
                        const EpisodicOptions& options, QTable* q_out, BarrierTable* b_out) {
  check_params(params);
  if (options.max_episodes <= 0) throw ParameterError("max_episodes must be positive");
  if (options.start >= env.num_states() || options.goal >= env.num_states())
    throw IndexError("start or goal state out of range");

  const bool assured = (mode == AgentMode::assured);
  QTable q(env);
  BarrierTable b(env);
  std::vector<std::int64_t> visits(env.num_pairs(), 0);
  EpisodeLog log;
  std::int64_t total = 0;
  std::int64_t damaged_episodes = 0;

  for (std::int64_t ep = 1; ep <= options.max_episodes; ++ep) {
    EpisodeRecord rec{ep, 0, 0, false, 0};
    StateId s = options.start;
    while (rec.steps < params.episode_cap) {
      const ActionId a = epsilon_greedy(q, assured ? &b : nullptr, s, params.eps_explore, rng, params.tie_break);
      if (assured && b.condemned(s, a)) ++log.condemned_reselections;
      const Transition tr = step(env, s, a, rng);
      ++rec.steps;
      ++total;
      const bool next_terminal = env.is_terminal(tr.next);
      const double eta = step_size(params, visits, env.pair_index(s, a));
      if (assured) {
        barrier_update(b, s, a, tr.next, tr.damage);
        q_update(q, b, s, a, tr.next, XReal(tr.reward), next_terminal, eta, params.gamma);
      } else {
        const XReal r = tr.damage ? XReal::neg_inf() : XReal(tr.reward);
        classic_q_update(q, s, a, tr.next, r, next_terminal, eta, params.gamma);
      }
      if (tr.damage) {
        ++rec.bumps;
        break;
      }
      s = tr.next;
      if (s == options.goal) {
        rec.reached_goal = true;
        break;
      }
      if (next_terminal) break;
    }
    rec.cumulative_steps = total;
    log.episodes.push_back(rec);
    if (rec.bumps > 0 && !log.transitions_to_goal) ++damaged_episodes;
    if (rec.reached_goal && !log.transitions_to_goal) {
      log.transitions_to_goal = total;
      log.bumps_to_goal = damaged_episodes;
      log.episodes_to_goal = ep;
      if (options.stop_at_goal) break;
    }
  }
  log.complete = log.transitions_to_goal.has_value();
  if (q_out) *q_out = q;
  if (b_out) *b_out = b;
  return log;
}

void write_episode_log_csv(const EpisodeLog& log, std::ostream& out) {
  CsvWriter csv(out, {"episode", "steps", "bumps", "reached_goal", "cumulative_steps"});
  for (const auto& e : log.episodes) csv.row() << e.episode << e.steps << e.bumps << e.reached_goal << e.cumulative_steps;
}

Decomposition policy_eval_decomposed(const TabularMDP& mdp, const std::vector<ActionId>& policy, double gamma) {
  const std::size_t n = mdp.num_states();
  if (policy.size() != n) throw ParameterError("policy must assign one action per state");
  for (ActionId a : policy)
    if (a >= mdp.num_actions()) throw IndexError("policy action out of range");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0, 1)");

  BarrierTable bp(mdp);
  for (StateId s = 0; s < n; ++s)
    for (ActionId a = 0; a < mdp.num_actions(); ++a)
      if (has_immediate_damage(mdp, s, a)) bp.condemn(s, a);
  for (bool changed = true; changed;) {
    changed = false;
    for (StateId s = 0; s < n; ++s)
      for (ActionId a = 0; a < mdp.num_actions(); ++a) {
        if (bp.condemned(s, a)) continue;
        for (const auto& br : mdp.branches(s, a))
          if (bp.condemned(br.next, policy[br.next])) {
            bp.condemn(s, a);
            changed = true;
            break;
          }
      }
  }

  // V = r_pi + gamma P_pi V over all states, ignoring damage
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (StateId s = 0; s < n; ++s)
    for (const auto& br : mdp.branches(s, policy[s])) {
      m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(br.next)) -= gamma * br.probability;
      r(static_cast<Eigen::Index>(s)) += br.probability * br.reward;
    }
  const Eigen::VectorXd v = m.partialPivLu().solve(r);

  Decomposition out{std::vector<double>(mdp.num_pairs(), 0.0), std::move(bp)};
  for (StateId s = 0; s < n; ++s)
    for (ActionId a = 0; a < mdp.num_actions(); ++a) {
      double qv = 0.0;
      for (const auto& br : mdp.branches(s, a))
        qv += br.probability * (br.reward + gamma * v(static_cast<Eigen::Index>(br.next)));
      out.finite_part[mdp.pair_index(s, a)] = qv;
    }
  return out;
}

}  // namespace safe_explore
