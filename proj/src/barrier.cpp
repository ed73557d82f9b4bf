#include "safe_explore/barrier.hpp"

#include <algorithm>

#include "safe_explore/csv.hpp"
#include "safe_explore/error.hpp"
#include "safe_explore/stats.hpp"
#include "pair_pool.hpp"

namespace safe_explore {

BarrierTable::BarrierTable(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states), num_actions_(num_actions), condemned_(num_states * num_actions, 0) {
  if (num_states == 0 || num_actions == 0) throw ParameterError("barrier table needs at least one pair");
}

std::size_t BarrierTable::index(StateId s, ActionId a) const {
  if (s >= num_states_) throw IndexError("state " + std::to_string(s) + " out of range");
  if (a >= num_actions_) throw IndexError("action " + std::to_string(a) + " out of range");
  return s * num_actions_ + a;
}

XReal BarrierTable::at(StateId s, ActionId a) const {
  return condemned_[index(s, a)] ? XReal::neg_inf() : XReal(0.0);
}

void BarrierTable::condemn(StateId s, ActionId a) { condemned_[index(s, a)] = 1; }

XReal BarrierTable::state_value(StateId s) const {
  for (ActionId a = 0; a < num_actions_; ++a)
    if (!condemned_[index(s, a)]) return XReal(0.0);
  return XReal::neg_inf();
}

std::vector<ActionId> BarrierTable::admissible(StateId s) const {
  std::vector<ActionId> out;
  for (ActionId a = 0; a < num_actions_; ++a)
    if (!condemned_[index(s, a)]) out.push_back(a);
  return out;
}

std::size_t BarrierTable::count_condemned() const {
  return static_cast<std::size_t>(std::count(condemned_.begin(), condemned_.end(), 1));
}

bool BarrierTable::condemned_subset_of(const BarrierTable& other) const {
  if (other.num_states_ != num_states_ || other.num_actions_ != num_actions_)
    throw ParameterError("barrier tables differ in shape");
  for (std::size_t i = 0; i < condemned_.size(); ++i)
    if (condemned_[i] && !other.condemned_[i]) return false;
  return true;
}

bool barrier_update(BarrierTable& b, StateId s, ActionId a, StateId next, int damage) {
  const XReal updated = b.at(s, a) + barrier_index(damage) + b.state_value(next);
  if (updated.is_neg_inf() && !b.condemned(s, a)) {
    b.condemn(s, a);
    return true;
  }
  return false;
}

namespace {

void check_shape(const BarrierTable& b, const TabularMDP& mdp) {
  if (b.num_states() != mdp.num_states() || b.num_actions() != mdp.num_actions())
    throw ParameterError("barrier table does not match the MDP");
}

bool forced_by(const BarrierTable& b, const TabularMDP& mdp, StateId s, ActionId a) {
  for (const auto& br : mdp.branches(s, a))
    if (br.damage != 0 || b.state_value(br.next).is_neg_inf()) return true;
  return false;
}

}  // namespace

BarrierTable bstar_oracle(const TabularMDP& mdp) {
  BarrierTable u(mdp);
  for (StateId s = 0; s < mdp.num_states(); ++s)
    for (ActionId a = 0; a < mdp.num_actions(); ++a)
      if (has_immediate_damage(mdp, s, a)) u.condemn(s, a);
  for (bool changed = true; changed;) {
    changed = false;
    for (StateId s = 0; s < mdp.num_states(); ++s)
      for (ActionId a = 0; a < mdp.num_actions(); ++a)
        if (!u.condemned(s, a) && forced_by(u, mdp, s, a)) {
          u.condemn(s, a);
          changed = true;
        }
  }
  return u;
}

bool is_barrier_fixed_point(const BarrierTable& b, const TabularMDP& mdp) {
  check_shape(b, mdp);
  for (StateId s = 0; s < mdp.num_states(); ++s)
    for (ActionId a = 0; a < mdp.num_actions(); ++a)
      if (b.condemned(s, a) != forced_by(b, mdp, s, a)) return false;
  return true;
}

bool bellman_residual(const BarrierTable& b, const TabularMDP& mdp) {
  return is_barrier_fixed_point(b, mdp) && b == bstar_oracle(mdp);
}

LagPartition lag_partition(const TabularMDP& mdp) {
  const std::size_t n = mdp.num_states();
  std::vector<char> placed(n, 0);
  LagPartition out;

  std::vector<StateId> level;
  for (StateId s = 0; s < n; ++s) {
    bool all = true;
    for (ActionId a = 0; a < mdp.num_actions() && all; ++a) all = has_immediate_damage(mdp, s, a);
    if (all) level.push_back(s);
  }
  while (!level.empty()) {
    for (StateId s : level) placed[s] = 1;
    out.unsafe_levels.push_back(level);
    level.clear();
    for (StateId s = 0; s < n; ++s) {
      if (placed[s]) continue;
      bool all = true;
      for (ActionId a = 0; a < mdp.num_actions() && all; ++a) {
        const auto bs = mdp.branches(s, a);
        // immediate damage also counts, as it does for S_1
        all = std::any_of(bs.begin(), bs.end(),
                          [&](const Branch& br) { return br.probability > 0.0 && (br.damage != 0 || placed[br.next]); });
      }
      if (all) level.push_back(s);
    }
  }
  for (StateId s = 0; s < n; ++s)
    if (!placed[s]) out.safe_remainder.push_back(s);
  out.lag = out.unsafe_levels.size();
  return out;
}

double bound_barrier_time(const TabularMDP& mdp) {
  const double mu = min_nonzero_prob(mdp);
  if (!(mu > 0.0) || !(mu <= 1.0)) throw InvalidStateError("MDP has no positive branch probability");
  const std::size_t pairs = mdp.num_pairs();
  const double lag = static_cast<double>(lag_partition(mdp).lag);
  return (lag + 1.0) * (static_cast<double>(pairs) / mu) * harmonic_number(pairs);
}

BarrierRun barrier_learner(const TabularMDP& mdp, Rng& rng, std::int64_t max_steps,
                           const BarrierLearnerOptions& options) {
  if (max_steps < 0) throw ParameterError("max_steps must be nonnegative");
  const BarrierTable target = bstar_oracle(mdp);
  BarrierRun run{BarrierTable(mdp), {}, std::vector<std::optional<std::int64_t>>(mdp.num_pairs()), {}, 0, false};

  detail::PairPool alive(mdp.num_pairs());  // pairs still at 0
  std::size_t mismatch = target.count_condemned();
  std::size_t n_condemned = 0;
  while (mismatch > 0 && run.steps < max_steps) {
    const std::size_t pair = alive[rng.index(alive.size())];
    const StateId s = pair / mdp.num_actions();
    const ActionId a = pair % mdp.num_actions();
    const Transition tr = step(mdp, s, a, rng);
    ++run.steps;
    const bool fresh = barrier_update(run.table, s, a, tr.next, tr.damage);
    if (fresh) {
      ++n_condemned;
      run.detection_step[pair] = run.steps;
      if (target.condemned(s, a))
        --mismatch;
      else
        ++mismatch;
      alive.remove(pair);
    }
    if (options.record_trace) run.trace.push_back({run.steps, s, a, tr.next, tr.damage, fresh, n_condemned});
    if (options.record_series) run.condemned_series.push_back(n_condemned);
  }
  run.complete = (mismatch == 0);
  return run;
}

void write_barrier_trace_csv(const BarrierRun& run, std::ostream& out) {
  CsvWriter csv(out, {"step", "s", "a", "s_next", "d", "newly_condemned", "n_condemned"});
  for (const auto& t : run.trace) csv.row() << t.step << t.s << t.a << t.next << t.damage << t.newly_condemned << t.n_condemned;
}

void write_barrier_summary_csv(const BarrierRun& run, const TabularMDP& mdp, std::ostream& out) {
  const double bound = bound_barrier_time(mdp);
  const auto lag = lag_partition(mdp).lag;
  const double mu = min_nonzero_prob(mdp);
  CsvWriter csv(out, {"s", "a", "detection_step", "bound", "lag", "mu"});
  for (StateId s = 0; s < mdp.num_states(); ++s)
    for (ActionId a = 0; a < mdp.num_actions(); ++a)
      csv.row() << s << a << run.detection_step[mdp.pair_index(s, a)] << bound << lag << mu;
}

}  // namespace safe_explore
