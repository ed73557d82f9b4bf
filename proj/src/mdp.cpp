#include "safe_explore/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "safe_explore/error.hpp"

namespace safe_explore {

TabularMDP::TabularMDP(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states),
      num_actions_(num_actions),
      kernel_(num_states * num_actions),
      terminal_(num_states, 0) {
  if (num_states == 0 || num_actions == 0) throw ParameterError("MDP needs at least one state and action");
}

void TabularMDP::check_pair(StateId s, ActionId a) const {
  if (s >= num_states_) throw IndexError("state " + std::to_string(s) + " out of range");
  if (a >= num_actions_) throw IndexError("action " + std::to_string(a) + " out of range");
}

void TabularMDP::add_branch(StateId s, ActionId a, Branch b) {
  check_pair(s, a);
  if (b.next >= num_states_) throw IndexError("next state " + std::to_string(b.next) + " out of range");
  kernel_[pair_index(s, a)].push_back(b);
}

void TabularMDP::make_terminal(StateId s) {
  check_pair(s, 0);
  terminal_[s] = 1;
  for (ActionId a = 0; a < num_actions_; ++a) kernel_[pair_index(s, a)] = {Branch{s, 1.0, 0.0, 0}};
}

void TabularMDP::set_terminal_flag(StateId s, bool terminal) {
  check_pair(s, 0);
  terminal_[s] = terminal ? 1 : 0;
}

std::span<const Branch> TabularMDP::branches(StateId s, ActionId a) const {
  check_pair(s, a);
  return kernel_[pair_index(s, a)];
}

bool TabularMDP::is_terminal(StateId s) const {
  check_pair(s, 0);
  return terminal_[s] != 0;
}

std::vector<StateId> TabularMDP::terminal_states() const {
  std::vector<StateId> out;
  for (StateId s = 0; s < num_states_; ++s)
    if (terminal_[s]) out.push_back(s);
  return out;
}

Transition step(const TabularMDP& mdp, StateId s, ActionId a, Rng& rng) {
  const auto bs = mdp.branches(s, a);
  if (bs.empty()) throw InvalidStateError("pair has no branches");
  const double u = rng.uniform();
  double acc = 0.0;
  const Branch* chosen = &bs.back();
  for (const auto& b : bs) {
    acc += b.probability;
    if (u < acc) {
      chosen = &b;
      break;
    }
  }
  return {s, a, chosen->next, chosen->reward, chosen->damage};
}

double min_nonzero_prob(const TabularMDP& mdp) {
  double m = std::numeric_limits<double>::infinity();
  for (StateId s = 0; s < mdp.num_states(); ++s)
    for (ActionId a = 0; a < mdp.num_actions(); ++a)
      for (const auto& b : mdp.branches(s, a))
        if (b.probability > 0.0) m = std::min(m, b.probability);
  return m;
}

bool has_immediate_damage(const TabularMDP& mdp, StateId s, ActionId a) {
  const auto bs = mdp.branches(s, a);
  return std::any_of(bs.begin(), bs.end(), [](const Branch& b) { return b.damage != 0; });
}

std::vector<Violation> validate(const TabularMDP& mdp) {
  std::vector<Violation> out;
  auto report = [&](StateId s, ActionId a, std::string msg) { out.push_back({s, a, std::move(msg)}); };
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    for (ActionId a = 0; a < mdp.num_actions(); ++a) {
      const auto bs = mdp.branches(s, a);
      if (bs.empty()) {
        report(s, a, "no branches");
        continue;
      }
      double total = 0.0;
      for (const auto& b : bs) {
        total += b.probability;
        if (!(b.probability > 0.0)) report(s, a, "non-positive branch probability " + std::to_string(b.probability));
        if (b.damage != 0 && b.damage != 1) report(s, a, "damage must be 0 or 1, got " + std::to_string(b.damage));
        if (!std::isfinite(b.reward)) report(s, a, "non-finite reward");
        if (mdp.is_terminal(s) && (b.next != s || b.reward != 0.0 || b.damage != 0))
          report(s, a, "terminal state must self-loop with reward 0 and no damage");
      }
      if (std::abs(total - 1.0) > kProbabilityTolerance) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "branch probabilities sum to " << total;
        report(s, a, msg.str());
      }
    }
  }
  return out;
}

std::string format_violations(std::span<const Violation> violations) {
  std::ostringstream os;
  for (const auto& v : violations) os << "(s=" << v.state << ", a=" << v.action << "): " << v.message << '\n';
  return os.str();
}

void require_valid(const TabularMDP& mdp) {
  const auto violations = validate(mdp);
  if (!violations.empty()) throw FormatError("invalid MDP:\n" + format_violations(violations));
}

}  // namespace safe_explore
