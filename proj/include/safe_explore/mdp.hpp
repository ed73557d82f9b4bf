#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "safe_explore/rng.hpp"

namespace safe_explore {

using StateId = std::size_t;
using ActionId = std::size_t;

/// One outcome of p(s', r, d | s, a).
struct Branch {
  StateId next = 0;
  double probability = 0.0;
  double reward = 0.0;
  int damage = 0;
  bool operator==(const Branch&) const = default;
};

struct Transition {
  StateId state = 0;
  ActionId action = 0;
  StateId next = 0;
  double reward = 0.0;
  int damage = 0;
};

/**
 * Finite MDP with a damage-augmented kernel. Built incrementally and checked
 * with validate(); the class itself does not reject malformed kernels so that
 * diagnostics can report every violation at once.
 *
 * Terminal states are absorbing: every action self-loops with reward 0 and
 * no damage. Damage does not end an episode by itself; environments that
 * terminate on damage route damaging branches into a terminal sink.
 */
class TabularMDP {
 public:
  TabularMDP(std::size_t num_states, std::size_t num_actions);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  std::size_t num_pairs() const { return num_states_ * num_actions_; }
  std::size_t pair_index(StateId s, ActionId a) const { return s * num_actions_ + a; }

  void add_branch(StateId s, ActionId a, Branch b);
  /// Replaces every action of s by the absorbing self-loop and marks s terminal.
  void make_terminal(StateId s);

  std::span<const Branch> branches(StateId s, ActionId a) const;
  bool is_terminal(StateId s) const;
  std::vector<StateId> terminal_states() const;

  /// Marks s terminal without rewriting its branches (for loaders).
  void set_terminal_flag(StateId s, bool terminal);

  bool operator==(const TabularMDP&) const = default;

 private:
  void check_pair(StateId s, ActionId a) const;

  std::size_t num_states_;
  std::size_t num_actions_;
  std::vector<std::vector<Branch>> kernel_;  // indexed by pair_index
  std::vector<char> terminal_;
};

/// Samples (s', r, d) with one rng draw. Throws IndexError on bad indices.
Transition step(const TabularMDP& mdp, StateId s, ActionId a, Rng& rng);

/// Smallest branch probability. Zero-mass branches are invalid, so this is
/// the lower bound on nonzero transition probabilities.
double min_nonzero_prob(const TabularMDP& mdp);

/// True when some branch of (s, a) carries damage.
bool has_immediate_damage(const TabularMDP& mdp, StateId s, ActionId a);

struct Violation {
  std::size_t state = 0;
  std::size_t action = 0;
  std::string message;
};

/// Every invariant violation of the kernel; empty when the MDP is well formed.
std::vector<Violation> validate(const TabularMDP& mdp);

std::string format_violations(std::span<const Violation> violations);

/// Throws FormatError listing all violations unless validate() is clean.
void require_valid(const TabularMDP& mdp);

inline constexpr double kProbabilityTolerance = 1e-9;

}  // namespace safe_explore
