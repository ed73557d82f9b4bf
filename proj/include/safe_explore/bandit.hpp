#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "safe_explore/rng.hpp"

namespace safe_explore::bandit {

using ArmId = std::size_t;
using Round = std::int64_t;

/**
 * Stochastic safety bandit: arm a yields damage with probability mus[a].
 * An arm is mu-unsafe iff mus[a] > mu_spec. Arms are indexed from 0.
 */
class BanditInstance {
 public:
  BanditInstance(std::vector<double> mus, double mu_spec);

  /// K arms with parameters uniform on [lo, hi].
  static BanditInstance uniform(std::size_t k, double lo, double hi, double mu_spec, Rng& rng);

  std::size_t num_arms() const { return mus_.size(); }
  double mu(ArmId a) const;
  double mu_spec() const { return mu_spec_; }
  std::span<const double> mus() const { return mus_; }

  bool is_unsafe(ArmId a) const { return mu(a) > mu_spec_; }
  std::size_t num_unsafe() const;
  std::vector<ArmId> unsafe_arms() const;
  /// Arms with mus[a] <= mu_spec - epsilon.
  std::vector<ArmId> conservative_safe_arms(double epsilon) const;

 private:
  std::vector<double> mus_;
  double mu_spec_;
};

/// One damage parameter per non-empty line; '#' starts a comment.
std::vector<double> load_arm_parameters(const std::filesystem::path& path);

struct FlawlessMode {};

/// SPRT-based inspector with slack epsilon in (0, mu] and tolerance alpha in (0, 1].
struct RelaxedMode {
  double epsilon = 0.0;
  double alpha = 0.0;
};

using InspectorMode = std::variant<FlawlessMode, RelaxedMode>;

/// Throws ParameterError unless the mode is admissible for a safety level mu.
void check_mode(const InspectorMode& mode, double mu);

/// Arm selection rule psi(A_t). Must return an element of the candidate set.
using Strategy = std::function<ArmId(std::span<const ArmId>, Rng&)>;

/// psi_unif: uniform over the candidate set, one rng draw.
ArmId uniform_strategy(std::span<const ArmId> candidates, Rng& rng);

/**
 * Learner-side state of an inspector: candidate safe set, per-arm
 * log-likelihood ratios and pull counts.
 *
 * The candidate list keeps ascending arm order; removal never reorders it,
 * so two inspectors with equal histories draw the same arm from equal rng.
 */
class InspectorState {
 public:
  InspectorState(std::size_t num_arms, InspectorMode mode);

  const InspectorMode& mode() const { return mode_; }
  bool relaxed() const { return std::holds_alternative<RelaxedMode>(mode_); }

  std::span<const ArmId> candidates() const { return candidates_; }
  bool contains(ArmId a) const { return in_candidates_.at(a) != 0; }
  std::span<const double> lambdas() const { return lambdas_; }
  std::span<const std::int64_t> pull_counts() const { return pull_counts_; }
  Round round() const { return round_; }
  std::size_t num_arms() const { return pull_counts_.size(); }

  void count_pull(ArmId a);
  void add_evidence(ArmId a, double increment) { lambdas_.at(a) += increment; }
  void remove(ArmId a);

 private:
  InspectorMode mode_;
  std::vector<ArmId> candidates_;
  std::vector<char> in_candidates_;
  std::vector<double> lambdas_;
  std::vector<std::int64_t> pull_counts_;
  Round round_ = 0;
};

struct StepOutcome {
  ArmId arm = 0;
  bool damage = false;
  bool removed = false;
};

/// Bernoulli(mus[arm]) damage bit; one rng draw.
bool sample_damage(const BanditInstance& instance, ArmId arm, Rng& rng);

/// log f_mu(d) / f_{mu-eps}(d). For eps == mu a damage observation gives +infinity.
double sprt_increment(bool damage, double mu, double epsilon);

/// Bernoulli divergence kl(mu, mu - eps), defined for 0 < eps < mu < 1.
double kl_bernoulli(double mu, double epsilon);

StepOutcome flawless_step(InspectorState& state, const BanditInstance& instance, Rng& rng,
                          const Strategy& strategy = uniform_strategy);
StepOutcome relaxed_step(InspectorState& state, const BanditInstance& instance, Rng& rng,
                         const Strategy& strategy = uniform_strategy);
/// Dispatches on the state's mode.
StepOutcome inspector_step(InspectorState& state, const BanditInstance& instance, Rng& rng,
                           const Strategy& strategy = uniform_strategy);

struct BanditEvent {
  Round t = 0;
  ArmId arm = 0;
  bool damage = false;
  bool removed = false;
  bool operator==(const BanditEvent&) const = default;
};

struct BanditRunRecord {
  std::vector<BanditEvent> events;             // empty unless recorded
  std::vector<std::optional<Round>> removal_round;  // per arm; set for every removed arm
  std::vector<std::int64_t> pull_counts;
  std::vector<ArmId> final_candidates;
  std::int64_t final_exposure = 0;
  /// C_{eps,T}; nullopt when no arm is (mu - eps)-safe.
  std::optional<double> final_conservation_ratio;
  Round stop_round = 0;
  /// Every mu-unsafe arm removed before max_rounds ran out.
  bool complete = false;

  /// Rounds at which the mu-unsafe arms were removed, in arm order.
  std::vector<Round> detection_times(const BanditInstance& instance) const;
};

struct RunOptions {
  bool record_events = true;
  Strategy strategy = uniform_strategy;
};

/**
 * Runs an inspector until every mu-unsafe arm has left the candidate set or
 * max_rounds is reached. Ground-truth labels serve only as the stopping
 * check and for metrics; the decision rule sees damage bits alone.
 */
BanditRunRecord run_inspector(const BanditInstance& instance, const InspectorMode& mode, Rng& rng,
                              Round max_rounds, const RunOptions& options = {});

/// Pulls of mu-unsafe arms among events with t <= prefix_end (all events if unset).
std::int64_t exposure(const BanditRunRecord& record, const BanditInstance& instance,
                      std::optional<Round> prefix_end = std::nullopt);

/// Sum of pull counts over the mu-unsafe arms.
std::int64_t exposure_from_pulls(std::span<const std::int64_t> pull_counts,
                                 const BanditInstance& instance);

/// |candidates ∩ A*_eps| / |A*_eps|. Throws ParameterError when A*_eps is empty.
double conservation_ratio(std::span<const ArmId> candidates, const BanditInstance& instance,
                          double epsilon);

struct BanditBounds {
  double flawless_exposure_bound = 0.0;  // sum over unsafe arms of 1/mu_a
  double flawless_time_bound = 0.0;      // (K/mu_low) H_M
  std::optional<double> relaxed_conservation_lb;
  std::optional<double> relaxed_exposure_bound;
  std::optional<double> relaxed_time_bound;
  std::optional<double> sprt_per_arm_bound;
};

/// Closed-form guarantees for the instance; relaxed entries only when a relaxed mode is given.
BanditBounds bounds(const BanditInstance& instance, const std::optional<RelaxedMode>& relaxed = std::nullopt);

/// Ten times the applicable expected-time bound, at least 1.
Round default_max_rounds(const BanditInstance& instance, const InspectorMode& mode);

/// CSV with header t,arm,damage,removed.
void write_events_csv(const BanditRunRecord& record, std::ostream& out);

}  // namespace safe_explore::bandit
