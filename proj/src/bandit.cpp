#include "safe_explore/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "safe_explore/error.hpp"
#include "safe_explore/stats.hpp"

namespace safe_explore::bandit {

BanditInstance::BanditInstance(std::vector<double> mus, double mu_spec)
    : mus_(std::move(mus)), mu_spec_(mu_spec) {
  if (mus_.empty()) throw ParameterError("bandit needs at least one arm");
  if (!(mu_spec >= 0.0 && mu_spec < 1.0)) throw ParameterError("mu_spec must lie in [0, 1)");
  for (double m : mus_)
    if (!(m >= 0.0 && m <= 1.0)) throw ParameterError("arm parameter outside [0, 1]");
}

BanditInstance BanditInstance::uniform(std::size_t k, double lo, double hi, double mu_spec,
                                       Rng& rng) {
  if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) throw ParameterError("need 0 <= lo <= hi <= 1");
  std::vector<double> mus(k);
  for (auto& m : mus) m = rng.uniform(lo, hi);
  return BanditInstance(std::move(mus), mu_spec);
}

double BanditInstance::mu(ArmId a) const {
  if (a >= mus_.size()) throw IndexError("arm " + std::to_string(a) + " out of range");
  return mus_[a];
}

std::size_t BanditInstance::num_unsafe() const {
  return static_cast<std::size_t>(
      std::count_if(mus_.begin(), mus_.end(), [&](double m) { return m > mu_spec_; }));
}

std::vector<ArmId> BanditInstance::unsafe_arms() const {
  std::vector<ArmId> out;
  for (ArmId a = 0; a < mus_.size(); ++a)
    if (mus_[a] > mu_spec_) out.push_back(a);
  return out;
}

std::vector<ArmId> BanditInstance::conservative_safe_arms(double epsilon) const {
  std::vector<ArmId> out;
  for (ArmId a = 0; a < mus_.size(); ++a)
    if (mus_[a] <= mu_spec_ - epsilon) out.push_back(a);
  return out;
}

std::vector<double> load_arm_parameters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open arm file " + path.string());
  std::vector<double> mus;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double v = 0.0;
    if (!(ls >> v)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected a number");
    }
    std::string rest;
    if (ls >> rest)
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": one value per line");
    mus.push_back(v);
  }
  return mus;
}

void check_mode(const InspectorMode& mode, double mu) {
  if (const auto* r = std::get_if<RelaxedMode>(&mode)) {
    if (!(mu > 0.0 && mu < 1.0)) throw ParameterError("relaxed inspection needs 0 < mu < 1");
    if (!(r->epsilon > 0.0 && r->epsilon <= mu)) throw ParameterError("epsilon must lie in (0, mu]");
    if (!(r->alpha > 0.0 && r->alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
  }
}

ArmId uniform_strategy(std::span<const ArmId> candidates, Rng& rng) {
  return candidates[rng.index(candidates.size())];
}

InspectorState::InspectorState(std::size_t num_arms, InspectorMode mode)
    : mode_(mode),
      in_candidates_(num_arms, 1),
      lambdas_(num_arms, 0.0),
      pull_counts_(num_arms, 0) {
  candidates_.resize(num_arms);
  for (ArmId a = 0; a < num_arms; ++a) candidates_[a] = a;
}

void InspectorState::count_pull(ArmId a) {
  ++pull_counts_.at(a);
  ++round_;
}

void InspectorState::remove(ArmId a) {
  if (!contains(a)) return;
  in_candidates_[a] = 0;
  candidates_.erase(std::lower_bound(candidates_.begin(), candidates_.end(), a));
}

bool sample_damage(const BanditInstance& instance, ArmId arm, Rng& rng) {
  return rng.bernoulli(instance.mu(arm));
}

double sprt_increment(bool damage, double mu, double epsilon) {
  if (!(mu > 0.0 && mu < 1.0)) throw ParameterError("sprt_increment needs 0 < mu < 1");
  if (!(epsilon > 0.0 && epsilon <= mu)) throw ParameterError("sprt_increment needs 0 < eps <= mu");
  if (damage) {
    if (epsilon == mu) return std::numeric_limits<double>::infinity();
    return std::log(mu / (mu - epsilon));
  }
  return std::log((1.0 - mu) / (1.0 - mu + epsilon));
}

double kl_bernoulli(double mu, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < mu && mu < 1.0))
    throw ParameterError("kl_bernoulli needs 0 < eps < mu < 1");
  return mu * std::log(mu / (mu - epsilon)) + (1.0 - mu) * std::log((1.0 - mu) / (1.0 - mu + epsilon));
}

namespace {

ArmId pick(InspectorState& state, Rng& rng, const Strategy& strategy) {
  if (state.candidates().empty()) throw InvalidStateError("candidate safe set is empty");
  const ArmId arm = strategy(state.candidates(), rng);
  if (!state.contains(arm)) throw InvalidStateError("strategy chose an arm outside the candidate set");
  return arm;
}

}  // namespace

StepOutcome flawless_step(InspectorState& state, const BanditInstance& instance, Rng& rng,
                          const Strategy& strategy) {
  if (state.relaxed()) throw InvalidStateError("flawless_step on a relaxed inspector");
  StepOutcome out;
  out.arm = pick(state, rng, strategy);
  out.damage = sample_damage(instance, out.arm, rng);
  state.count_pull(out.arm);
  if (out.damage) {
    state.remove(out.arm);
    out.removed = true;
  }
  return out;
}

StepOutcome relaxed_step(InspectorState& state, const BanditInstance& instance, Rng& rng,
                         const Strategy& strategy) {
  const auto* mode = std::get_if<RelaxedMode>(&state.mode());
  if (!mode) throw InvalidStateError("relaxed_step on a flawless inspector");
  StepOutcome out;
  out.arm = pick(state, rng, strategy);
  out.damage = sample_damage(instance, out.arm, rng);
  state.count_pull(out.arm);
  state.add_evidence(out.arm, sprt_increment(out.damage, instance.mu_spec(), mode->epsilon));
  if (state.lambdas()[out.arm] >= std::log(1.0 / mode->alpha)) {
    state.remove(out.arm);
    out.removed = true;
  }
  return out;
}

StepOutcome inspector_step(InspectorState& state, const BanditInstance& instance, Rng& rng,
                           const Strategy& strategy) {
  return state.relaxed() ? relaxed_step(state, instance, rng, strategy)
                         : flawless_step(state, instance, rng, strategy);
}

std::vector<Round> BanditRunRecord::detection_times(const BanditInstance& instance) const {
  std::vector<Round> out;
  for (ArmId a : instance.unsafe_arms())
    if (removal_round.at(a)) out.push_back(*removal_round[a]);
  return out;
}

BanditRunRecord run_inspector(const BanditInstance& instance, const InspectorMode& mode, Rng& rng,
                              Round max_rounds, const RunOptions& options) {
  if (max_rounds <= 0) throw ParameterError("max_rounds must be positive");
  check_mode(mode, instance.mu_spec());

  InspectorState state(instance.num_arms(), mode);
  BanditRunRecord rec;
  rec.removal_round.assign(instance.num_arms(), std::nullopt);
  std::size_t unsafe_left = instance.num_unsafe();

  while (unsafe_left > 0 && state.round() < max_rounds) {
    const StepOutcome step = inspector_step(state, instance, rng, options.strategy);
    const bool unsafe = instance.is_unsafe(step.arm);
    if (unsafe) ++rec.final_exposure;
    if (step.removed) {
      rec.removal_round[step.arm] = state.round();
      if (unsafe) --unsafe_left;
    }
    if (options.record_events) rec.events.push_back({state.round(), step.arm, step.damage, step.removed});
  }

  rec.complete = unsafe_left == 0;
  rec.stop_round = state.round();
  rec.pull_counts.assign(state.pull_counts().begin(), state.pull_counts().end());
  rec.final_candidates.assign(state.candidates().begin(), state.candidates().end());
  const double eps = std::holds_alternative<RelaxedMode>(mode) ? std::get<RelaxedMode>(mode).epsilon : 0.0;
  if (!instance.conservative_safe_arms(eps).empty())
    rec.final_conservation_ratio = conservation_ratio(rec.final_candidates, instance, eps);
  return rec;
}

std::int64_t exposure(const BanditRunRecord& record, const BanditInstance& instance,
                      std::optional<Round> prefix_end) {
  if (record.events.empty() && record.stop_round > 0) {
    if (!prefix_end || *prefix_end >= record.stop_round) return record.final_exposure;
    throw InvalidStateError("prefix exposure needs a record with events");
  }
  std::int64_t e = 0;
  for (const auto& ev : record.events) {
    if (prefix_end && ev.t > *prefix_end) break;
    if (instance.is_unsafe(ev.arm)) ++e;
  }
  return e;
}

std::int64_t exposure_from_pulls(std::span<const std::int64_t> pull_counts,
                                 const BanditInstance& instance) {
  std::int64_t e = 0;
  for (ArmId a : instance.unsafe_arms()) e += pull_counts[a];
  return e;
}

double conservation_ratio(std::span<const ArmId> candidates, const BanditInstance& instance,
                          double epsilon) {
  const auto safe = instance.conservative_safe_arms(epsilon);
  if (safe.empty()) throw ParameterError("conservation ratio undefined: no (mu - eps)-safe arm");
  std::size_t kept = 0;
  for (ArmId a : candidates)
    if (std::binary_search(safe.begin(), safe.end(), a)) ++kept;
  return static_cast<double>(kept) / static_cast<double>(safe.size());
}

BanditBounds bounds(const BanditInstance& instance, const std::optional<RelaxedMode>& relaxed) {
  BanditBounds b;
  const auto unsafe = instance.unsafe_arms();
  const auto m = unsafe.size();
  const auto k = instance.num_arms();
  if (m > 0) {
    double mu_low = 1.0;
    for (ArmId a : unsafe) {
      b.flawless_exposure_bound += 1.0 / instance.mu(a);
      mu_low = std::min(mu_low, instance.mu(a));
    }
    b.flawless_time_bound = static_cast<double>(k) / mu_low * harmonic_number(m);
  }
  if (relaxed) {
    check_mode(*relaxed, instance.mu_spec());
    const double per_arm =
        1.0 + std::log(1.0 / relaxed->alpha) / kl_bernoulli(instance.mu_spec(), relaxed->epsilon);
    b.sprt_per_arm_bound = per_arm;
    b.relaxed_conservation_lb = 1.0 - relaxed->alpha;
    b.relaxed_exposure_bound = static_cast<double>(m) * per_arm;
    b.relaxed_time_bound = static_cast<double>(m) * static_cast<double>(k - m + 1) * per_arm;
  }
  return b;
}

Round default_max_rounds(const BanditInstance& instance, const InspectorMode& mode) {
  double bound = 0.0;
  if (const auto* r = std::get_if<RelaxedMode>(&mode)) {
    if (r->epsilon < instance.mu_spec())
      bound = *bounds(instance, *r).relaxed_time_bound;
    else
      bound = bounds(instance).flawless_time_bound;
  } else {
    bound = bounds(instance).flawless_time_bound;
  }
  return std::max<Round>(1, static_cast<Round>(std::ceil(10.0 * bound)));
}

void write_events_csv(const BanditRunRecord& record, std::ostream& out) {
  out << "t,arm,damage,removed\n";
  for (const auto& ev : record.events)
    out << ev.t << ',' << ev.arm << ',' << (ev.damage ? 1 : 0) << ',' << (ev.removed ? 1 : 0) << '\n';
}

}  // namespace safe_explore::bandit
