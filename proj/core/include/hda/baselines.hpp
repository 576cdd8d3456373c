#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hda/env.hpp"
#include "hda/td3.hpp"

namespace hda {

struct PolicyDecision {
  AgentAction action;
  bool recompute_tgo = false;  // baselines re-solve the time-to-go quartic
};

// Per-epoch policy; receives the environment for observation introspection.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void begin_episode(const Environment& env) {}
  virtual PolicyDecision decide(const Environment& env, const AgentObservation& obs) = 0;
  virtual std::string name() const = 0;
};

// Trained TD3 actor (deterministic, no exploration noise).
class AgentPolicy : public Policy {
 public:
  explicit AgentPolicy(std::shared_ptr<const Td3Agent> agent) : agent_(std::move(agent)) {}
  PolicyDecision decide(const Environment& env, const AgentObservation& obs) override;
  std::string name() const override { return "agent"; }

 private:
  std::shared_ptr<const Td3Agent> agent_;
};

// Gains pinned to (6, 2), t_go re-solved each epoch; the target shift comes
// from the trained actor, or stays zero without one (bootstrap variant).
class FixedControlPolicy : public Policy {
 public:
  explicit FixedControlPolicy(std::shared_ptr<const Td3Agent> shift_source = nullptr)
      : shift_source_(std::move(shift_source)) {}
  PolicyDecision decide(const Environment& env, const AgentObservation& obs) override;
  std::string name() const override { return "fixed"; }

 private:
  std::shared_ptr<const Td3Agent> shift_source_;
};

// No divert until the first epoch below the altitude threshold, then one
// divert to the max-safety pixel of that observation; target frozen after.
class SingleDivertPolicy : public Policy {
 public:
  explicit SingleDivertPolicy(double divert_altitude = 500.0) : divert_altitude_(divert_altitude) {}
  void begin_episode(const Environment& env) override { diverted_ = false; }
  PolicyDecision decide(const Environment& env, const AgentObservation& obs) override;
  std::string name() const override { return "single"; }
  int diverts() const { return divert_count_; }

 private:
  double divert_altitude_;
  bool diverted_ = false;
  int divert_count_ = 0;
};

struct EpisodeResult {
  bool safe_landing = false;  // V_D at touchdown
  double miss_distance = 0.0;
  double final_speed = 0.0;
  double propellant_used = 0.0;  // fraction of (m0 - mdry)
  double min_slant_angle = 0.0;  // deg
  double max_thrust = 0.0;       // N
  double total_reward = 0.0;
  TerminationCause cause = TerminationCause::None;
  int epochs = 0;
  int target_changes = 0;  // epochs with a nonzero commanded shift
  std::uint64_t seed = 0;
};

EpisodeResult run_episode(Policy& policy, Environment& env, std::uint64_t seed);

struct Histogram {
  double lo = 0.0, hi = 1.0;
  std::vector<long> counts;

  Histogram(double lo_, double hi_, int bins) : lo(lo_), hi(hi_), counts(bins, 0) {}
  void add(double v);
};

struct EvalSummary {
  std::string policy;
  int episodes = 0;
  double safe_landing_ratio = 0.0;
  double mean_miss_distance = 0.0;
  double mean_final_speed = 0.0;
  double mean_propellant_pct = 0.0;  // percent of (m0 - mdry)
  double mean_min_slant_angle = 0.0;
  double mean_max_thrust = 0.0;
  double mean_reward = 0.0;
  std::vector<std::pair<std::string, Histogram>> histograms;
  std::vector<EpisodeResult> per_episode;
};

// n independently seeded episodes (seed stream derived from base_seed, so
// different policies evaluated with the same base_seed are paired).
EvalSummary evaluate(Policy& policy, Environment& env, int n_episodes, std::uint64_t base_seed);

void write_eval_summary_csv(const std::string& path, const std::vector<EvalSummary>& summaries);
void write_episodes_csv(const std::string& path, const EvalSummary& summary);
void write_histograms_csv(const std::string& path, const EvalSummary& summary);
std::string format_table_row(const EvalSummary& s);

}  // namespace hda
