#include "hda/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hda {

namespace {

std::array<double, kActionDim> clipped_actor_output(const Td3Agent& agent,
                                                    const AgentObservation& obs) {
  const std::vector<double> mu = agent.actor().forward(obs);
  std::array<double, kActionDim> unit{};
  for (int i = 0; i < kActionDim; ++i) unit[i] = std::clamp(mu[i], 0.0, 1.0);
  return unit;
}

}  // namespace

PolicyDecision AgentPolicy::decide(const Environment& env, const AgentObservation& obs) {
  return {scale_action(clipped_actor_output(*agent_, obs), env.config()), false};
}

PolicyDecision FixedControlPolicy::decide(const Environment& env, const AgentObservation& obs) {
  AgentAction a;
  a.k_r = 6.0;
  a.k_v = 2.0;
  a.alpha_x = 0.0;
  a.alpha_y = 0.0;
  if (shift_source_) {
    const AgentAction from_agent = scale_action(clipped_actor_output(*shift_source_, obs), env.config());
    a.alpha_x = from_agent.alpha_x;
    a.alpha_y = from_agent.alpha_y;
  }
  return {a, true};  // delta_tgo ignored; quartic re-solved each epoch
}

PolicyDecision SingleDivertPolicy::decide(const Environment& env, const AgentObservation&) {
  AgentAction a;
  a.k_r = 6.0;
  a.k_v = 2.0;
  a.alpha_x = 0.0;
  a.alpha_y = 0.0;
  if (!diverted_ && env.state().r.z <= divert_altitude_) {
    const ObservationFrame& f = env.last_frame();
    const int n = f.o_p.rows();
    int best_i = 0, best_j = 0;
    double best_v = -1.0, best_d2 = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double v = f.o_p(i, j);
        // Pixel offset from the FOV center as a fraction of the width.
        const double ax = (j + 0.5) / n - 0.5;
        const double ay = (i + 0.5) / n - 0.5;
        const double d2 = ax * ax + ay * ay;
        if (v > best_v || (v == best_v && d2 < best_d2)) {  // ties: nearest, then row-major
          best_v = v;
          best_d2 = d2;
          best_i = i;
          best_j = j;
        }
      }
    }
    a.alpha_x = (best_j + 0.5) / n - 0.5;
    a.alpha_y = (best_i + 0.5) / n - 0.5;
    diverted_ = true;
    ++divert_count_;
  }
  return {a, true};
}

EpisodeResult run_episode(Policy& policy, Environment& env, std::uint64_t seed) {
  AgentObservation obs = env.reset(seed);
  policy.begin_episode(env);
  EpisodeResult res;
  res.seed = seed;
  while (!env.done()) {
    const PolicyDecision d = policy.decide(env, obs);
    if (d.action.alpha_x != 0.0 || d.action.alpha_y != 0.0) ++res.target_changes;
    const StepOutcome out = env.step(d.action, d.recompute_tgo);
    obs = out.observation;
  }
  const EpisodeInfo& info = env.info();
  const VehicleParams& veh = env.config().vehicle;
  // Arrival and t_go run-out both end with the vehicle at the guidance
  // terminus; crash and fuel-out are never safe landings.
  res.safe_landing = (info.cause == TerminationCause::Arrival ||
                      info.cause == TerminationCause::TgoExhausted) &&
                     info.v_d_at_touchdown == 1;
  res.miss_distance = info.miss_distance;
  res.final_speed = info.final_speed;
  res.propellant_used = info.fuel_used_kg / (veh.m_0 - veh.m_dry);
  res.min_slant_angle = info.min_slant_angle_deg;
  res.max_thrust = info.max_thrust_n;
  res.total_reward = info.total_reward;
  res.cause = info.cause;
  res.epochs = env.epoch_index();
  return res;
}

void Histogram::add(double v) {
  const int bins = static_cast<int>(counts.size());
  int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
  b = std::clamp(b, 0, bins - 1);
  ++counts[b];
}

EvalSummary evaluate(Policy& policy, Environment& env, int n_episodes, std::uint64_t base_seed) {
  if (n_episodes < 1) throw std::invalid_argument("evaluate: n_episodes < 1");
  EvalSummary s;
  s.policy = policy.name();
  s.episodes = n_episodes;
  s.histograms = {
      {"reward", Histogram(-12.0, 2.0, 28)},
      {"miss_distance", Histogram(0.0, 50.0, 25)},
      {"final_speed", Histogram(0.0, 10.0, 20)},
      {"propellant_pct", Histogram(0.0, 100.0, 20)},
      {"min_slant_angle", Histogram(0.0, 90.0, 18)},
      {"max_thrust", Histogram(0.0, 12000.0, 24)},
  };

  // Seeds drawn up front so policies sharing base_seed get paired episodes.
  Rng seed_rng(base_seed);
  std::vector<std::uint64_t> seeds(n_episodes);
  for (auto& v : seeds) v = seed_rng.next_u64();

  for (std::uint64_t seed : seeds) {
    const EpisodeResult r = run_episode(policy, env, seed);
    s.per_episode.push_back(r);
    s.safe_landing_ratio += r.safe_landing ? 1.0 : 0.0;
    s.mean_miss_distance += r.miss_distance;
    s.mean_final_speed += r.final_speed;
    s.mean_propellant_pct += r.propellant_used * 100.0;
    s.mean_min_slant_angle += r.min_slant_angle;
    s.mean_max_thrust += r.max_thrust;
    s.mean_reward += r.total_reward;
    s.histograms[0].second.add(r.total_reward);
    s.histograms[1].second.add(r.miss_distance);
    s.histograms[2].second.add(r.final_speed);
    s.histograms[3].second.add(r.propellant_used * 100.0);
    s.histograms[4].second.add(r.min_slant_angle);
    s.histograms[5].second.add(r.max_thrust);
  }
  const double n = n_episodes;
  s.safe_landing_ratio /= n;
  s.mean_miss_distance /= n;
  s.mean_final_speed /= n;
  s.mean_propellant_pct /= n;
  s.mean_min_slant_angle /= n;
  s.mean_max_thrust /= n;
  s.mean_reward /= n;
  return s;
}

void write_eval_summary_csv(const std::string& path, const std::vector<EvalSummary>& summaries) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_eval_summary_csv: cannot open " + path);
  os << "policy,metric,value\n";
  char buf[160];
  for (const EvalSummary& s : summaries) {
    const std::pair<const char*, double> rows[] = {
        {"safe_landing_ratio", s.safe_landing_ratio},
        {"mean_miss_distance_m", s.mean_miss_distance},
        {"mean_final_speed_mps", s.mean_final_speed},
        {"mean_propellant_pct", s.mean_propellant_pct},
        {"mean_min_slant_angle_deg", s.mean_min_slant_angle},
        {"mean_max_thrust_n", s.mean_max_thrust},
        {"mean_reward", s.mean_reward},
    };
    for (const auto& [metric, value] : rows) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.9g\n", s.policy.c_str(), metric, value);
      os << buf;
    }
  }
}

void write_episodes_csv(const std::string& path, const EvalSummary& summary) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_episodes_csv: cannot open " + path);
  os << "seed,safe_landing,miss_distance_m,final_speed_mps,propellant_fraction,"
        "min_slant_angle_deg,max_thrust_n,total_reward,cause,epochs,target_changes\n";
  char buf[320];
  for (const EpisodeResult& r : summary.per_episode) {
    std::snprintf(buf, sizeof(buf), "%llu,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s,%d,%d\n",
                  static_cast<unsigned long long>(r.seed), r.safe_landing ? 1 : 0, r.miss_distance,
                  r.final_speed, r.propellant_used, r.min_slant_angle, r.max_thrust, r.total_reward,
                  termination_cause_name(r.cause), r.epochs, r.target_changes);
    os << buf;
  }
}

void write_histograms_csv(const std::string& path, const EvalSummary& summary) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_histograms_csv: cannot open " + path);
  os << "policy,metric,bin_lo,bin_hi,count\n";
  char buf[200];
  for (const auto& [metric, h] : summary.histograms) {
    const int bins = static_cast<int>(h.counts.size());
    for (int b = 0; b < bins; ++b) {
      const double lo = h.lo + (h.hi - h.lo) * b / bins;
      const double hi = h.lo + (h.hi - h.lo) * (b + 1) / bins;
      std::snprintf(buf, sizeof(buf), "%s,%s,%.9g,%.9g,%ld\n", summary.policy.c_str(),
                    metric.c_str(), lo, hi, h.counts[b]);
      os << buf;
    }
  }
}

std::string format_table_row(const EvalSummary& s) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-8s safe %.1f%%  miss %.3f m  vel %.3f m/s  prop %.2f%%  slant %.3f deg  "
                "thrust %.0f N",
                s.policy.c_str(), s.safe_landing_ratio * 100.0, s.mean_miss_distance,
                s.mean_final_speed, s.mean_propellant_pct, s.mean_min_slant_angle, s.mean_max_thrust);
  return buf;
}

}  // namespace hda
