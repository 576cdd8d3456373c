#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hda/dynamics.hpp"
#include "hda/grid.hpp"
#include "hda/guidance.hpp"
#include "hda/safety.hpp"
#include "hda/sensor.hpp"

namespace hda {

enum class Difficulty { TrainingRandom, HardEval };

enum class TerminationCause { None, Arrival, Crash, FuelOut, TgoExhausted };
const char* termination_cause_name(TerminationCause cause);

struct EnvConfig {
  // Initial-condition ranges
  double z0_min = 900.0, z0_max = 1000.0;                 // m
  double horiz_dist_min = 200.0, horiz_dist_max = 250.0;  // m from target
  double descent_speed_min = 20.0, descent_speed_max = 35.0;   // m/s downward
  double horiz_speed_min = 5.0, horiz_speed_max = 10.0;        // m/s
  double aim_half_angle_deg = 15.0;  // spread around the target-pointing direction

  double z_f = 50.0;   // arrival plane / final-target altitude
  double z_max = 50.0; // crash plane (max terrain height)

  // Reward weights; fuel/velocity/miss terms enter negated (they are
  // penalties), the safety and violation terms keep their literal signs.
  double alpha_m = 1.0;
  double alpha_f = -10.0;
  double alpha_v = 0.1;
  double alpha_r = 0.01;
  double alpha_s = 1.0;

  // Action ranges
  double k_r_min = 5.0, k_r_max = 7.0;
  double k_v_min = 1.0, k_v_max = 3.0;
  double delta_tgo_min = 4.25, delta_tgo_max = 5.75;  // s
  double alpha_range = 0.25;  // target shift, fraction of FOV width

  Difficulty difficulty = Difficulty::TrainingRandom;
  double target_box_half = 200.0;          // initial target drawn from the central box
  double hard_eval_radius = 100.0;         // m
  double hard_eval_hazard_fraction = 0.8;
  int hard_eval_max_draws = 10000;

  double epoch_duration = 5.0;        // s between decisions (sensor cadence)
  double inner_dt = 0.1;              // s integration step
  double terminal_tgo_threshold = 5.0;  // s; at or below, the epoch runs t_go out
  double fallback_tgo = 20.0;         // s when the time-to-go quartic has no root

  // Observation normalization
  double position_scale = 1000.0;
  double velocity_scale = 50.0;
  double fov_scale = 200.0;

  VehicleParams vehicle;
  SensorParams sensor;

  void validate() const;
};

struct AgentAction {
  double k_r = 6.0;
  double k_v = 2.0;
  double delta_tgo = 5.0;
  double alpha_x = 0.0;
  double alpha_y = 0.0;
};

using AgentObservation = std::vector<double>;  // length 44
inline constexpr int kObservationDim = 44;
inline constexpr int kActionDim = 5;
inline constexpr int kLatentDim = 32;

// Affine map from the unit box onto the action ranges.
AgentAction scale_action(const std::array<double, kActionDim>& unit, const EnvConfig& cfg);

// Target update: previous + alpha * FOV width, clamped so the next FOV stays
// on the field (half-FOV inset).
void apply_target_shift(double& target_x, double& target_y, double alpha_x, double alpha_y,
                        double w_x, double w_y, double field_half_x, double field_half_y);

struct RewardTerms {
  double fuel = 0.0;       // -alpha_m * dm / (m0 - mdry)
  double violation = 0.0;  // alpha_f * (crash + fuel-out indicators)
  double velocity = 0.0;   // -alpha_v * d_t * |v|
  double miss = 0.0;       // -alpha_r * d_t * horizontal miss
  double safety = 0.0;     // alpha_s * d_t * V_D(touchdown), V_D in {+1,-1}
  double total() const { return fuel + violation + velocity + miss + safety; }
};

struct RewardContext {
  double m_prev = 0.0;
  double m_now = 0.0;
  bool done = false;
  bool crashed = false;    // hit the z_max plane before the terminal epoch
  bool fuel_out = false;
  Vec3 velocity;           // at episode end
  double horizontal_miss = 0.0;  // |r - r_f| at episode end, m
  int v_d_at_touchdown = 0;      // {0,1} map value under the final position
};

RewardTerms compute_reward(const RewardContext& ctx, const EnvConfig& cfg);

struct TerrainEntry {
  Dem dem;
  SafetyMaps maps;
  std::vector<std::pair<int, int>> hard_targets;  // filled lazily for hard-eval
};
using TerrainLibrary = std::vector<TerrainEntry>;

// Builds the qualifying-pixel list for hard-eval target sampling (>= the
// hazard fraction of pixels within the radius are deterministically unsafe).
void index_hard_targets(TerrainEntry& entry, const EnvConfig& cfg);

// Maps a 64x64 observation frame to the 32-vector latent.
using EncoderFn = std::function<std::vector<double>(const Grid<double>&)>;

struct EpisodeInfo {
  TerminationCause cause = TerminationCause::None;
  int v_d_at_touchdown = 0;
  double fuel_used_kg = 0.0;
  double min_slant_angle_deg = 90.0;
  double max_thrust_n = 0.0;
  double miss_distance = 0.0;   // horizontal, vs the last commanded target
  double final_speed = 0.0;
  double total_reward = 0.0;
};

struct StepOutcome {
  AgentObservation observation;
  double reward = 0.0;
  RewardTerms reward_terms;
  bool done = false;
  EpisodeInfo info;  // meaningful when done
};

struct InnerLogRow {
  double t;
  Vec3 r, v;
  double m;
  double thrust_mag;
  double theta_g;  // glide-slope angle, deg
  double k_r, k_v, t_go;
};

// One POMDP episode instance: 5 s decision epochs over 0.1 s dynamics.
class Environment {
 public:
  Environment(EnvConfig cfg, std::shared_ptr<const TerrainLibrary> library, EncoderFn encoder);

  AgentObservation reset(std::uint64_t seed);

  // When recompute_tgo is set the commanded delta_tgo is ignored and t_go is
  // re-solved from the quartic at the next epoch boundary (baseline policies).
  StepOutcome step(const AgentAction& action, bool recompute_tgo = false);

  bool done() const { return done_; }
  int epoch_index() const { return epoch_; }
  const LanderState& state() const { return state_; }
  double target_x() const { return target_x_; }
  double target_y() const { return target_y_; }
  double t_go() const { return t_go_; }
  int terrain_index() const { return terrain_index_; }
  const TerrainEntry& terrain() const;
  const ObservationFrame& last_frame() const { return frame_; }
  const EnvConfig& config() const { return cfg_; }
  const std::vector<InnerLogRow>& inner_log() const { return inner_log_; }
  const EpisodeInfo& info() const { return info_; }

  AgentObservation encode_observation() const;

 private:
  void acquire_frame();
  void sample_initial_target(const TerrainEntry& entry);

  EnvConfig cfg_;
  std::shared_ptr<const TerrainLibrary> library_;
  EncoderFn encoder_;
  Rng rng_;

  int terrain_index_ = 0;
  LanderState state_;
  double target_x_ = 0.0, target_y_ = 0.0;
  double t_go_ = 0.0;
  ObservationFrame frame_;
  std::vector<double> latent_;
  bool done_ = true;
  int epoch_ = 0;
  double total_reward_ = 0.0;
  EpisodeInfo info_;
  std::vector<InnerLogRow> inner_log_;
};

}  // namespace hda
