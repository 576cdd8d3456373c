#include "hda/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hda {

const char* termination_cause_name(TerminationCause cause) {
  switch (cause) {
    case TerminationCause::None: return "none";
    case TerminationCause::Arrival: return "arrival";
    case TerminationCause::Crash: return "crash";
    case TerminationCause::FuelOut: return "fuel-out";
    case TerminationCause::TgoExhausted: return "tgo-exhausted";
  }
  return "?";
}

void EnvConfig::validate() const {
  if (z0_min > z0_max || horiz_dist_min > horiz_dist_max || descent_speed_min > descent_speed_max ||
      horiz_speed_min > horiz_speed_max)
    throw std::invalid_argument("EnvConfig: empty initial-condition range");
  if (!(std::isfinite(alpha_m) && std::isfinite(alpha_f) && std::isfinite(alpha_v) &&
        std::isfinite(alpha_r) && std::isfinite(alpha_s)))
    throw std::invalid_argument("EnvConfig: non-finite reward weight");
  if (inner_dt <= 0.0 || epoch_duration <= 0.0)
    throw std::invalid_argument("EnvConfig: non-positive timestep");
  if (alpha_range <= 0.0 || alpha_range > 0.5) throw std::invalid_argument("EnvConfig: alpha_range");
  vehicle.validate();
  sensor.validate();
}

AgentAction scale_action(const std::array<double, kActionDim>& unit, const EnvConfig& cfg) {
  auto lerp = [](double lo, double hi, double u) { return lo + (hi - lo) * u; };
  AgentAction a;
  a.k_r = lerp(cfg.k_r_min, cfg.k_r_max, unit[0]);
  a.k_v = lerp(cfg.k_v_min, cfg.k_v_max, unit[1]);
  a.delta_tgo = lerp(cfg.delta_tgo_min, cfg.delta_tgo_max, unit[2]);
  a.alpha_x = lerp(-cfg.alpha_range, cfg.alpha_range, unit[3]);
  a.alpha_y = lerp(-cfg.alpha_range, cfg.alpha_range, unit[4]);
  return a;
}

void apply_target_shift(double& target_x, double& target_y, double alpha_x, double alpha_y,
                        double w_x, double w_y, double field_half_x, double field_half_y) {
  target_x += alpha_x * w_x;
  target_y += alpha_y * w_y;
  const double lim_x = std::max(0.0, field_half_x - w_x / 2.0);
  const double lim_y = std::max(0.0, field_half_y - w_y / 2.0);
  target_x = std::clamp(target_x, -lim_x, lim_x);
  target_y = std::clamp(target_y, -lim_y, lim_y);
}

RewardTerms compute_reward(const RewardContext& ctx, const EnvConfig& cfg) {
  RewardTerms t;
  t.fuel = -cfg.alpha_m * (ctx.m_prev - ctx.m_now) / (cfg.vehicle.m_0 - cfg.vehicle.m_dry);
  t.violation = cfg.alpha_f * ((ctx.crashed ? 1.0 : 0.0) + (ctx.fuel_out ? 1.0 : 0.0));
  if (ctx.done) {
    t.velocity = -cfg.alpha_v * ctx.velocity.norm();
    t.miss = -cfg.alpha_r * ctx.horizontal_miss;
    t.safety = cfg.alpha_s * (ctx.v_d_at_touchdown ? 1.0 : -1.0);
  }
  return t;
}

void index_hard_targets(TerrainEntry& entry, const EnvConfig& cfg) {
  entry.hard_targets.clear();
  const Dem& dem = entry.dem;
  const int radius = static_cast<int>(std::lround(cfg.hard_eval_radius / dem.resolution));
  const int box = static_cast<int>(std::lround(cfg.target_box_half / dem.resolution));
  const int rc = dem.rows() / 2, cc = dem.cols() / 2;
  const int r0 = std::max(0, rc - box), r1 = std::min(dem.rows() - 1, rc + box);
  const int c0 = std::max(0, cc - box), c1 = std::min(dem.cols() - 1, cc + box);

  std::vector<int> half(2 * radius + 1);
  long disc_size = 0;
  for (int dr = -radius; dr <= radius; ++dr) {
    half[dr + radius] = static_cast<int>(std::floor(std::sqrt(static_cast<double>(radius) * radius - dr * dr)));
    disc_size += 2 * half[dr + radius] + 1;
  }
  // Out-of-field pixels count as hazardous.
  auto hazardous = [&](int r, int c) {
    return !entry.maps.v_d.contains(r, c) || entry.maps.v_d(r, c) == 0;
  };

  for (int r = r0; r <= r1; ++r) {
    long count = 0;
    for (int dr = -radius; dr <= radius; ++dr)
      for (int dc = -half[dr + radius]; dc <= half[dr + radius]; ++dc)
        if (hazardous(r + dr, c0 + dc)) ++count;
    for (int c = c0; c <= c1; ++c) {
      if (c > c0) {
        for (int dr = -radius; dr <= radius; ++dr) {
          const int w = half[dr + radius];
          if (hazardous(r + dr, c - 1 - w)) --count;
          if (hazardous(r + dr, c + w)) ++count;
        }
      }
      if (static_cast<double>(count) >= cfg.hard_eval_hazard_fraction * disc_size)
        entry.hard_targets.emplace_back(r, c);
    }
  }
}

Environment::Environment(EnvConfig cfg, std::shared_ptr<const TerrainLibrary> library, EncoderFn encoder)
    : cfg_(std::move(cfg)), library_(std::move(library)), encoder_(std::move(encoder)) {
  cfg_.validate();
  if (!library_ || library_->empty()) throw std::invalid_argument("Environment: empty terrain library");
  if (!encoder_) throw std::invalid_argument("Environment: missing encoder");
}

const TerrainEntry& Environment::terrain() const { return (*library_)[terrain_index_]; }

void Environment::sample_initial_target(const TerrainEntry& entry) {
  const Dem& dem = entry.dem;
  if (cfg_.difficulty == Difficulty::HardEval) {
    if (entry.hard_targets.empty())
      throw std::runtime_error(
          "Environment: hard-eval target index empty (terrain too safe or index_hard_targets not run)");
    const auto& [r, c] = entry.hard_targets[rng_.uniform_index(entry.hard_targets.size())];
    target_x_ = dem.world_x(c);
    target_y_ = dem.world_y(r);
    return;
  }
  // Uniform pixel in the central box.
  const int box = static_cast<int>(std::lround(cfg_.target_box_half / dem.resolution));
  const int rc = dem.rows() / 2, cc = dem.cols() / 2;
  const int r0 = std::max(0, rc - box), r1 = std::min(dem.rows() - 1, rc + box);
  const int c0 = std::max(0, cc - box), c1 = std::min(dem.cols() - 1, cc + box);
  const int r = r0 + static_cast<int>(rng_.uniform_index(r1 - r0 + 1));
  const int c = c0 + static_cast<int>(rng_.uniform_index(c1 - c0 + 1));
  target_x_ = dem.world_x(c);
  target_y_ = dem.world_y(r);
}

void Environment::acquire_frame() {
  const TerrainEntry& entry = terrain();
  const std::uint64_t sensor_seed = rng_.next_u64();
  frame_ = generate_observation(entry.maps.v_p, entry.dem, state_.r, target_x_, target_y_,
                                cfg_.sensor, sensor_seed);
  frame_.lander_velocity = state_.v;
  frame_.lander_mass = state_.m;
  frame_.timestamp = state_.t;
  latent_ = encoder_(frame_.o_p);
  if (static_cast<int>(latent_.size()) != kLatentDim)
    throw std::runtime_error("Environment: encoder returned wrong latent size");
}

AgentObservation Environment::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  terrain_index_ = static_cast<int>(rng_.uniform_index(library_->size()));
  const TerrainEntry& entry = terrain();
  sample_initial_target(entry);

  const double z0 = rng_.uniform(cfg_.z0_min, cfg_.z0_max);
  const double dist = rng_.uniform(cfg_.horiz_dist_min, cfg_.horiz_dist_max);
  const double azimuth = rng_.uniform(0.0, 2.0 * M_PI);
  const double descent_speed = rng_.uniform(cfg_.descent_speed_min, cfg_.descent_speed_max);
  const double horiz_speed = rng_.uniform(cfg_.horiz_speed_min, cfg_.horiz_speed_max);
  const double aim_off = rng_.uniform(-cfg_.aim_half_angle_deg, cfg_.aim_half_angle_deg) * M_PI / 180.0;

  state_ = LanderState{};
  state_.r = Vec3{target_x_ + dist * std::cos(azimuth), target_y_ + dist * std::sin(azimuth), z0};
  const double aim = std::atan2(target_y_ - state_.r.y, target_x_ - state_.r.x) + aim_off;
  state_.v = Vec3{horiz_speed * std::cos(aim), horiz_speed * std::sin(aim), -descent_speed};
  state_.m = cfg_.vehicle.m_0;
  state_.t = 0.0;

  const Vec3 r_f{target_x_, target_y_, cfg_.z_f};
  const auto tgo = optimal_tgo(state_.r, state_.v, r_f, Vec3{}, cfg_.vehicle.g);
  t_go_ = tgo.value_or(cfg_.fallback_tgo);

  done_ = false;
  epoch_ = 0;
  total_reward_ = 0.0;
  info_ = EpisodeInfo{};
  inner_log_.clear();
  acquire_frame();
  return encode_observation();
}

StepOutcome Environment::step(const AgentAction& action, bool recompute_tgo) {
  if (done_) throw std::logic_error("Environment::step: episode already finished");
  ++epoch_;

  apply_target_shift(target_x_, target_y_, action.alpha_x, action.alpha_y, frame_.w_x, frame_.w_y,
                     terrain().dem.world_x(terrain().dem.cols() - 1),
                     terrain().dem.world_y(terrain().dem.rows() - 1));
  const Vec3 r_f{target_x_, target_y_, cfg_.z_f};
  const GuidanceGains gains{action.k_r, action.k_v};

  if (recompute_tgo) {
    const auto tgo = optimal_tgo(state_.r, state_.v, r_f, Vec3{}, cfg_.vehicle.g);
    if (tgo) t_go_ = *tgo;
  }

  const bool terminal_epoch = t_go_ <= cfg_.terminal_tgo_threshold;
  const double t_go_start = t_go_;
  const double duration = terminal_epoch ? t_go_start : cfg_.epoch_duration;
  const double m_prev = state_.m;
  TerminationCause cause = TerminationCause::None;

  double elapsed = 0.0;
  while (elapsed < duration - 1e-12 && cause == TerminationCause::None) {
    const double dt = std::min(cfg_.inner_dt, duration - elapsed);
    const double t_go_now = t_go_start - elapsed;

    const ZemZev zz = zem_zev(state_, GuidanceTarget{r_f, Vec3{}, t_go_now}, cfg_.vehicle.g);
    const Vec3 accel = commanded_accel(zz, gains, t_go_now, state_.m, cfg_.vehicle.t_max);
    const Vec3 thrust = accel * state_.m;

    const PropagateResult res = propagate(state_, thrust, dt, cfg_.vehicle, rng_);
    state_ = res.state;
    elapsed += dt;

    const Vec3 rel{state_.r.x - target_x_, state_.r.y - target_y_, state_.r.z};
    const double theta_g = rel.z > 0.0 ? glide_slope_angle(rel) : 90.0;
    info_.min_slant_angle_deg = std::min(info_.min_slant_angle_deg, 90.0 - theta_g);
    info_.max_thrust_n = std::max(info_.max_thrust_n, res.executed_thrust);
    inner_log_.push_back({state_.t, state_.r, state_.v, state_.m, res.executed_thrust, theta_g,
                          action.k_r, action.k_v, t_go_now - dt});

    if (state_.r.z <= cfg_.z_f && terminal_epoch) {
      cause = TerminationCause::Arrival;
    } else if (state_.r.z <= cfg_.z_max && !terminal_epoch) {
      cause = TerminationCause::Crash;
    } else if (res.fuel_exhausted) {
      cause = TerminationCause::FuelOut;
    }
  }
  if (cause == TerminationCause::None && terminal_epoch) cause = TerminationCause::TgoExhausted;

  done_ = cause != TerminationCause::None;
  if (!done_ && !recompute_tgo) {
    t_go_ = std::max(t_go_start - action.delta_tgo, 0.0);
  } else if (!done_ && recompute_tgo) {
    t_go_ = std::max(t_go_start - duration, 0.0);  // wall-clock fallback; re-solved next epoch
  }

  StepOutcome out;
  RewardContext ctx;
  ctx.m_prev = m_prev;
  ctx.m_now = state_.m;
  ctx.done = done_;
  ctx.crashed = cause == TerminationCause::Crash;
  ctx.fuel_out = cause == TerminationCause::FuelOut;
  ctx.velocity = state_.v;
  ctx.horizontal_miss = std::hypot(state_.r.x - target_x_, state_.r.y - target_y_);
  if (done_) {
    const Dem& dem = terrain().dem;
    const int row = std::clamp(static_cast<int>(std::lround(dem.row_of(state_.r.y))), 0, dem.rows() - 1);
    const int col = std::clamp(static_cast<int>(std::lround(dem.col_of(state_.r.x))), 0, dem.cols() - 1);
    ctx.v_d_at_touchdown = terrain().maps.v_d(row, col);
  }
  out.reward_terms = compute_reward(ctx, cfg_);
  out.reward = out.reward_terms.total();
  total_reward_ += out.reward;
  out.done = done_;

  if (done_) {
    info_.cause = cause;
    info_.v_d_at_touchdown = ctx.v_d_at_touchdown;
    info_.fuel_used_kg = cfg_.vehicle.m_0 - state_.m;
    info_.miss_distance = ctx.horizontal_miss;
    info_.final_speed = state_.v.norm();
    info_.total_reward = total_reward_;
    out.info = info_;
    out.observation = encode_observation();  // stale frame; episode is over
  } else {
    acquire_frame();
    out.observation = encode_observation();
  }
  return out;
}

AgentObservation Environment::encode_observation() const {
  AgentObservation o;
  o.reserve(kObservationDim);
  o.push_back(state_.r.x / cfg_.position_scale);
  o.push_back(state_.r.y / cfg_.position_scale);
  o.push_back(state_.r.z / cfg_.position_scale);
  o.push_back(state_.v.x / cfg_.velocity_scale);
  o.push_back(state_.v.y / cfg_.velocity_scale);
  o.push_back(state_.v.z / cfg_.velocity_scale);
  o.push_back((state_.m - cfg_.vehicle.m_dry) / (cfg_.vehicle.m_0 - cfg_.vehicle.m_dry));
  o.push_back(frame_.w_x / cfg_.fov_scale);
  o.push_back(frame_.w_y / cfg_.fov_scale);
  o.push_back(target_x_ / cfg_.position_scale);
  o.push_back(target_y_ / cfg_.position_scale);
  o.push_back(cfg_.z_f / cfg_.position_scale);
  o.insert(o.end(), latent_.begin(), latent_.end());
  return o;
}

}  // namespace hda
