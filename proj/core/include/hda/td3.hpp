#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hda/env.hpp"
#include "hda/net.hpp"

namespace hda {

struct Transition {
  std::vector<double> o;               // 44
  std::array<double, kActionDim> a;    // unit box
  double r = 0.0;
  std::vector<double> o2;
  bool done = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {}

  void push(Transition t);
  size_t size() const { return storage_.size(); }
  size_t capacity() const { return capacity_; }
  const Transition& operator[](size_t i) const { return storage_[i]; }

  // Uniform with replacement; requires size >= batch.
  std::vector<size_t> sample_indices(size_t batch, Rng& rng) const;

  void save(std::ostream& os) const;
  static ReplayBuffer load(std::istream& is);

 private:
  size_t capacity_;
  size_t next_ = 0;  // ring cursor once full
  std::vector<Transition> storage_;
};

struct Td3Config {
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  double exploration_sigma = 0.1;
  double smoothing_sigma = 0.2;
  double smoothing_clip = 0.5;
  int batch_size = 256;
  size_t buffer_capacity = 100000;
  long warmup_steps = 1000;
  long total_updates = 250000;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  int hidden = 256;
  int log_every = 100;          // updates between log rows
  int episode_window = 200;     // moving window for reward / safe-landing rate

  void validate() const;
};

// Twin critics, target smoothing, delayed actor/target updates.
class Td3Agent {
 public:
  Td3Agent(int obs_dim, int act_dim, const Td3Config& cfg, Rng& rng);

  std::array<double, kActionDim> select_action(const std::vector<double>& obs, double sigma,
                                               Rng& rng) const;

  std::vector<double> critic_target(const ReplayBuffer& buffer, const std::vector<size_t>& batch,
                                    Rng& rng) const;
  double update_critics(const ReplayBuffer& buffer, const std::vector<size_t>& batch,
                        const std::vector<double>& y);
  double update_actor(const ReplayBuffer& buffer, const std::vector<size_t>& batch);
  void update_targets();

  DenseNet& actor() { return actor_; }
  const DenseNet& actor() const { return actor_; }
  DenseNet& critic(int k) { return k == 0 ? critic1_ : critic2_; }
  DenseNet& target_actor() { return target_actor_; }
  DenseNet& target_critic(int k) { return k == 0 ? target_critic1_ : target_critic2_; }
  const Td3Config& config() const { return cfg_; }

  void save(std::ostream& os) const;
  static Td3Agent load(std::istream& is, const Td3Config& cfg);

 private:
  Td3Config cfg_;
  DenseNet actor_, critic1_, critic2_;
  DenseNet target_actor_, target_critic1_, target_critic2_;
  AdamOptimizer actor_opt_, critic1_opt_, critic2_opt_;
};

struct TrainLogRow {
  long update = 0;
  long env_step = 0;
  long episode = 0;
  double critic_loss = 0.0;
  double actor_objective = 0.0;
  double mean_reward = 0.0;       // over the episode window
  double safe_landing_rate = 0.0; // over the episode window
};

// Training loop driver; owns the replay buffer and RNG streams so it can be
// checkpointed and resumed mid-run.
class Td3Trainer {
 public:
  Td3Trainer(std::shared_ptr<Environment> env, Td3Config cfg, std::uint64_t seed);

  // Runs until `target_updates` gradient updates have been applied in total,
  // then finishes the in-flight episode so a checkpoint captures complete
  // state (resume is bit-exact from an episode boundary).
  void run(long target_updates, const std::function<void(const TrainLogRow&)>& log_cb = nullptr);

  const Td3Agent& agent() const { return *agent_; }
  Td3Agent& agent() { return *agent_; }
  long updates() const { return updates_; }
  long env_steps() const { return env_steps_; }
  long episodes() const { return episodes_; }

  void save(const std::string& dir) const;
  static Td3Trainer load(const std::string& dir, std::shared_ptr<Environment> env, Td3Config cfg);

 private:
  Td3Trainer(std::shared_ptr<Environment> env, Td3Config cfg);  // for load
  void log_window(const std::function<void(const TrainLogRow&)>& log_cb);

  std::shared_ptr<Environment> env_;
  Td3Config cfg_;
  std::unique_ptr<Td3Agent> agent_;
  std::unique_ptr<ReplayBuffer> buffer_;
  Rng rng_;

  long env_steps_ = 0;
  long updates_ = 0;
  long episodes_ = 0;
  double last_critic_loss_ = 0.0;
  double last_actor_objective_ = 0.0;
  std::vector<double> recent_rewards_;
  std::vector<int> recent_safe_;

  bool episode_active_ = false;
  std::vector<double> obs_;
  double episode_reward_ = 0.0;
};

}  // namespace hda
