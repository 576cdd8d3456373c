#include "hda/td3.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace hda {

void ReplayBuffer::push(Transition t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[next_] = std::move(t);  // FIFO eviction
    next_ = (next_ + 1) % capacity_;
  }
}

std::vector<size_t> ReplayBuffer::sample_indices(size_t batch, Rng& rng) const {
  if (storage_.size() < batch) throw std::logic_error("ReplayBuffer: not enough samples");
  std::vector<size_t> idx(batch);
  for (size_t i = 0; i < batch; ++i) idx[i] = rng.uniform_index(storage_.size());
  return idx;
}

void ReplayBuffer::save(std::ostream& os) const {
  const size_t obs_dim = storage_.empty() ? 0 : storage_[0].o.size();
  os << "HDARB 1 " << capacity_ << ' ' << next_ << ' ' << storage_.size() << ' ' << obs_dim << '\n';
  for (const Transition& t : storage_) {
    os.write(reinterpret_cast<const char*>(t.o.data()), static_cast<std::streamsize>(t.o.size() * 8));
    os.write(reinterpret_cast<const char*>(t.a.data()), kActionDim * 8);
    os.write(reinterpret_cast<const char*>(&t.r), 8);
    os.write(reinterpret_cast<const char*>(t.o2.data()), static_cast<std::streamsize>(t.o2.size() * 8));
    const char d = t.done ? 1 : 0;
    os.write(&d, 1);
  }
}

ReplayBuffer ReplayBuffer::load(std::istream& is) {
  std::string magic;
  int version = 0;
  size_t capacity = 0, next = 0, count = 0, obs_dim = 0;
  is >> magic >> version >> capacity >> next >> count >> obs_dim;
  if (magic != "HDARB" || version != 1) throw std::runtime_error("ReplayBuffer::load: bad header");
  is.get();  // newline
  ReplayBuffer buf(capacity);
  buf.next_ = next;
  buf.storage_.resize(count);
  for (Transition& t : buf.storage_) {
    t.o.resize(obs_dim);
    t.o2.resize(obs_dim);
    is.read(reinterpret_cast<char*>(t.o.data()), static_cast<std::streamsize>(obs_dim * 8));
    is.read(reinterpret_cast<char*>(t.a.data()), kActionDim * 8);
    is.read(reinterpret_cast<char*>(&t.r), 8);
    is.read(reinterpret_cast<char*>(t.o2.data()), static_cast<std::streamsize>(obs_dim * 8));
    char d = 0;
    is.read(&d, 1);
    t.done = d != 0;
  }
  if (!is) throw std::runtime_error("ReplayBuffer::load: truncated");
  return buf;
}

void Td3Config::validate() const {
  if (gamma <= 0.0 || gamma > 1.0) throw std::invalid_argument("Td3Config: gamma out of (0,1]");
  if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("Td3Config: tau out of (0,1]");
  if (policy_delay < 1 || batch_size < 1 || hidden < 1) throw std::invalid_argument("Td3Config: bad sizes");
  if (buffer_capacity < static_cast<size_t>(batch_size))
    throw std::invalid_argument("Td3Config: capacity < batch");
}

namespace {

std::vector<double> critic_input(const std::vector<double>& o, const double* a, int act_dim) {
  std::vector<double> in;
  in.reserve(o.size() + act_dim);
  in.insert(in.end(), o.begin(), o.end());
  in.insert(in.end(), a, a + act_dim);
  return in;
}

}  // namespace

Td3Agent::Td3Agent(int obs_dim, int act_dim, const Td3Config& cfg, Rng& rng)
    : cfg_(cfg),
      actor_({obs_dim, cfg.hidden, cfg.hidden, act_dim},
             {Activation::Relu, Activation::Relu, Activation::Sigmoid}),
      critic1_({obs_dim + act_dim, cfg.hidden, cfg.hidden, 1},
               {Activation::Relu, Activation::Relu, Activation::Identity}),
      critic2_(critic1_),
      target_actor_(actor_),
      target_critic1_(critic1_),
      target_critic2_(critic1_),
      actor_opt_(0, cfg.actor_lr),
      critic1_opt_(0, cfg.critic_lr),
      critic2_opt_(0, cfg.critic_lr) {
  cfg_.validate();
  actor_.init_random(rng);
  critic1_.init_random(rng);
  critic2_.init_random(rng);
  target_actor_ = actor_;
  target_critic1_ = critic1_;
  target_critic2_ = critic2_;
  actor_opt_ = AdamOptimizer(actor_.param_count(), cfg.actor_lr);
  critic1_opt_ = AdamOptimizer(critic1_.param_count(), cfg.critic_lr);
  critic2_opt_ = AdamOptimizer(critic2_.param_count(), cfg.critic_lr);
}

std::array<double, kActionDim> Td3Agent::select_action(const std::vector<double>& obs, double sigma,
                                                       Rng& rng) const {
  const std::vector<double> mu = actor_.forward(obs);
  std::array<double, kActionDim> a{};
  for (int i = 0; i < kActionDim; ++i) {
    double v = mu[i];
    if (sigma > 0.0) v += rng.normal(0.0, sigma);
    a[i] = std::clamp(v, 0.0, 1.0);
  }
  return a;
}

std::vector<double> Td3Agent::critic_target(const ReplayBuffer& buffer,
                                            const std::vector<size_t>& batch, Rng& rng) const {
  std::vector<double> y(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = buffer[batch[i]];
    if (t.done) {
      y[i] = t.r;  // never bootstrap through terminals
      continue;
    }
    std::vector<double> a2 = target_actor_.forward(t.o2);
    for (double& v : a2) {
      if (cfg_.smoothing_sigma > 0.0) {
        const double eps = std::clamp(rng.normal(0.0, cfg_.smoothing_sigma), -cfg_.smoothing_clip,
                                      cfg_.smoothing_clip);
        v += eps;
      }
      v = std::clamp(v, 0.0, 1.0);
    }
    const std::vector<double> in = critic_input(t.o2, a2.data(), kActionDim);
    const double q1 = target_critic1_.forward(in)[0];
    const double q2 = target_critic2_.forward(in)[0];
    y[i] = t.r + cfg_.gamma * std::min(q1, q2);
  }
  return y;
}

double Td3Agent::update_critics(const ReplayBuffer& buffer, const std::vector<size_t>& batch,
                                const std::vector<double>& y) {
  if (y.size() != batch.size()) throw std::invalid_argument("update_critics: y size mismatch");
  const double inv_n = 1.0 / batch.size();
  double loss = 0.0;
  for (int k = 0; k < 2; ++k) {
    DenseNet& critic = k == 0 ? critic1_ : critic2_;
    AdamOptimizer& opt = k == 0 ? critic1_opt_ : critic2_opt_;
    std::vector<double> grads(critic.param_count(), 0.0);
    for (size_t i = 0; i < batch.size(); ++i) {
      const Transition& t = buffer[batch[i]];
      const std::vector<double> in = critic_input(t.o, t.a.data(), kActionDim);
      DenseNet::Cache cache;
      const double q = critic.forward(in, &cache)[0];
      const double err = q - y[i];
      loss += err * err * inv_n;
      critic.backward(cache, {2.0 * err * inv_n}, grads);
    }
    opt.step(critic.params(), grads);
  }
  return loss;
}

double Td3Agent::update_actor(const ReplayBuffer& buffer, const std::vector<size_t>& batch) {
  const double inv_n = 1.0 / batch.size();
  std::vector<double> actor_grads(actor_.param_count(), 0.0);
  std::vector<double> critic_scratch(critic1_.param_count(), 0.0);
  double objective = 0.0;
  for (size_t i : batch) {
    const Transition& t = buffer[i];
    DenseNet::Cache actor_cache;
    const std::vector<double> mu = actor_.forward(t.o, &actor_cache);
    const std::vector<double> in = critic_input(t.o, mu.data(), kActionDim);
    DenseNet::Cache critic_cache;
    objective += critic1_.forward(in, &critic_cache)[0] * inv_n;
    // dQ/d(input); action part chains into the actor. Ascent: negate for Adam.
    const std::vector<double> in_grad = critic1_.backward(critic_cache, {-inv_n}, critic_scratch);
    const std::vector<double> a_grad(in_grad.end() - kActionDim, in_grad.end());
    actor_.backward(actor_cache, a_grad, actor_grads);
  }
  actor_opt_.step(actor_.params(), actor_grads);
  return objective;
}

void Td3Agent::update_targets() {
  soft_update(target_actor_.params(), actor_.params(), cfg_.tau);
  soft_update(target_critic1_.params(), critic1_.params(), cfg_.tau);
  soft_update(target_critic2_.params(), critic2_.params(), cfg_.tau);
}

void Td3Agent::save(std::ostream& os) const {
  os << "HDATD3 1\n";
  actor_.save(os);
  critic1_.save(os);
  critic2_.save(os);
  target_actor_.save(os);
  target_critic1_.save(os);
  target_critic2_.save(os);
  actor_opt_.save(os);
  critic1_opt_.save(os);
  critic2_opt_.save(os);
}

Td3Agent Td3Agent::load(std::istream& is, const Td3Config& cfg) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "HDATD3" || version != 1) throw std::runtime_error("Td3Agent::load: bad header");
  Rng dummy(0);
  DenseNet actor = DenseNet::load(is);
  Td3Agent agent(actor.input_size(), actor.output_size(), cfg, dummy);
  agent.actor_ = std::move(actor);
  agent.critic1_ = DenseNet::load(is);
  agent.critic2_ = DenseNet::load(is);
  agent.target_actor_ = DenseNet::load(is);
  agent.target_critic1_ = DenseNet::load(is);
  agent.target_critic2_ = DenseNet::load(is);
  agent.actor_opt_ = AdamOptimizer::load(is);
  agent.critic1_opt_ = AdamOptimizer::load(is);
  agent.critic2_opt_ = AdamOptimizer::load(is);
  return agent;
}

Td3Trainer::Td3Trainer(std::shared_ptr<Environment> env, Td3Config cfg, std::uint64_t seed)
    : env_(std::move(env)), cfg_(cfg), rng_(seed) {
  cfg_.validate();
  agent_ = std::make_unique<Td3Agent>(kObservationDim, kActionDim, cfg_, rng_);
  buffer_ = std::make_unique<ReplayBuffer>(cfg_.buffer_capacity);
}

Td3Trainer::Td3Trainer(std::shared_ptr<Environment> env, Td3Config cfg)
    : env_(std::move(env)), cfg_(cfg), rng_(0) {}

void Td3Trainer::log_window(const std::function<void(const TrainLogRow&)>& log_cb) {
  if (!log_cb) return;
  TrainLogRow row;
  row.update = updates_;
  row.env_step = env_steps_;
  row.episode = episodes_;
  row.critic_loss = last_critic_loss_;
  row.actor_objective = last_actor_objective_;
  if (!recent_rewards_.empty()) {
    double sum = 0.0;
    for (double r : recent_rewards_) sum += r;
    row.mean_reward = sum / recent_rewards_.size();
    double safe = 0.0;
    for (int s : recent_safe_) safe += s;
    row.safe_landing_rate = safe / recent_safe_.size();
  }
  log_cb(row);
}

void Td3Trainer::run(long target_updates, const std::function<void(const TrainLogRow&)>& log_cb) {
  while (updates_ < target_updates || episode_active_) {
    if (!episode_active_) {
      obs_ = env_->reset(rng_.next_u64());
      episode_reward_ = 0.0;
      episode_active_ = true;
    }

    std::array<double, kActionDim> unit{};
    if (env_steps_ < cfg_.warmup_steps) {
      for (double& v : unit) v = rng_.uniform();
    } else {
      unit = agent_->select_action(obs_, cfg_.exploration_sigma, rng_);
    }
    const StepOutcome out = env_->step(scale_action(unit, env_->config()));
    ++env_steps_;
    episode_reward_ += out.reward;

    Transition t;
    t.o = obs_;
    t.a = unit;
    t.r = out.reward;
    t.o2 = out.observation;
    t.done = out.done;
    buffer_->push(std::move(t));
    obs_ = out.observation;

    if (out.done) {
      episode_active_ = false;
      ++episodes_;
      recent_rewards_.push_back(episode_reward_);
      const bool safe = out.info.cause == TerminationCause::Arrival && out.info.v_d_at_touchdown == 1;
      recent_safe_.push_back(safe ? 1 : 0);
      if (static_cast<int>(recent_rewards_.size()) > cfg_.episode_window) {
        recent_rewards_.erase(recent_rewards_.begin());
        recent_safe_.erase(recent_safe_.begin());
      }
    }

    if (env_steps_ >= cfg_.warmup_steps && buffer_->size() >= static_cast<size_t>(cfg_.batch_size)) {
      const auto batch = buffer_->sample_indices(cfg_.batch_size, rng_);
      const auto y = agent_->critic_target(*buffer_, batch, rng_);
      last_critic_loss_ = agent_->update_critics(*buffer_, batch, y);
      if (!std::isfinite(last_critic_loss_))
        throw std::runtime_error("Td3Trainer: critic loss is not finite");
      ++updates_;
      if (updates_ % cfg_.policy_delay == 0) {
        last_actor_objective_ = agent_->update_actor(*buffer_, batch);
        agent_->update_targets();
      }
      if (updates_ % cfg_.log_every == 0) log_window(log_cb);
    }
  }
}

void Td3Trainer::save(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream os(dir + "/agent.ckpt");
    if (!os) throw std::runtime_error("Td3Trainer::save: cannot open agent.ckpt");
    agent_->save(os);
  }
  {
    std::ofstream os(dir + "/replay.bin", std::ios::binary);
    if (!os) throw std::runtime_error("Td3Trainer::save: cannot open replay.bin");
    buffer_->save(os);
  }
  {
    std::ofstream os(dir + "/trainer.state");
    if (!os) throw std::runtime_error("Td3Trainer::save: cannot open trainer.state");
    os << "HDATRAINER 1\n";
    os << env_steps_ << ' ' << updates_ << ' ' << episodes_ << '\n';
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", last_critic_loss_, last_actor_objective_);
    os << buf;
    os << recent_rewards_.size() << '\n';
    for (size_t i = 0; i < recent_rewards_.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g %d\n", recent_rewards_[i], recent_safe_[i]);
      os << buf;
    }
    os << "rng ";
    rng_.save(os);
    os << '\n';
  }
}

Td3Trainer Td3Trainer::load(const std::string& dir, std::shared_ptr<Environment> env, Td3Config cfg) {
  cfg.validate();
  Td3Trainer trainer(std::move(env), cfg);
  {
    std::ifstream is(dir + "/agent.ckpt");
    if (!is) throw std::runtime_error("Td3Trainer::load: missing agent.ckpt");
    trainer.agent_ = std::make_unique<Td3Agent>(Td3Agent::load(is, cfg));
  }
  {
    std::ifstream is(dir + "/replay.bin", std::ios::binary);
    if (!is) throw std::runtime_error("Td3Trainer::load: missing replay.bin");
    trainer.buffer_ = std::make_unique<ReplayBuffer>(ReplayBuffer::load(is));
  }
  {
    std::ifstream is(dir + "/trainer.state");
    if (!is) throw std::runtime_error("Td3Trainer::load: missing trainer.state");
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "HDATRAINER" || version != 1)
      throw std::runtime_error("Td3Trainer::load: bad trainer.state");
    is >> trainer.env_steps_ >> trainer.updates_ >> trainer.episodes_;
    is >> trainer.last_critic_loss_ >> trainer.last_actor_objective_;
    size_t n = 0;
    is >> n;
    trainer.recent_rewards_.resize(n);
    trainer.recent_safe_.resize(n);
    for (size_t i = 0; i < n; ++i) is >> trainer.recent_rewards_[i] >> trainer.recent_safe_[i];
    std::string tag;
    is >> tag;
    if (tag != "rng") throw std::runtime_error("Td3Trainer::load: missing rng state");
    is.get();
    trainer.rng_.load(is);
  }
  return trainer;
}

}  // namespace hda
