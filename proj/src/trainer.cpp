#include "firenav/trainer.hpp"

#include <algorithm>
#include <limits>

#include "firenav/errors.hpp"
#include "firenav/text.hpp"

namespace firenav {

void TrainConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in [0, 1)");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0))
    throw ValidationError("epsilon values must lie in [0, 1]");
  if (epsilon_end > epsilon_start) throw ValidationError("epsilon_end exceeds epsilon_start");
  if (epsilon_decay_frames < 0) throw ValidationError("epsilon_decay_frames must be >= 0");
  if (episodes < 0 || max_steps < 0) throw ValidationError("episodes and max_steps must be >= 0");
  if (batch <= 0) throw ValidationError("batch must be positive");
  if (!(learning_rate >= 0.0)) throw ValidationError("learning_rate must be >= 0");
  if (replay_capacity == 0) throw ValidationError("replay_capacity must be positive");
  if (total_frame_budget <= 0) throw ValidationError("total_frame_budget must be positive");
  if (target_sync_period <= 0) throw ValidationError("target_sync_period must be positive");
  if (eval_every < 0) throw ValidationError("eval_every must be >= 0");
}

double epsilon_at(long frame, const TrainConfig& cfg) {
  if (frame >= cfg.epsilon_decay_frames) return cfg.epsilon_end;
  const double progress = double(std::max(frame, 0L)) / double(cfg.epsilon_decay_frames);
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * progress;
}

Action greedy_action(const QValues& q) { return kActions[argmax_lowest(q)]; }

Action select_action(const QNetwork& net, const Observation& obs, double epsilon, Rng& rng) {
  // Always consume the exploration draw so the stream length is independent of the network.
  const bool explore = rng.uniform() < epsilon;
  if (explore) return kActions[rng.below(kNumActions)];
  return greedy_action(net.forward(obs));
}

double compute_target(const Experience& e, const QNetwork& target_net, double gamma) {
  if (e.terminal) return e.reward;
  const QValues q = target_net.forward(e.next_state);
  return e.reward + gamma * *std::max_element(q.begin(), q.end());
}

std::string format_stats_csv(const TrainStats& stats) {
  std::string out = "episode,frames,return,length,outcome,epsilon,mean_loss\n";
  for (const EpisodeStats& e : stats.episodes) {
    out += std::to_string(e.episode) + ',' + std::to_string(e.frames) + ',' +
           format_double(e.total_reward) + ',' + std::to_string(e.length) + ',' +
           std::string(outcome_name(e.outcome)) + ',' + format_double(e.epsilon) + ',' +
           format_double(e.mean_loss) + '\n';
  }
  return out;
}

void write_stats_csv(const std::filesystem::path& path, const TrainStats& stats) {
  write_file(path, format_stats_csv(stats));
}

EpisodeRecord RolloutResult::as_episode(std::uint64_t scenario_hash, std::uint64_t seed,
                                        double coverage) const {
  return {scenario_hash, seed, coverage, steps, outcome};
}

RolloutResult greedy_rollout(const QNetwork& net, Environment& env, int max_steps) {
  RolloutResult out;
  while (!env.terminal() && out.length() < max_steps) {
    const Action a = greedy_action(net.forward(env.observation()));
    const StepResult r = env.step(a);
    out.steps.push_back({out.length() + 1, a, r.reward, r.terminal});
    out.total_reward += r.reward;
    out.outcome = r.outcome;
  }
  return out;
}

Trainer::Trainer(TrainConfig cfg, QNetShape shape)
    : cfg_((cfg.validate(), cfg)),
      net_(shape, cfg.seed),
      target_(net_),
      optimizer_(shape, RmsPropConfig{.learning_rate = cfg.learning_rate}),
      replay_(cfg.replay_capacity),
      rng_(derive_seed(cfg.seed, 0)) {}

double Trainer::learn() {
  const std::vector<Experience> batch = replay_.sample(std::size_t(cfg_.batch), rng_);

  std::vector<const Observation*> next;
  for (const Experience& e : batch) next.push_back(&e.next_state);
  const Eigen::MatrixXd q_next = target_.forward_batch(next);

  std::vector<TrainingExample> examples(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Experience& e = batch[i];
    const double y =
        e.terminal ? e.reward : e.reward + cfg_.gamma * q_next.col(Eigen::Index(i)).maxCoeff();
    examples[i] = {&e.state, e.action, y};
  }
  const BackwardResult result = net_.backward(examples);
  optimizer_.apply(net_.mutable_parameters(), result.gradients);
  ++stats_.updates;
  if (stats_.updates % cfg_.target_sync_period == 0) target_.load(net_.snapshot());
  return result.loss;
}

EpisodeStats Trainer::run_episode(Environment& env, int episode) {
  EpisodeStats es;
  es.episode = episode;
  double loss_sum = 0.0;
  int loss_count = 0;
  Observation obs = env.observation();
  while (!env.terminal() && stats_.frames < cfg_.total_frame_budget &&
         (cfg_.max_steps == 0 || es.length < cfg_.max_steps)) {
    es.epsilon = epsilon_at(stats_.frames, cfg_);
    const Action a = select_action(net_, obs, es.epsilon, rng_);
    StepResult r = env.step(a);
    ++stats_.frames;
    ++es.length;
    es.total_reward += r.reward;
    es.outcome = r.outcome;
    replay_.push({obs, a, r.reward, r.observation, r.terminal});
    obs = std::move(r.observation);
    if (replay_.size() >= std::max<std::size_t>(cfg_.min_replay_before_learning, 1)) {
      loss_sum += learn();
      ++loss_count;
    }
  }
  es.frames = stats_.frames;
  es.mean_loss = loss_count ? loss_sum / loss_count : 0.0;
  return es;
}

TrainStats Trainer::run(const EnvironmentFactory& factory, const TrainHooks& hooks) {
  const EnvironmentFactory& eval_factory = hooks.eval_factory ? hooks.eval_factory : factory;
  const std::uint64_t eval_seed = derive_seed(cfg_.seed, std::numeric_limits<std::uint32_t>::max());
  for (int ep = 0; ep < cfg_.episodes && stats_.frames < cfg_.total_frame_budget; ++ep) {
    const std::unique_ptr<Environment> env = factory(derive_seed(cfg_.seed, std::uint64_t(ep) + 1), ep);
    stats_.episodes.push_back(run_episode(*env, ep));

    if (cfg_.eval_every > 0 && (ep + 1) % cfg_.eval_every == 0) {
      const std::unique_ptr<Environment> probe = eval_factory(eval_seed, -1);
      const RolloutResult r = greedy_rollout(net_, *probe, std::numeric_limits<int>::max());
      stats_.evaluations.push_back({ep, stats_.frames, r.outcome, r.length(), r.total_reward});
      if (r.outcome == Outcome::ReachedGoal && !stats_.frames_to_first_greedy_success)
        stats_.frames_to_first_greedy_success = stats_.frames;
      if (cfg_.keep_best && (!stats_.best_evaluation ||
                             r.total_reward > stats_.evaluations[*stats_.best_evaluation].total_reward)) {
        stats_.best_evaluation = stats_.evaluations.size() - 1;
        best_ = net_.snapshot();
      }
    }
    if (hooks.stop && hooks.stop(stats_)) break;
  }
  if (best_) net_.load(*best_);
  return stats_;
}

TrainResult train(const EnvironmentFactory& factory, const TrainConfig& cfg, const QNetShape& shape,
                  const TrainHooks& hooks) {
  Trainer trainer(cfg, shape);
  TrainStats stats = trainer.run(factory, hooks);
  return {trainer.net(), trainer.optimizer(), std::move(stats)};
}

}  // namespace firenav
