#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "evcs/allocator.hpp"
#include "evcs/qnet.hpp"
#include "evcs/replay.hpp"
#include "evcs/scenario.hpp"
#include "evcs/station.hpp"

namespace evcs {

struct TrainConfig {
  double gamma = 1.0;
  double lr_initial = 0.01;
  int lr_halving_episodes = 200;
  int target_sync_episodes = 25;  // K
  int batch_size = 64;
  size_t replay_capacity = 100000;
  double epsilon_initial = 1.0;
  double epsilon_min = 0.05;
  double epsilon_decay_fraction = 0.8;  // reaches epsilon_min after this share of episodes
  int episodes = 2000;
  std::vector<int> hidden = {256, 128, 64};

  void validate() const;
};

// Everything one experiment varies: prices, arrival process, hardware.
struct ScenarioSpec {
  Tariff tariff;
  ArrivalPattern pattern;
  StationConfig station;
};

double epsilon_at(const TrainConfig& cfg, int episode);
double lr_at(const TrainConfig& cfg, int episode);

// Epsilon-greedy over the feasible grid: explore uniformly with probability
// epsilon, otherwise the batched argmax.
double select_action(const QNet& net, const std::vector<double>& features,
                     const ActionBounds& bounds, double delta_a, double a_max, double epsilon,
                     Rng& rng);

struct EpisodeMetrics {
  int episode = 0;
  double z = 0, b_c = 0, b_d = 0, c_p = 0, c_l = 0;
  double loss = 0;  // mean over the episode's gradient steps
  double epsilon = 0, lr = 0;
  int admitted = 0, rejected = 0;
};

struct TrainHooks {
  std::function<void(const EpisodeMetrics&)> on_episode;
};

struct TrainResult {
  QNet net;
  QNet target;
  std::vector<EpisodeMetrics> metrics;
};

// Per-episode request source; defaults to Poisson sampling from the pattern.
// Episode index keys the rng stream so runs are reproducible and resumable.
using RequestProvider = std::function<std::vector<EvRequest>(int episode, Rng& rng)>;

// Full training loop: every step admits and allocates, lets each charger act
// epsilon-greedily, assembles the reward parts, pushes one transition per
// charger into the shared memory, and takes one gradient step. The target
// network refreshes every K episodes. Pass resume + start_episode to continue
// a run; the epsilon/lr schedules follow the absolute episode index.
TrainResult train(const ScenarioSpec& scenario, const TrainConfig& cfg, uint64_t seed,
                  const TrainHooks& hooks = {}, int start_episode = 0,
                  const QNet* resume_net = nullptr, const QNet* resume_target = nullptr,
                  const RequestProvider& provider = nullptr);

}  // namespace evcs
