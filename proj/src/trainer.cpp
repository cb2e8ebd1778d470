#include "evcs/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evcs {

void TrainConfig::validate() const {
  if (gamma < 0 || gamma > 1) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (lr_initial <= 0) throw std::invalid_argument("lr_initial must be positive");
  if (lr_halving_episodes < 1) throw std::invalid_argument("lr_halving_episodes must be >= 1");
  if (target_sync_episodes < 1) throw std::invalid_argument("target_sync_episodes must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (replay_capacity < static_cast<size_t>(batch_size))
    throw std::invalid_argument("replay_capacity must hold at least one batch");
  if (epsilon_initial < 0 || epsilon_initial > 1 || epsilon_min < 0 ||
      epsilon_min > epsilon_initial)
    throw std::invalid_argument("need 0 <= epsilon_min <= epsilon_initial <= 1");
  if (epsilon_decay_fraction <= 0 || epsilon_decay_fraction > 1)
    throw std::invalid_argument("epsilon_decay_fraction must lie in (0, 1]");
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  for (int h : hidden)
    if (h < 1) throw std::invalid_argument("hidden layer sizes must be positive");
}

double epsilon_at(const TrainConfig& cfg, int episode) {
  int decay = std::max(1, static_cast<int>(cfg.episodes * cfg.epsilon_decay_fraction));
  double frac = std::min(1.0, static_cast<double>(episode) / decay);
  return cfg.epsilon_initial - (cfg.epsilon_initial - cfg.epsilon_min) * frac;
}

double lr_at(const TrainConfig& cfg, int episode) {
  return cfg.lr_initial * std::pow(0.5, episode / cfg.lr_halving_episodes);
}

double select_action(const QNet& net, const std::vector<double>& features,
                     const ActionBounds& bounds, double delta_a, double a_max, double epsilon,
                     Rng& rng) {
  double x = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (x < epsilon) {
    int m = bounds.count(delta_a);
    int k = std::uniform_int_distribution<int>(0, m - 1)(rng);
    return bounds.at(k, delta_a);
  }
  return q_argmax_one(net, features, bounds, delta_a, a_max).action;
}

namespace {

// Bellman targets for one minibatch: bootstrap with the target network's
// batched maximum over each successor's feasible grid.
void build_batch(const std::vector<Transition>& batch, const QNet& target,
                 const TrainConfig& cfg, const StationConfig& station, Eigen::MatrixXd& X,
                 Eigen::VectorXd& y) {
  int k = static_cast<int>(batch.size());
  int dim = static_cast<int>(batch[0].s.size()) + 1;
  X.resize(k, dim);
  y.resize(k);
  std::vector<std::vector<double>> next_features;
  std::vector<ActionBounds> next_bounds;
  std::vector<int> next_of(k, -1);
  for (int i = 0; i < k; ++i) {
    const Transition& t = batch[i];
    for (int c = 0; c + 1 < dim; ++c) X(i, c) = t.s[c];
    X(i, dim - 1) = t.a / station.a_max;
    if (!t.terminal && cfg.gamma > 0) {
      next_of[i] = static_cast<int>(next_features.size());
      next_features.push_back(t.s_next);
      next_bounds.push_back(t.feasible_next);
    }
  }
  std::vector<ArgmaxResult> best;
  if (!next_features.empty())
    best = q_argmax(target, next_features, next_bounds, station.delta_a, station.a_max);
  for (int i = 0; i < k; ++i) {
    double bootstrap = next_of[i] >= 0 ? cfg.gamma * best[next_of[i]].value : 0.0;
    y(i) = batch[i].r + bootstrap;
  }
}

}  // namespace

TrainResult train(const ScenarioSpec& scenario, const TrainConfig& cfg, uint64_t seed,
                  const TrainHooks& hooks, int start_episode, const QNet* resume_net,
                  const QNet* resume_target, const RequestProvider& provider) {
  cfg.validate();
  scenario.station.validate();
  scenario.tariff.validate();

  std::vector<int> sizes;
  sizes.push_back(feature_dim(scenario.tariff) + 1);
  for (int h : cfg.hidden) sizes.push_back(h);
  sizes.push_back(1);

  TrainResult result;
  result.net = resume_net ? *resume_net : QNet::init_random(sizes, mix_seed(seed, 1));
  result.target = resume_target ? *resume_target : result.net;
  if (!result.net.same_shape(QNet(sizes)))
    throw std::invalid_argument("resume network shape does not match config");

  ReplayMemory memory(cfg.replay_capacity);
  Station station(scenario.station, scenario.tariff);
  const StationConfig& sc = scenario.station;
  int n_chargers = sc.n_chargers;

  for (int episode = start_episode; episode < cfg.episodes; ++episode) {
    Rng scen_rng = make_rng(seed, 1000000u + episode);
    Rng act_rng = make_rng(seed, 2000000u + episode);
    Rng sample_rng = make_rng(seed, 3000000u + episode);
    std::vector<EvRequest> requests = provider ? provider(episode, scen_rng)
                                               : sample_episode(scenario.pattern, sc, scen_rng);
    station.begin_episode(std::move(requests));

    double eps = epsilon_at(cfg, episode);
    double lr = lr_at(cfg, episode);
    double loss_sum = 0.0;
    int loss_count = 0;
    double reward_sum = 0.0;

    std::vector<std::vector<double>> s(n_chargers);
    std::vector<double> actions(n_chargers);
    while (!station.done()) {
      station.admit_arrivals();
      station.connect_set(allocate(station, result.net).connected_handles());

      std::vector<ActionBounds> bounds(n_chargers);
      for (int j = 0; j < n_chargers; ++j) {
        s[j] = station.observe(j);
        bounds[j] = station.feasible_actions(j);
        actions[j] = select_action(result.net, s[j], bounds[j], sc.delta_a, sc.a_max, eps,
                                   act_rng);
      }
      std::vector<double> r_b = station.apply_actions(actions);
      auto [c_p, waiting_penalty] = station.settle_departures();
      std::vector<double> w_share = split_waiting_penalty(waiting_penalty, actions, sc.a_max);
      auto [r_l, l_share] = station.update_peak(actions);
      (void)r_l;
      station.advance();

      bool terminal = station.done();
      for (int j = 0; j < n_chargers; ++j) {
        Transition t;
        t.s = std::move(s[j]);
        t.a = actions[j];
        t.r = r_b[j] - c_p[j] + w_share[j] + l_share[j];
        t.s_next = station.observe(j);
        t.terminal = terminal;
        t.feasible_next = station.feasible_actions(j);
        reward_sum += t.r;
        memory.push(std::move(t));
      }

      if (memory.size() >= static_cast<size_t>(cfg.batch_size)) {
        std::vector<Transition> batch = memory.sample(cfg.batch_size, sample_rng);
        Eigen::MatrixXd X;
        Eigen::VectorXd y;
        build_batch(batch, result.target, cfg, sc, X, y);
        loss_sum += result.net.sgd_step(X, y, lr);
        ++loss_count;
      }
    }

    if ((episode + 1) % cfg.target_sync_episodes == 0) result.target = result.net;

    const Ledger& led = station.ledger();
    if (std::abs(reward_sum - led.profit()) > 1e-6 * std::max(1.0, std::abs(led.profit())))
      throw std::logic_error("per-charger rewards drifted from the episode profit");
    EpisodeMetrics m;
    m.episode = episode;
    m.z = led.profit();
    m.b_c = led.b_charge;
    m.b_d = led.b_discharge;
    m.c_p = led.c_penalty;
    m.c_l = led.c_demand;
    m.loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
    m.epsilon = eps;
    m.lr = lr;
    m.admitted = led.n_admitted;
    m.rejected = led.n_rejected;
    result.metrics.push_back(m);
    if (hooks.on_episode) hooks.on_episode(m);
  }
  return result;
}

}  // namespace evcs
