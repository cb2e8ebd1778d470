#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "evcs/trainer.hpp"

using namespace evcs;

namespace {

ScenarioSpec desk_scenario() {
  ScenarioSpec s;
  s.tariff = Tariff::standard_three_period();
  s.pattern = ArrivalPattern::builtin("office");
  s.station.n_chargers = 2;
  s.station.n_waiting = 1;
  s.station.horizon_hours = 6.0;
  s.station.episode_start_hour = 7.0;
  return s;
}

TrainConfig quick_train(int episodes) {
  TrainConfig t;
  t.episodes = episodes;
  t.hidden = {16, 8};
  t.batch_size = 8;
  t.replay_capacity = 4096;
  t.target_sync_episodes = 2;
  return t;
}

}  // namespace

TEST_CASE("training hyperparameters are validated") {
  TrainConfig t;
  t.gamma = 1.5;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = TrainConfig{};
  t.lr_initial = 0.0;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = TrainConfig{};
  t.replay_capacity = 8;
  t.batch_size = 64;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = TrainConfig{};
  t.epsilon_min = 0.5;
  t.epsilon_initial = 0.2;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = TrainConfig{};
  t.epsilon_decay_fraction = 0.0;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = TrainConfig{};
  t.hidden = {64, 0};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  CHECK_NOTHROW(TrainConfig{}.validate());
}

TEST_CASE("exploration anneals linearly over the first eight tenths of the run") {
  TrainConfig t;
  t.episodes = 2000;
  CHECK(epsilon_at(t, 0) == doctest::Approx(1.0));
  CHECK(epsilon_at(t, 800) == doctest::Approx(0.525));
  CHECK(epsilon_at(t, 1600) == doctest::Approx(0.05));
  CHECK(epsilon_at(t, 2000) == doctest::Approx(0.05));
  for (int e = 0; e < 1600; ++e) CHECK(epsilon_at(t, e) > epsilon_at(t, e + 1));
}

TEST_CASE("the learning rate halves on a fixed episode grid") {
  TrainConfig t;
  CHECK(lr_at(t, 0) == doctest::Approx(0.01));
  CHECK(lr_at(t, 199) == doctest::Approx(0.01));
  CHECK(lr_at(t, 200) == doctest::Approx(0.005));
  CHECK(lr_at(t, 400) == doctest::Approx(0.0025));
  CHECK(lr_at(t, 401) == doctest::Approx(0.0025));
}

TEST_CASE("epsilon-greedy selection spans the feasible grid and collapses to the argmax") {
  Tariff tariff = Tariff::standard_three_period();
  QNet net = QNet::init_random({feature_dim(tariff) + 1, 12, 1}, 99);
  std::vector<double> features(feature_dim(tariff), 0.25);
  ActionBounds bounds{-50.0, 50.0};

  Rng rng = make_rng(5, 4);
  double greedy = select_action(net, features, bounds, 25.0, 100.0, 0.0, rng);
  ArgmaxResult best = q_argmax_one(net, features, bounds, 25.0, 100.0);
  CHECK(greedy == best.action);

  std::set<double> seen;
  for (int i = 0; i < 200; ++i)
    seen.insert(select_action(net, features, bounds, 25.0, 100.0, 1.0, rng));
  CHECK(seen == std::set<double>{-50.0, -25.0, 0.0, 25.0, 50.0});
}

TEST_CASE("two identical training runs agree to the last bit") {
  ScenarioSpec spec = desk_scenario();
  TrainConfig t = quick_train(3);
  TrainResult a = train(spec, t, 31);
  TrainResult b = train(spec, t, 31);
  REQUIRE(a.metrics.size() == 3);
  CHECK(a.net.equal(b.net));
  CHECK(a.target.equal(b.target));
  for (size_t e = 0; e < 3; ++e) {
    CHECK(a.metrics[e].z == b.metrics[e].z);
    CHECK(a.metrics[e].loss == b.metrics[e].loss);
  }
  TrainResult c = train(spec, t, 32);
  CHECK_FALSE(a.net.equal(c.net));
}

TEST_CASE("episode metrics reconcile with the profit identity") {
  ScenarioSpec spec = desk_scenario();
  TrainConfig t = quick_train(2);
  std::vector<EpisodeMetrics> streamed;
  TrainHooks hooks;
  hooks.on_episode = [&](const EpisodeMetrics& m) { streamed.push_back(m); };
  TrainResult r = train(spec, t, 7, hooks);
  REQUIRE(r.metrics.size() == 2);
  REQUIRE(streamed.size() == 2);
  for (int e = 0; e < 2; ++e) {
    const EpisodeMetrics& m = r.metrics[e];
    CHECK(m.episode == e);
    CHECK(m.z == doctest::Approx(m.b_c + m.b_d - m.c_p - m.c_l).epsilon(1e-9));
    CHECK(m.epsilon == doctest::Approx(epsilon_at(t, e)));
    CHECK(m.lr == doctest::Approx(lr_at(t, e)));
    CHECK(m.admitted >= 0);
    CHECK(streamed[e].z == m.z);
    CHECK(std::isfinite(m.loss));
  }
}

TEST_CASE("the target network refreshes every K episodes") {
  ScenarioSpec spec = desk_scenario();
  TrainConfig t = quick_train(2);
  t.target_sync_episodes = 2;
  TrainResult synced = train(spec, t, 11);
  CHECK(synced.net.equal(synced.target));

  t = quick_train(1);
  t.target_sync_episodes = 25;
  TrainResult stale = train(spec, t, 11);
  CHECK_FALSE(stale.net.equal(stale.target));
}

TEST_CASE("a resumed run continues the schedules at the absolute episode index") {
  ScenarioSpec spec = desk_scenario();
  TrainConfig t = quick_train(4);
  t.lr_halving_episodes = 2;
  t.epsilon_decay_fraction = 0.75;  // anneal ends at episode 3

  TrainResult head = train(spec, t, 55);

  TrainResult tail = train(spec, t, 55, {}, 2, &head.net, &head.target);
  REQUIRE(tail.metrics.size() == 2);
  CHECK(tail.metrics[0].episode == 2);
  CHECK(tail.metrics[1].episode == 3);
  CHECK(tail.metrics[0].epsilon == doctest::Approx(epsilon_at(t, 2)));
  CHECK(tail.metrics[0].lr == doctest::Approx(lr_at(t, 2)));
  CHECK(tail.metrics[1].lr == doctest::Approx(lr_at(t, 3)));

  QNet wrong = QNet::init_random({3, 2, 1}, 0);
  CHECK_THROWS_AS(train(spec, t, 55, {}, 2, &wrong, &wrong), std::invalid_argument);
}

TEST_CASE("a request provider is keyed by the absolute episode index") {
  ScenarioSpec spec = desk_scenario();
  TrainConfig t = quick_train(3);
  std::vector<int> seen;
  RequestProvider provider = [&](int episode, Rng& rng) {
    seen.push_back(episode);
    return sample_episode(spec.pattern, spec.station, rng);
  };
  TrainResult head = train(spec, t, 13, {}, 0, nullptr, nullptr, provider);
  CHECK(seen == std::vector<int>{0, 1, 2});

  seen.clear();
  t.episodes = 5;
  train(spec, t, 13, {}, 3, &head.net, &head.target, provider);
  CHECK(seen == std::vector<int>{3, 4});
}
