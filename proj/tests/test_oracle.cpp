#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "evcs/baselines.hpp"
#include "evcs/runner.hpp"

using namespace evcs;

namespace {

Tariff flat_tariff() {
  Tariff t;
  t.periods = {TouPeriod{"flat", 0.0, 24.0}};
  t.p_e = {0.05};
  t.p_l = {0.0};
  t.p_c = 0.15;
  t.p_d = 0.16;
  return t;
}

StationConfig tiny_cfg(double a_span, double delta, double start_hour, int waiting) {
  StationConfig cfg;
  cfg.n_chargers = 1;
  cfg.n_waiting = waiting;
  cfg.a_min = -a_span;
  cfg.a_max = a_span;
  cfg.delta_a = delta;
  cfg.horizon_hours = 2.0;
  cfg.episode_start_hour = start_hour;
  return cfg;
}

}  // namespace

TEST_CASE("the exhaustive optimum prices a clean fill at the margin") {
  // 80 kWh deliverable at 0.10/kWh margin, no demand charge, target reachable
  StationConfig cfg = tiny_cfg(80.0, 20.0, 0.0, 0);
  OracleResult res = oracle_solve({EvRequest{0, 0, 8, 20.0, 100.0}}, cfg, flat_tariff());
  CHECK(res.profit == doctest::Approx(8.0).epsilon(1e-12));
  REQUIRE(res.power.size() == 8);
  double delivered = 0.0;
  for (int t = 0; t < 8; ++t) delivered += res.power[t][0] * cfg.dt_hours;
  CHECK(delivered == doctest::Approx(80.0).epsilon(1e-12));
}

TEST_CASE("with one charger oversubscribed the optimum trades margin against penalties") {
  // two vehicles each need 60 kWh in 4 steps but share one 20 kWh-per-step
  // plug: 80 kWh get delivered, 40 kWh go short, revenue and penalty cancel
  StationConfig cfg = tiny_cfg(80.0, 20.0, 0.0, 1);
  std::vector<EvRequest> requests = {EvRequest{0, 0, 4, 20.0, 80.0},
                                     EvRequest{1, 0, 4, 20.0, 80.0}};
  OracleResult res = oracle_solve(requests, cfg, flat_tariff());
  CHECK(std::abs(res.profit) < 1e-9);
}

TEST_CASE("the optimum arbitrages on-peak discharge against off-peak refill") {
  // start 16:00, four on-peak steps then four off-peak ones; emptying 50 kWh
  // at +0.04 and refilling 87.5 kWh at +0.10 beats sitting still, minus the
  // 100 kW off-peak demand increment scaled by the 2 h episode
  StationConfig cfg = tiny_cfg(100.0, 25.0, 16.0, 0);
  OracleResult res =
      oracle_solve({EvRequest{0, 0, 8, 60.0, 60.0}}, cfg, Tariff::standard_three_period());
  CHECK(res.profit == doctest::Approx(2.0 + 8.75 - 100.0 * 0.5 * (2.0 / 720.0)).epsilon(1e-12));
}

TEST_CASE("the oracle refuses instances beyond its enumeration budget") {
  Tariff flat = flat_tariff();
  StationConfig cfg = tiny_cfg(80.0, 20.0, 0.0, 3);
  std::vector<EvRequest> four = {EvRequest{0, 0, 2, 20.0, 40.0}, EvRequest{1, 0, 2, 20.0, 40.0},
                                 EvRequest{2, 0, 2, 20.0, 40.0}, EvRequest{3, 0, 2, 20.0, 40.0}};
  CHECK_THROWS_AS(oracle_solve(four, cfg, flat), std::invalid_argument);

  StationConfig long_cfg = cfg;
  long_cfg.horizon_hours = 4.0;  // 16 steps
  CHECK_THROWS_AS(oracle_solve({EvRequest{0, 0, 2, 20.0, 40.0}}, long_cfg, flat),
                  std::invalid_argument);

  StationConfig wide_cfg = cfg;
  wide_cfg.n_chargers = 3;
  CHECK_THROWS_AS(oracle_solve({EvRequest{0, 0, 2, 20.0, 40.0}}, wide_cfg, flat),
                  std::invalid_argument);

  StationConfig fine_cfg = cfg;
  fine_cfg.a_min = -100.0;
  fine_cfg.a_max = 100.0;  // 11 grid levels at 20 kW spacing
  CHECK_THROWS_AS(oracle_solve({EvRequest{0, 0, 2, 20.0, 40.0}}, fine_cfg, flat),
                  std::invalid_argument);
}

TEST_CASE("replaying an oracle schedule through the live station reproduces its profit") {
  Tariff tariff = Tariff::standard_three_period();
  std::mt19937 gen(4242);
  std::uniform_int_distribution<int> n_req(1, 3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double starts[] = {0.0, 8.0, 12.0, 16.5};

  for (int trial = 0; trial < 10; ++trial) {
    StationConfig cfg = tiny_cfg(100.0, 25.0, starts[trial % 4], 1);
    int n = n_req(gen);
    std::vector<EvRequest> requests;
    for (int i = 0; i < n; ++i) {
      EvRequest r;
      r.t_a = std::uniform_int_distribution<int>(0, 6)(gen);
      r.t_d = std::uniform_int_distribution<int>(r.t_a + 1, 8)(gen);
      r.e_ini = 15.0 + 75.0 * unif(gen);
      double cap = std::min(cfg.e_max, r.e_ini + cfg.a_max * (r.t_d - r.t_a) * cfg.dt_hours);
      r.e_tgt = r.e_ini + (cap - r.e_ini) * unif(gen);
      requests.push_back(r);
    }
    std::sort(requests.begin(), requests.end(), [](const EvRequest& a, const EvRequest& b) {
      return a.t_a != b.t_a ? a.t_a < b.t_a : a.e_ini < b.e_ini;
    });
    for (int i = 0; i < n; ++i) requests[i].id = i;

    OracleResult res = oracle_solve(requests, cfg, tariff);
    SchedulePolicy policy(res);
    Station st(cfg, tariff);
    EpisodeOutcome out = run_episode(st, requests, policy, 0);
    CHECK(out.ledger.profit() == doctest::Approx(res.profit).epsilon(1e-9));
  }
}

TEST_CASE("oracle schedules serialize one row per step and handle") {
  OracleResult res;
  res.connected = {{0}, {}};
  res.power = {{50.0}, {0.0}};
  std::ostringstream out;
  write_oracle_csv(res, out);
  CHECK(out.str() == "step,handle,connected,a\n0,0,1,50\n1,0,0,0\n");
}
