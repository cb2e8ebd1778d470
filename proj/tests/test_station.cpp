#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "evcs/scenario.hpp"
#include "evcs/station.hpp"

using namespace evcs;

namespace {

StationConfig tiny_station(int chargers, int waiting, double start_hour = 0.0) {
  StationConfig cfg;
  cfg.n_chargers = chargers;
  cfg.n_waiting = waiting;
  cfg.episode_start_hour = start_hour;
  return cfg;
}

EvRequest req(int id, int t_a, int t_d, double e_ini, double e_tgt) {
  return EvRequest{id, t_a, t_d, e_ini, e_tgt};
}

// connect the lowest-id present sessions and run the rest of one step with
// the given actions, returning the per-charger reward total for the step
double run_step(Station& st, const std::vector<double>& actions) {
  st.admit_arrivals();
  std::vector<int> present;
  for (size_t h = 0; h < st.sessions().size(); ++h)
    if (st.sessions()[h].present()) present.push_back(static_cast<int>(h));
  int want = std::min(st.config().n_chargers, static_cast<int>(present.size()));
  present.resize(want);
  st.connect_set(present);
  std::vector<double> reward = st.apply_actions(actions);
  auto [charger_pen, wait_pen] = st.settle_departures();
  std::vector<double> wait_share = split_waiting_penalty(wait_pen, actions, st.config().a_max);
  auto [peak_inc, peak_share] = st.update_peak(actions);
  (void)peak_inc;
  double total = 0.0;
  for (int j = 0; j < st.config().n_chargers; ++j)
    total += reward[j] - charger_pen[j] + wait_share[j] + peak_share[j];
  st.advance();
  return total;
}

}  // namespace

TEST_CASE("feature layout and normalization") {
  StationConfig cfg = tiny_station(10, 5);
  Tariff t = Tariff::standard_three_period();
  CHECK(feature_dim(t) == 11);

  WaitingAggregates w{2, 150.0};
  std::vector<double> f = build_features(cfg, t, true, 48, 16, 55.0, 25.0, w, 400.0);
  REQUIRE(f.size() == 11);
  CHECK(f[0] == doctest::Approx(1.0));
  CHECK(f[1] == doctest::Approx(48.0 / 192.0));
  CHECK(f[2] == doctest::Approx(16.0 / 192.0));
  CHECK(f[3] == doctest::Approx(0.55));
  CHECK(f[4] == doctest::Approx(0.25));
  CHECK(f[5] == doctest::Approx(2.0 / 5.0));
  CHECK(f[6] == doctest::Approx(150.0 / 500.0));
  // step 48 is hour 12, on-peak
  CHECK(f[7] == doctest::Approx(1.0));
  CHECK(f[8] == doctest::Approx(0.0));
  CHECK(f[9] == doctest::Approx(0.0));
  CHECK(f[10] == doctest::Approx(400.0 / 1000.0));

  SUBCASE("vacant chargers zero the vehicle block") {
    std::vector<double> g = build_features(cfg, t, false, 48, 0, 0.0, 0.0, w, 400.0);
    CHECK(g[0] == doctest::Approx(0.0));
    CHECK(g[3] == doctest::Approx(0.0));
    CHECK(g[5] == doctest::Approx(f[5]));
    CHECK(g[10] == doctest::Approx(f[10]));
  }
  SUBCASE("the terminal step keeps the last period's clock") {
    std::vector<double> g = build_features(cfg, t, false, 192, 0, 0.0, 0.0, w, 0.0);
    CHECK(g[1] == doctest::Approx(1.0));
    // step 191 is hour 23.75, off-peak
    CHECK(g[9] == doctest::Approx(1.0));
    CHECK(g[7] + g[8] + g[9] == doctest::Approx(1.0));
  }
}

TEST_CASE("admission fills chargers plus waiting slots and rejects the rest") {
  Station st(tiny_station(2, 1), Tariff::standard_three_period());
  std::vector<EvRequest> rs;
  for (int i = 0; i < 5; ++i) rs.push_back(req(i, 0, 2, 50.0, 50.0));
  rs.push_back(req(5, 2, 4, 50.0, 50.0));
  st.begin_episode(rs);

  st.admit_arrivals();
  CHECK(st.present_count() == 3);
  CHECK(st.ledger().n_admitted == 3);
  CHECK(st.ledger().n_rejected == 2);
  CHECK(st.sessions()[3].status == SessionStatus::Rejected);
  CHECK(st.sessions()[4].status == SessionStatus::Rejected);

  // run to step 2: the three admitted vehicles leave, freeing every slot
  st.connect_set({0, 1});
  st.apply_actions({0.0, 0.0});
  st.settle_departures();
  st.advance();
  run_step(st, {0.0, 0.0});
  CHECK(st.present_count() == 0);

  st.admit_arrivals();
  CHECK(st.ledger().n_admitted == 4);
  CHECK(st.sessions()[5].status == SessionStatus::Waiting);
}

TEST_CASE("feasible power bounds respect battery headroom on the grid") {
  Station st(tiny_station(1, 1), Tariff::standard_three_period());

  SUBCASE("mid window allows the full range") {
    ActionBounds b = st.feasible_for_energy(55.0);
    CHECK(b.lower == doctest::Approx(-100.0));
    CHECK(b.upper == doctest::Approx(100.0));
  }
  SUBCASE("nearly full forbids charging") {
    // headroom 2 kWh caps charging at 8 kW, below the first grid level
    ActionBounds b = st.feasible_for_energy(98.0);
    CHECK(b.lower == doctest::Approx(-100.0));
    CHECK(b.upper == doctest::Approx(0.0));
  }
  SUBCASE("at the floor forbids discharging") {
    ActionBounds b = st.feasible_for_energy(10.0);
    CHECK(b.lower == doctest::Approx(0.0));
    CHECK(b.upper == doctest::Approx(100.0));
  }
  SUBCASE("slightly above the floor still forbids a full grid step down") {
    ActionBounds b = st.feasible_for_energy(12.0);
    CHECK(b.lower == doctest::Approx(0.0));
    CHECK(b.upper == doctest::Approx(100.0));
  }
  SUBCASE("a vacant charger is pinned to zero") {
    st.begin_episode({});
    ActionBounds b = st.feasible_actions(0);
    CHECK(b.lower == doctest::Approx(0.0));
    CHECK(b.upper == doctest::Approx(0.0));
  }
}

TEST_CASE("margins price energy by period and direction") {
  SUBCASE("off-peak charging earns the widest margin") {
    Station st(tiny_station(1, 0, 17.0), Tariff::standard_three_period());
    st.begin_episode({req(0, 0, 8, 50.0, 75.0)});
    st.admit_arrivals();
    st.connect_set({0});
    std::vector<double> r = st.apply_actions({25.0});
    CHECK(r[0] == doctest::Approx(0.10 * 25.0 * 0.25));
    CHECK(st.ledger().b_charge == doctest::Approx(0.625));
    CHECK(st.sessions()[0].e == doctest::Approx(56.25));
  }
  SUBCASE("on-peak discharging earns and on-peak charging loses") {
    Station st(tiny_station(1, 0, 12.0), Tariff::standard_three_period());
    st.begin_episode({req(0, 0, 8, 50.0, 75.0)});
    st.admit_arrivals();
    st.connect_set({0});
    std::vector<double> r = st.apply_actions({-50.0});
    CHECK(r[0] == doctest::Approx(0.04 * 50.0 * 0.25));
    CHECK(st.ledger().b_discharge == doctest::Approx(0.5));
    CHECK(st.sessions()[0].e == doctest::Approx(37.5));

    r = st.apply_actions({25.0});
    CHECK(r[0] == doctest::Approx(-0.05 * 25.0 * 0.25));
  }
  SUBCASE("infeasible requests are refused loudly") {
    Station st(tiny_station(1, 0), Tariff::standard_three_period());
    st.begin_episode({req(0, 0, 8, 95.0, 100.0)});
    st.admit_arrivals();
    st.connect_set({0});
    CHECK_THROWS_AS(st.apply_actions({50.0}), std::logic_error);   // would overfill
    CHECK_THROWS_AS(st.apply_actions({10.0}), std::logic_error);   // off the grid
    CHECK_THROWS_AS(st.apply_actions({0.0, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("departure shortfalls are penalized where the vehicle sits") {
  Station st(tiny_station(1, 1), Tariff::standard_three_period());
  // id 0 charges, id 1 waits; both leave after the first step
  st.begin_episode({req(0, 0, 1, 50.0, 70.0), req(1, 0, 1, 30.0, 55.0)});
  st.admit_arrivals();
  st.connect_set({0});
  st.apply_actions({25.0});  // id 0 reaches 56.25
  auto [charger_pen, wait_pen] = st.settle_departures();
  CHECK(charger_pen[0] == doctest::Approx(0.2 * (70.0 - 56.25)));
  CHECK(wait_pen == doctest::Approx(0.2 * (55.0 - 30.0)));
  CHECK(st.ledger().c_penalty == doctest::Approx(2.75 + 5.0));
  CHECK(st.sessions()[0].status == SessionStatus::Departed);
  CHECK(st.sessions()[1].status == SessionStatus::Departed);
  CHECK(st.session_at(0) == -1);

  SUBCASE("meeting the target costs nothing") {
    st.begin_episode({req(0, 0, 1, 50.0, 55.0)});
    st.admit_arrivals();
    st.connect_set({0});
    st.apply_actions({25.0});  // reaches 56.25 > 55
    auto [pen2, wait2] = st.settle_departures();
    CHECK(pen2[0] == doctest::Approx(0.0));
    CHECK(wait2 == doctest::Approx(0.0));
  }
}

TEST_CASE("waiting penalties are split by idle charger capacity") {
  std::vector<double> s = split_waiting_penalty(6.0, {100.0, 25.0}, 100.0);
  CHECK(s[0] == doctest::Approx(0.0));
  CHECK(s[1] == doctest::Approx(-6.0));

  s = split_waiting_penalty(4.0, {100.0, 100.0}, 100.0);  // no idle capacity
  CHECK(s[0] == doctest::Approx(-2.0));
  CHECK(s[1] == doctest::Approx(-2.0));

  s = split_waiting_penalty(0.0, {0.0, 50.0}, 100.0);
  CHECK(s[0] == doctest::Approx(0.0));
  CHECK(s[1] == doctest::Approx(0.0));

  s = split_waiting_penalty(9.0, {-50.0, 50.0}, 100.0);  // discharge idles more
  CHECK(s[0] == doctest::Approx(-9.0 * 150.0 / 200.0));
  CHECK(s[1] == doctest::Approx(-9.0 * 50.0 / 200.0));
}

TEST_CASE("demand charge accrues only when a period peak rises") {
  Station st(tiny_station(2, 0, 12.0), Tariff::standard_three_period());
  st.begin_episode({});
  // billing scale 48 h / 720 h, on-peak p_l = 2.0
  auto [inc1, share1] = st.update_peak({30.0, 10.0});
  CHECK(inc1 == doctest::Approx(-(48.0 / 720.0) * 2.0 * 40.0));
  CHECK(share1[0] == doctest::Approx(inc1 * 30.0 / 40.0));
  CHECK(share1[1] == doctest::Approx(inc1 * 10.0 / 40.0));

  auto [inc2, share2] = st.update_peak({40.0, 20.0});
  CHECK(inc2 == doctest::Approx(-(48.0 / 720.0) * 2.0 * 20.0));
  CHECK(share2[0] == doctest::Approx(inc2 * 40.0 / 60.0));
  CHECK(share2[1] == doctest::Approx(inc2 * 20.0 / 60.0));

  auto [inc3, share3] = st.update_peak({10.0, 10.0});  // under the peak
  CHECK(inc3 == doctest::Approx(0.0));
  CHECK(share3[0] == doctest::Approx(0.0));

  auto [inc4, share4] = st.update_peak({-30.0, 10.0});  // net export
  CHECK(inc4 == doctest::Approx(0.0));
  CHECK(share4[1] == doctest::Approx(0.0));

  CHECK(st.peaks()[0] == doctest::Approx(60.0));
  CHECK(st.ledger().c_demand == doctest::Approx(8.0));
  CHECK(st.demand_charge_from_peaks() == doctest::Approx(8.0));
}

TEST_CASE("allocation handles are validated") {
  Station st(tiny_station(2, 1), Tariff::standard_three_period());
  st.begin_episode({req(0, 0, 8, 50.0, 60.0), req(1, 0, 8, 50.0, 60.0),
                    req(2, 0, 8, 50.0, 60.0)});
  st.admit_arrivals();
  CHECK_THROWS_AS(st.connect_set({0}), std::logic_error);        // too few
  CHECK_THROWS_AS(st.connect_set({0, 0}), std::logic_error);     // duplicate
  CHECK_THROWS_AS(st.connect_set({0, 7}), std::logic_error);     // out of range
  st.connect_set({0, 1});
  CHECK(st.session_at(0) == 0);
  CHECK(st.session_at(1) == 1);

  // swapping keeps the incumbent's plug and refills the freed one
  st.connect_set({1, 2});
  CHECK(st.session_at(1) == 1);
  CHECK(st.session_at(0) == 2);
  CHECK(st.sessions()[0].status == SessionStatus::Waiting);
  CHECK_THROWS_AS(st.connect_set({0, 5}), std::logic_error);     // 5 never arrived
}

TEST_CASE("observations track the connected vehicle and the waiting area") {
  Station st(tiny_station(2, 1, 0.0), Tariff::standard_three_period());
  st.begin_episode({req(0, 0, 8, 40.0, 80.0), req(1, 0, 8, 20.0, 60.0),
                    req(2, 0, 8, 30.0, 50.0)});
  st.admit_arrivals();
  st.connect_set({0, 1});

  std::vector<double> f = st.observe(0);
  CHECK(f[0] == doctest::Approx(1.0));
  CHECK(f[2] == doctest::Approx(8.0 / 192.0));
  CHECK(f[3] == doctest::Approx(0.40));
  CHECK(f[4] == doctest::Approx(0.40));
  CHECK(f[5] == doctest::Approx(1.0));        // one waiting vehicle in one slot
  CHECK(f[6] == doctest::Approx(20.0 / 100.0));
  CHECK(f[9] == doctest::Approx(1.0));        // midnight start is off-peak

  WaitingAggregates w = st.waiting_now();
  CHECK(w.n_wait == 1);
  CHECK(w.e_r_wait == doctest::Approx(20.0));
  CHECK(st.prev_wait().n_wait == 0);  // snapshot moves only on advance
  st.advance();
  CHECK(st.prev_wait().n_wait == 1);
}

TEST_CASE("stepping the station with random feasible actions keeps the books") {
  StationConfig cfg = tiny_station(3, 2);
  Tariff tariff = Tariff::standard_three_period();
  ArrivalPattern pattern = ArrivalPattern::builtin("office");
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Rng scen = make_rng(seed, 21);
    Rng act = make_rng(seed, 22);
    Station st(cfg, tariff);
    st.begin_episode(sample_episode(pattern, cfg, scen));

    double reward_total = 0.0;
    while (!st.done()) {
      st.admit_arrivals();
      std::vector<int> present;
      for (size_t h = 0; h < st.sessions().size(); ++h)
        if (st.sessions()[h].present()) present.push_back(static_cast<int>(h));
      int want = std::min(cfg.n_chargers, static_cast<int>(present.size()));
      present.resize(want);
      st.connect_set(present);

      std::vector<double> actions(cfg.n_chargers, 0.0);
      for (int j = 0; j < cfg.n_chargers; ++j) {
        ActionBounds b = st.feasible_actions(j);
        int n = b.count(cfg.delta_a);
        actions[j] = b.at(std::uniform_int_distribution<int>(0, n - 1)(act), cfg.delta_a);
      }
      std::vector<double> reward = st.apply_actions(actions);
      auto [charger_pen, wait_pen] = st.settle_departures();
      std::vector<double> wait_share = split_waiting_penalty(wait_pen, actions, cfg.a_max);
      auto [peak_inc, peak_share] = st.update_peak(actions);
      double inc_check = 0.0;
      for (int j = 0; j < cfg.n_chargers; ++j) {
        reward_total += reward[j] - charger_pen[j] + wait_share[j] + peak_share[j];
        inc_check += peak_share[j];
      }
      CHECK(inc_check == doctest::Approx(peak_inc).epsilon(1e-9));
      st.advance();
    }

    // every admitted vehicle is settled and rewards telescope to the profit
    for (const auto& s : st.sessions())
      CHECK((s.status == SessionStatus::Departed || s.status == SessionStatus::Rejected));
    CHECK(st.ledger().c_demand == doctest::Approx(st.demand_charge_from_peaks()).epsilon(1e-9));
    CHECK(reward_total == doctest::Approx(st.ledger().profit()).epsilon(1e-9));
  }
}
