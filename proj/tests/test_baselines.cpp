#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "evcs/baselines.hpp"
#include "evcs/runner.hpp"

using namespace evcs;

namespace {

StationConfig one_charger(double start_hour) {
  StationConfig cfg;
  cfg.n_chargers = 1;
  cfg.n_waiting = 1;
  cfg.episode_start_hour = start_hour;
  return cfg;
}

Station with_vehicle(const StationConfig& cfg, double e_ini, double e_tgt, int t_d) {
  Station st(cfg, Tariff::standard_three_period());
  st.begin_episode({EvRequest{0, 0, t_d, e_ini, e_tgt}});
  st.admit_arrivals();
  st.connect_set({0});
  return st;
}

// run one full step at the given charger powers, leaving the session connected
void step_with(Station& st, const std::vector<double>& actions) {
  st.apply_actions(actions);
  st.settle_departures();
  st.update_peak(actions);
  st.advance();
  st.admit_arrivals();
}

}  // namespace

TEST_CASE("period roles come from the labels, or from the prices") {
  PeriodRoles r = PeriodRoles::classify(Tariff::standard_three_period());
  CHECK(r.on_peak == 0);
  CHECK(r.mid_peak == 1);
  CHECK(r.off_peak == 2);

  Tariff flat;
  flat.periods = {TouPeriod{"day", 6.0, 18.0}, TouPeriod{"night", 18.0, 6.0}};
  flat.p_e = {0.30, 0.08};
  flat.p_l = {1.5, 0.2};
  flat.p_c = 0.15;
  flat.p_d = 0.16;
  PeriodRoles f = PeriodRoles::classify(flat);
  CHECK(f.on_peak == 0);   // highest demand charge
  CHECK(f.off_peak == 1);  // cheapest energy
}

TEST_CASE("the urgency rule connects whoever is closest to missing its target") {
  StationConfig cfg = one_charger(0.0);
  Station st(cfg, Tariff::standard_three_period());
  st.begin_episode({EvRequest{0, 0, 8, 50.0, 60.0},    // 10 kWh over 2 h
                    EvRequest{1, 0, 4, 30.0, 70.0}});  // 40 kWh over 1 h
  st.admit_arrivals();
  CHECK(grd_allocate(st) == std::vector<int>{1});

  SUBCASE("zero-need ties fall to the earlier departure") {
    st.begin_episode({EvRequest{0, 0, 8, 60.0, 60.0}, EvRequest{1, 0, 4, 60.0, 60.0}});
    st.admit_arrivals();
    CHECK(grd_allocate(st) == std::vector<int>{1});
  }
  SUBCASE("then to the lower id") {
    st.begin_episode({EvRequest{0, 0, 8, 60.0, 60.0}, EvRequest{1, 0, 8, 60.0, 60.0}});
    st.admit_arrivals();
    CHECK(grd_allocate(st) == std::vector<int>{0});
  }
}

TEST_CASE("rule-based dispatch by period") {
  SUBCASE("off-peak charges flat out") {
    Station st = with_vehicle(one_charger(17.0), 50.0, 60.0, 8);
    CHECK(grd_act(st, true) == std::vector<double>{100.0});

    Station full = with_vehicle(one_charger(17.0), 95.0, 100.0, 8);
    CHECK(grd_act(full, true) == std::vector<double>{0.0});  // 20 kW headroom is off grid
  }
  SUBCASE("mid-peak charges just in time") {
    Station relaxed = with_vehicle(one_charger(8.0), 50.0, 70.0, 2);
    CHECK(grd_act(relaxed, true) == std::vector<double>{0.0});  // next step still makes it

    Station urgent = with_vehicle(one_charger(8.0), 50.0, 70.0, 1);
    CHECK(grd_act(urgent, true) == std::vector<double>{100.0});  // last chance

    // overfilled past its target by the previous step: stays put
    Station done = with_vehicle(one_charger(8.0), 45.0, 60.0, 9);
    step_with(done, {100.0});
    CHECK(grd_act(done, true) == std::vector<double>{0.0});  // never discharges here
  }
  SUBCASE("on-peak discharges down to what the target still allows") {
    Station above = with_vehicle(one_charger(12.0), 55.0, 60.0, 9);
    step_with(above, {100.0});  // now at 80 kWh, 20 above target, 8 steps left
    // -80 kW would graze the target floor; the grid rounds toward zero
    CHECK(grd_act(above, true) == std::vector<double>{-75.0});
    CHECK(grd_act(above, false) == std::vector<double>{0.0});

    Station below = with_vehicle(one_charger(12.0), 50.0, 70.0, 8);
    CHECK(grd_act(below, true) == std::vector<double>{-100.0});  // 7 steps left to recover
    CHECK(grd_act(below, false) == std::vector<double>{0.0});

    Station cornered = with_vehicle(one_charger(12.0), 50.0, 70.0, 1);
    CHECK(grd_act(cornered, true) == std::vector<double>{100.0});  // must charge even on-peak
  }
  SUBCASE("vacant chargers stay at zero") {
    Station st(one_charger(17.0), Tariff::standard_three_period());
    st.begin_episode({});
    st.admit_arrivals();
    CHECK(grd_act(st, true) == std::vector<double>{0.0});
  }
}

TEST_CASE("dispatch beats doing nothing over whole episodes") {
  StationConfig cfg;
  cfg.n_chargers = 3;
  cfg.n_waiting = 2;
  ArrivalPattern pattern = ArrivalPattern::builtin("office");
  Tariff tariff = Tariff::standard_three_period();

  double z_grd = 0.0, z_null = 0.0, cp_grd = 0.0, cp_null = 0.0;
  const int episodes = 20;
  for (int k = 0; k < episodes; ++k) {
    Rng rng = make_rng(400 + k, 3);
    std::vector<EvRequest> requests = sample_episode(pattern, cfg, rng);

    Station st(cfg, tariff);
    GrdPolicy grd(true);
    EpisodeOutcome a = run_episode(st, requests, grd, k);
    z_grd += a.ledger.profit();
    cp_grd += a.ledger.c_penalty;

    Station st2(cfg, tariff);
    NullPolicy idle;
    EpisodeOutcome b = run_episode(st2, requests, idle, k);
    z_null += b.ledger.profit();
    cp_null += b.ledger.c_penalty;

    CHECK(b.ledger.b_charge == doctest::Approx(0.0));
    CHECK(b.ledger.c_demand == doctest::Approx(0.0));
  }
  CHECK(z_grd / episodes > z_null / episodes);
  CHECK(cp_grd <= cp_null + 1e-9);
}

TEST_CASE("rolling-horizon control names itself and validates its window") {
  ArrivalPattern office = ArrivalPattern::builtin("office");
  CHECK(MpcPolicy(1.0, false, office).name() == "mpc-1h");
  CHECK(MpcPolicy(2.0, true, office).name() == "mpc-ideal-2h");
  CHECK_THROWS_AS(MpcPolicy(0.0, false, office), std::invalid_argument);
  CHECK_THROWS_AS(MpcPolicy(-1.0, true, office), std::invalid_argument);
}

TEST_CASE("a clairvoyant window spreads the charge to flatten the peak") {
  // one vehicle, on-peak window: charging there loses 0.05/kWh, but the
  // 0.2/kWh shortfall penalty still forces the full 50 kWh, and a flat 25 kW
  // is the only way to deliver it at the minimum priced peak
  StationConfig cfg = one_charger(12.0);
  std::vector<EvRequest> requests = {EvRequest{0, 0, 8, 10.0, 60.0}};
  Station st(cfg, Tariff::standard_three_period());
  st.begin_episode(requests);

  MpcPolicy mpc(2.0, true, ArrivalPattern::builtin("office"));
  mpc.begin_episode(st, requests, 7);
  st.admit_arrivals();
  std::vector<int> conn = mpc.choose_connected(st);
  CHECK(conn == std::vector<int>{0});
  st.connect_set(conn);
  std::vector<double> actions = mpc.choose_actions(st);
  REQUIRE(actions.size() == 1);
  CHECK(actions[0] == doctest::Approx(25.0));
  CHECK(mpc.fallbacks() == 0);
}

TEST_CASE("sampled-forecast control runs whole episodes without fallbacks") {
  StationConfig cfg;
  cfg.n_chargers = 3;
  cfg.n_waiting = 2;
  ArrivalPattern pattern = ArrivalPattern::builtin("office");
  Rng rng = make_rng(77, 3);
  std::vector<EvRequest> requests = sample_episode(pattern, cfg, rng);

  Station st(cfg, Tariff::standard_three_period());
  MpcPolicy mpc(1.0, false, pattern);
  EpisodeOutcome out = run_episode(st, requests, mpc, 9);
  CHECK(std::isfinite(out.ledger.profit()));
  CHECK(mpc.fallbacks() == 0);
  CHECK(out.ledger.n_admitted + out.ledger.n_rejected == static_cast<int>(requests.size()));
}
