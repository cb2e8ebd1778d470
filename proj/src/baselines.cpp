#include "evcs/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evcs/allocator.hpp"

namespace evcs {

PeriodRoles PeriodRoles::classify(const Tariff& tariff) {
  PeriodRoles roles;
  for (int h = 0; h < tariff.n_periods(); ++h) {
    const std::string& label = tariff.periods[h].label;
    if (label == "on-peak") roles.on_peak = h;
    if (label == "mid-peak") roles.mid_peak = h;
    if (label == "off-peak") roles.off_peak = h;
  }
  if (roles.on_peak >= 0 && roles.off_peak >= 0) return roles;
  // fallback by price structure
  roles.on_peak = 0;
  roles.off_peak = 0;
  for (int h = 1; h < tariff.n_periods(); ++h) {
    if (tariff.p_l[h] > tariff.p_l[roles.on_peak]) roles.on_peak = h;
    if (tariff.p_e[h] < tariff.p_e[roles.off_peak]) roles.off_peak = h;
  }
  return roles;
}

std::vector<int> grd_allocate(const Station& station) {
  const auto& sessions = station.sessions();
  std::vector<int> present;
  for (int h = 0; h < static_cast<int>(sessions.size()); ++h)
    if (sessions[h].present()) present.push_back(h);

  double dt = station.config().dt_hours;
  auto urgency = [&](int h) {
    const EvSession& s = sessions[h];
    int t_r = std::max(1, s.request.t_d - station.step());
    return std::max(0.0, s.request.e_tgt - s.e) / (t_r * dt);
  };
  std::sort(present.begin(), present.end(), [&](int a, int b) {
    double ua = urgency(a), ub = urgency(b);
    if (ua != ub) return ua > ub;
    if (sessions[a].request.t_d != sessions[b].request.t_d)
      return sessions[a].request.t_d < sessions[b].request.t_d;
    return sessions[a].request.id < sessions[b].request.id;
  });
  int take = std::min<int>(station.config().n_chargers, static_cast<int>(present.size()));
  present.resize(take);
  return present;
}

std::vector<double> grd_act(const Station& station, bool allow_discharge) {
  const StationConfig& cfg = station.config();
  double dt = cfg.dt_hours;
  PeriodRoles roles = PeriodRoles::classify(station.tariff());
  int period = station.current_period();

  std::vector<double> actions(cfg.n_chargers, 0.0);
  for (int j = 0; j < cfg.n_chargers; ++j) {
    int h = station.session_at(j);
    if (h < 0) continue;
    const EvSession& s = station.sessions()[h];
    ActionBounds bounds = station.feasible_actions(j);
    int t_r = std::max(1, s.request.t_d - station.step());

    // lowest energy after this step from which a_max still reaches the target
    double jit_e = s.request.e_tgt - cfg.a_max * dt * (t_r - 1);
    double floor_e = s.e >= s.request.e_tgt ? s.request.e_tgt : jit_e;
    double a_floor = (floor_e - s.e) / dt;
    double jit_charge =
        std::min(bounds.upper, std::max(bounds.lower, snap_up(std::max(0.0, a_floor), cfg.delta_a)));

    if (period == roles.off_peak) {
      actions[j] = bounds.upper;
    } else if (period == roles.on_peak && allow_discharge) {
      actions[j] =
          std::min(bounds.upper, snap_up(std::max(a_floor, bounds.lower), cfg.delta_a));
    } else {
      actions[j] = jit_charge;  // mid-peak, and on-peak without VGI
    }
  }
  return actions;
}

std::vector<int> CadePolicy::choose_connected(Station& station) {
  return allocate(station, net_).connected_handles();
}

std::vector<double> CadePolicy::choose_actions(Station& station) {
  const StationConfig& cfg = station.config();
  std::vector<std::vector<double>> features(cfg.n_chargers);
  std::vector<ActionBounds> bounds(cfg.n_chargers);
  for (int j = 0; j < cfg.n_chargers; ++j) {
    features[j] = station.observe(j);
    bounds[j] = station.feasible_actions(j);
  }
  std::vector<ArgmaxResult> best = q_argmax(net_, features, bounds, cfg.delta_a, cfg.a_max);
  std::vector<double> actions(cfg.n_chargers);
  for (int j = 0; j < cfg.n_chargers; ++j) actions[j] = best[j].action;
  return actions;
}

MpcPolicy::MpcPolicy(double horizon_hours, bool ideal, ArrivalPattern pattern)
    : horizon_hours_(horizon_hours), ideal_(ideal), pattern_(std::move(pattern)) {
  if (horizon_hours <= 0) throw std::invalid_argument("prediction horizon must be positive");
}

std::string MpcPolicy::name() const {
  std::string h = std::to_string(static_cast<int>(std::lround(horizon_hours_)));
  return (ideal_ ? "mpc-ideal-" : "mpc-") + h + "h";
}

void MpcPolicy::begin_episode(const Station& station, const std::vector<EvRequest>& requests,
                              uint64_t seed) {
  (void)station;
  truth_ = requests;
  predict_rng_ = make_rng(seed, 0x6d7063);
  fallbacks_ = 0;
}

std::vector<double> MpcPolicy::choose_actions(Station& station) {
  const StationConfig& cfg = station.config();
  int steps = std::max(1, static_cast<int>(std::llround(horizon_hours_ / cfg.dt_hours)));
  int t0 = station.step();

  std::vector<EvRequest> predicted;
  if (ideal_) {
    for (const EvRequest& r : truth_)
      if (r.t_a > t0) predicted.push_back(r);
  } else {
    int synthetic_id = 1000000;
    for (int t = t0 + 1; t < std::min(t0 + steps, station.total_steps()); ++t) {
      auto batch = sample_step_arrivals(pattern_, cfg, t, synthetic_id, predict_rng_);
      synthetic_id += static_cast<int>(batch.size());
      predicted.insert(predicted.end(), batch.begin(), batch.end());
    }
  }

  HorizonInstance inst = build_instance(station, steps, predicted);
  HorizonSolution sol = solve_instance(inst);
  if (!sol.ok) {
    ++fallbacks_;
    return grd_act(station, true);
  }

  std::vector<double> actions(cfg.n_chargers, 0.0);
  for (size_t w = 0; w < inst.evs.size(); ++w) {
    int handle = inst.evs[w].handle;
    if (handle < 0 || !inst.connected[w][0]) continue;
    int j = station.sessions()[handle].charger;
    if (j < 0) continue;  // LP connected it, executed allocation did not
    double a = std::round(sol.power[w][0] / cfg.delta_a) * cfg.delta_a;
    ActionBounds bounds = station.feasible_actions(j);
    actions[j] = std::clamp(a, bounds.lower, bounds.upper);
  }
  return actions;
}

std::vector<int> SchedulePolicy::choose_connected(Station& station) {
  int t = station.step();
  if (t < 0 || t >= static_cast<int>(schedule_.connected.size()))
    throw std::logic_error("schedule does not cover this step");
  return schedule_.connected[t];
}

std::vector<double> SchedulePolicy::choose_actions(Station& station) {
  int t = station.step();
  const std::vector<double>& by_handle = schedule_.power[t];
  std::vector<double> actions(station.config().n_chargers, 0.0);
  for (int j = 0; j < station.config().n_chargers; ++j) {
    int h = station.session_at(j);
    if (h >= 0 && h < static_cast<int>(by_handle.size())) actions[j] = by_handle[h];
  }
  return actions;
}

}  // namespace evcs
