#include "evcs/station.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <set>
#include <stdexcept>

namespace evcs {

int feature_dim(const Tariff& tariff) { return 8 + tariff.n_periods(); }

std::vector<double> build_features(const StationConfig& cfg, const Tariff& tariff, bool occupied,
                                   int step, int steps_remaining, double e, double e_r,
                                   const WaitingAggregates& wait, double current_peak) {
  int steps = cfg.total_steps();
  std::vector<double> f(feature_dim(tariff), 0.0);
  f[0] = occupied ? 1.0 : 0.0;
  f[1] = static_cast<double>(step) / steps;
  f[2] = static_cast<double>(steps_remaining) / steps;
  f[3] = e / cfg.e_max;
  f[4] = e_r / cfg.e_max;
  int wait_cap = std::max(1, cfg.n_waiting);
  f[5] = static_cast<double>(wait.n_wait) / wait_cap;
  f[6] = wait.e_r_wait / (wait_cap * cfg.e_max);
  // the terminal observation keeps the final step's TOU period
  int clock = std::min(step, steps - 1);
  f[7 + tariff.period_of_hour(cfg.hour_of_step(clock))] = 1.0;
  f[7 + tariff.n_periods()] = current_peak / (cfg.n_chargers * cfg.a_max);
  return f;
}

Station::Station(StationConfig cfg, Tariff tariff)
    : cfg_(std::move(cfg)), tariff_(std::move(tariff)) {
  cfg_.validate();
  tariff_.validate();
  total_steps_ = cfg_.total_steps();
  charger_session_.assign(cfg_.n_chargers, -1);
  peaks_.assign(tariff_.n_periods(), 0.0);
}

void Station::begin_episode(std::vector<EvRequest> requests) {
  std::sort(requests.begin(), requests.end(), [](const EvRequest& a, const EvRequest& b) {
    return a.t_a != b.t_a ? a.t_a < b.t_a : a.id < b.id;
  });
  validate_requests(requests, cfg_);
  std::set<int> ids;
  for (const auto& r : requests)
    if (!ids.insert(r.id).second) throw std::invalid_argument("duplicate request id");

  sessions_.clear();
  for (const auto& r : requests) sessions_.push_back(EvSession{r, r.e_ini});
  charger_session_.assign(cfg_.n_chargers, -1);
  peaks_.assign(tariff_.n_periods(), 0.0);
  prev_wait_ = {};
  ledger_ = {};
  step_ = 0;
  next_arrival_ = 0;
}

int Station::present_count() const {
  int n = 0;
  for (const auto& s : sessions_) n += s.present() ? 1 : 0;
  return n;
}

void Station::admit_arrivals() {
  int present = present_count();
  while (next_arrival_ < sessions_.size() && sessions_[next_arrival_].request.t_a == step_) {
    EvSession& s = sessions_[next_arrival_];
    if (present < cfg_.n_slots()) {
      s.status = SessionStatus::Waiting;
      ++present;
      ++ledger_.n_admitted;
    } else {
      s.status = SessionStatus::Rejected;
      ++ledger_.n_rejected;
    }
    ++next_arrival_;
  }
}

void Station::connect_set(const std::vector<int>& connected) {
  int present = present_count();
  int want = std::min(cfg_.n_chargers, present);
  if (static_cast<int>(connected.size()) != want)
    throw std::logic_error("allocation must connect exactly min(n_chargers, present) sessions");
  std::set<int> chosen(connected.begin(), connected.end());
  if (static_cast<int>(chosen.size()) != want)
    throw std::logic_error("allocation contains duplicate sessions");
  for (int h : chosen) {
    if (h < 0 || h >= static_cast<int>(sessions_.size()) || !sessions_[h].present())
      throw std::logic_error("allocation names a session that is not present");
  }

  // keep incumbents, send the rest back to the waiting area
  for (int j = 0; j < cfg_.n_chargers; ++j) {
    int h = charger_session_[j];
    if (h >= 0 && !chosen.count(h)) {
      sessions_[h].status = SessionStatus::Waiting;
      sessions_[h].charger = -1;
      charger_session_[j] = -1;
    }
  }
  // fill freed chargers in ascending vehicle-id order
  std::vector<int> newcomers;
  for (int h : chosen)
    if (sessions_[h].status != SessionStatus::Charging) newcomers.push_back(h);
  std::sort(newcomers.begin(), newcomers.end(), [&](int a, int b) {
    return sessions_[a].request.id < sessions_[b].request.id;
  });
  for (int h : newcomers) {
    int j = 0;
    while (j < cfg_.n_chargers && charger_session_[j] != -1) ++j;
    assert(j < cfg_.n_chargers);
    charger_session_[j] = h;
    sessions_[h].status = SessionStatus::Charging;
    sessions_[h].charger = j;
  }
  if (present - want > cfg_.n_waiting)
    throw std::logic_error("waiting area overflow after allocation");
}

ActionBounds Station::feasible_for_energy(double e) const {
  double up = std::min(cfg_.a_max, (cfg_.e_max - e) / cfg_.dt_hours);
  double lo = std::max(cfg_.a_min, (cfg_.e_min - e) / cfg_.dt_hours);
  ActionBounds b;
  b.upper = std::max(0.0, snap_down(up, cfg_.delta_a));
  b.lower = std::min(0.0, snap_up(lo, cfg_.delta_a));
  return b;
}

ActionBounds Station::feasible_actions(int charger) const {
  int h = charger_session_[charger];
  if (h < 0) return ActionBounds{0.0, 0.0};
  return feasible_for_energy(sessions_[h].e);
}

std::vector<double> Station::apply_actions(const std::vector<double>& actions) {
  if (static_cast<int>(actions.size()) != cfg_.n_chargers)
    throw std::invalid_argument("need one action per charger");
  int period = current_period();
  std::vector<double> reward(cfg_.n_chargers, 0.0);
  for (int j = 0; j < cfg_.n_chargers; ++j) {
    double a = actions[j];
    ActionBounds bounds = feasible_actions(j);
    if (!bounds.contains(a, cfg_.delta_a))
      throw std::logic_error("infeasible action " + std::to_string(a) + " on charger " +
                             std::to_string(j));
    if (a == 0.0) continue;
    int h = charger_session_[j];
    EvSession& s = sessions_[h];
    double energy = std::abs(a) * cfg_.dt_hours;
    double m = net_margin(tariff_, period, a > 0);
    double r = m * energy;
    s.e = std::clamp(s.e + a * cfg_.dt_hours, cfg_.e_min, cfg_.e_max);
    reward[j] = r;
    (a > 0 ? ledger_.b_charge : ledger_.b_discharge) += r;
  }
  return reward;
}

std::pair<std::vector<double>, double> Station::settle_departures() {
  std::vector<double> charger_penalty(cfg_.n_chargers, 0.0);
  double waiting_penalty = 0.0;
  for (auto& s : sessions_) {
    if (!s.present() || s.request.t_d != step_ + 1) continue;
    double shortfall = std::max(0.0, s.request.e_tgt - s.e);
    double penalty = cfg_.mu * shortfall;
    if (s.status == SessionStatus::Charging) {
      charger_penalty[s.charger] += penalty;
      charger_session_[s.charger] = -1;
      s.charger = -1;
    } else {
      waiting_penalty += penalty;
    }
    s.status = SessionStatus::Departed;
    ledger_.c_penalty += penalty;
  }
  return {charger_penalty, waiting_penalty};
}

std::pair<double, std::vector<double>> Station::update_peak(const std::vector<double>& actions) {
  if (static_cast<int>(actions.size()) != cfg_.n_chargers)
    throw std::invalid_argument("need one action per charger");
  std::vector<double> share(cfg_.n_chargers, 0.0);
  double total = 0.0;
  for (double a : actions) total += a;
  int h = current_period();
  if (total <= peaks_[h] + 1e-12) return {0.0, share};
  assert(total > 0.0);
  double charge = cfg_.demand_scale(tariff_) * tariff_.p_l[h] * (total - peaks_[h]);
  peaks_[h] = total;
  ledger_.c_demand += charge;
  for (int j = 0; j < cfg_.n_chargers; ++j) share[j] = -(actions[j] / total) * charge;
  return {-charge, share};
}

void Station::advance() {
  prev_wait_ = waiting_now();
  ++step_;
}

WaitingAggregates Station::waiting_now() const {
  WaitingAggregates w;
  for (const auto& s : sessions_) {
    if (s.status != SessionStatus::Waiting) continue;
    ++w.n_wait;
    w.e_r_wait += std::max(0.0, s.request.e_tgt - s.e);
  }
  return w;
}

int Station::current_period() const {
  // past the last step the clock stays on the final step's period
  return cfg_.period_of_step(std::min(step_, total_steps_ - 1), tariff_);
}

double Station::current_peak() const { return peaks_[current_period()]; }

std::vector<double> Station::observe(int charger) const {
  int t = std::min(step_, total_steps_);
  int h = charger_session_[charger];
  if (h < 0)
    return build_features(cfg_, tariff_, false, t, 0, 0.0, 0.0, waiting_now(), current_peak());
  const EvSession& s = sessions_[h];
  int t_r = std::max(0, s.request.t_d - step_);
  return build_features(cfg_, tariff_, true, t, t_r, s.e, s.request.e_tgt - s.e, waiting_now(),
                        current_peak());
}

double Station::demand_charge_from_peaks() const {
  double c = 0.0;
  for (int h = 0; h < tariff_.n_periods(); ++h)
    c += tariff_.p_l[h] * std::max(0.0, peaks_[h]);
  return c * cfg_.demand_scale(tariff_);
}

std::vector<double> split_waiting_penalty(double penalty, const std::vector<double>& actions,
                                          double a_max) {
  std::vector<double> share(actions.size(), 0.0);
  if (penalty <= 0.0 || actions.empty()) return share;
  double denom = 0.0;
  for (double a : actions) denom += a_max - a;
  if (denom <= 1e-12) {
    for (auto& s : share) s = -penalty / actions.size();
    return share;
  }
  for (size_t j = 0; j < actions.size(); ++j) share[j] = -(a_max - actions[j]) / denom * penalty;
  return share;
}

}  // namespace evcs
