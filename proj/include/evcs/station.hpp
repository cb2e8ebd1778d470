#pragma once

#include <utility>
#include <vector>

#include "evcs/actions.hpp"
#include "evcs/scenario.hpp"
#include "evcs/tariff.hpp"

namespace evcs {

enum class SessionStatus { Pending, Waiting, Charging, Departed, Rejected };

// One admitted (or rejected) vehicle over its stay.
struct EvSession {
  EvRequest request;
  double e = 0.0;  // kWh now
  SessionStatus status = SessionStatus::Pending;
  int charger = -1;  // valid while Charging

  bool present() const {
    return status == SessionStatus::Waiting || status == SessionStatus::Charging;
  }
};

// Episode profit decomposition: Z = (b_charge + b_discharge) - c_penalty - c_demand.
struct Ledger {
  double b_charge = 0.0;
  double b_discharge = 0.0;
  double c_penalty = 0.0;  // departure shortfall penalties, chargers and waiting area
  double c_demand = 0.0;   // accrued demand-charge increments
  int n_admitted = 0;
  int n_rejected = 0;

  double revenue() const { return b_charge + b_discharge; }
  double profit() const { return revenue() - c_penalty - c_demand; }
};

struct WaitingAggregates {
  int n_wait = 0;
  double e_r_wait = 0.0;  // total unmet energy in the waiting area, kWh
};

// Normalized feature vector a charger-level value function consumes, built
// from one charger's slice of station state. Layout, length 8 + n_periods:
//   [0] occupied flag, [1] t/T, [2] t_r/T, [3] e/e_max, [4] e_r/e_max,
//   [5] n_wait/N^w, [6] e_r_wait/(N^w e_max), [7..] TOU one-hot,
//   [last] running peak of the current period / (N^c a_max).
// A vacant charger zeroes the vehicle fields and keeps the shared ones.
std::vector<double> build_features(const StationConfig& cfg, const Tariff& tariff, bool occupied,
                                   int step, int steps_remaining, double e, double e_r,
                                   const WaitingAggregates& wait, double current_peak);

int feature_dim(const Tariff& tariff);

// Discrete-time station simulator. One step runs, in order:
//   admit_arrivals -> connect_set -> apply_actions -> settle_departures
//   -> update_peak -> advance
// with observations taken after connect_set (acting state) and after advance
// (successor state). Rewards returned by the pieces sum exactly to the
// episode profit.
class Station {
 public:
  Station(StationConfig cfg, Tariff tariff);

  void begin_episode(std::vector<EvRequest> requests);

  // Vehicles with t_a == current step enter the waiting area while
  // chargers + waiting slots have room; the rest are rejected for good.
  void admit_arrivals();

  // Connects exactly the given sessions (handles into sessions()), which must
  // be present and number min(n_chargers, #present). A session already on a
  // charger keeps it; freed chargers are refilled in ascending vehicle id
  // order.
  void connect_set(const std::vector<int>& connected);

  // Applies one grid-feasible action per charger (0 for vacant chargers),
  // moves energy, accrues revenue, and returns each charger's margin reward.
  std::vector<double> apply_actions(const std::vector<double>& actions);

  // Removes sessions whose departure boundary is the end of this step.
  // Returns per-charger shortfall penalties (>= 0) and the total waiting-area
  // departure penalty (>= 0), all accrued to the ledger.
  std::pair<std::vector<double>, double> settle_departures();

  // Demand-charge bookkeeping for this step's total draw. If the total tops
  // the current period's running peak, returns the (negative) charge
  // increment and its per-charger split, and raises the peak.
  std::pair<double, std::vector<double>> update_peak(const std::vector<double>& actions);

  void advance();  // snapshots waiting aggregates, then step += 1

  std::vector<double> observe(int charger) const;
  ActionBounds feasible_actions(int charger) const;
  ActionBounds feasible_for_energy(double e) const;

  WaitingAggregates waiting_now() const;
  WaitingAggregates prev_wait() const { return prev_wait_; }
  double current_peak() const;  // running peak of the current period

  const StationConfig& config() const { return cfg_; }
  const Tariff& tariff() const { return tariff_; }
  int step() const { return step_; }
  int total_steps() const { return total_steps_; }
  bool done() const { return step_ >= total_steps_; }
  int current_period() const;
  const Ledger& ledger() const { return ledger_; }
  const std::vector<EvSession>& sessions() const { return sessions_; }
  const std::vector<double>& peaks() const { return peaks_; }
  int session_at(int charger) const { return charger_session_[charger]; }
  int present_count() const;

  // Demand charge recomputed from final peaks; equals the accrued ledger value.
  double demand_charge_from_peaks() const;

 private:
  StationConfig cfg_;
  Tariff tariff_;
  int total_steps_ = 0;
  int step_ = 0;
  std::vector<EvSession> sessions_;
  std::vector<int> charger_session_;  // -1 = vacant
  std::vector<double> peaks_;         // running L per TOU period
  WaitingAggregates prev_wait_;
  Ledger ledger_;
  size_t next_arrival_ = 0;  // first not-yet-admitted session
};

// Splits a waiting-area penalty across chargers, blaming idle capacity:
// charger j takes share (a_max - a_j) / sum_k (a_max - a_k); equal shares if
// every charger ran at a_max. Shares are returned negative (reward form).
std::vector<double> split_waiting_penalty(double penalty, const std::vector<double>& actions,
                                          double a_max);

}  // namespace evcs
