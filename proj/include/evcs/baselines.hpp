#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evcs/horizon.hpp"
#include "evcs/qnet.hpp"
#include "evcs/runner.hpp"
#include "evcs/scenario.hpp"
#include "evcs/station.hpp"

namespace evcs {

// Ranks the tariff's periods into the three roles the rule-based policies
// need. Prefers the standard labels; otherwise the highest demand charge is
// on-peak and the cheapest energy is off-peak.
struct PeriodRoles {
  int on_peak = -1;
  int mid_peak = -1;
  int off_peak = -1;
  static PeriodRoles classify(const Tariff& tariff);
};

// Urgency allocation: remaining energy over remaining time, descending; ties
// prefer the earlier departure, then the lower id. Connects the top
// min(n_chargers, #present) sessions.
std::vector<int> grd_allocate(const Station& station);

// Rule-based dispatch: full power off-peak, just-in-time charging mid-peak,
// and on-peak an even discharge clipped so each vehicle keeps enough charge
// to still hit its target (never dipping under a target already reached).
// With allow_discharge = false the on-peak branch only charges what
// just-in-time requires.
std::vector<double> grd_act(const Station& station, bool allow_discharge);

class GrdPolicy : public Policy {
 public:
  explicit GrdPolicy(bool allow_discharge)
      : allow_discharge_(allow_discharge) {}
  std::string name() const override { return allow_discharge_ ? "grd" : "grd-novgi"; }
  std::vector<int> choose_connected(Station& station) override { return grd_allocate(station); }
  std::vector<double> choose_actions(Station& station) override {
    return grd_act(station, allow_discharge_);
  }

 private:
  bool allow_discharge_;
};

// Urgency allocation with all-zero powers; the do-nothing reference.
class NullPolicy : public Policy {
 public:
  std::string name() const override { return "null"; }
  std::vector<int> choose_connected(Station& station) override { return grd_allocate(station); }
  std::vector<double> choose_actions(Station& station) override {
    return std::vector<double>(station.config().n_chargers, 0.0);
  }
};

// Greedy deployment of a trained value network: centralized allocation, then
// each charger's batched argmax.
class CadePolicy : public Policy {
 public:
  explicit CadePolicy(QNet net) : net_(std::move(net)) {}
  std::string name() const override { return "cade"; }
  std::vector<int> choose_connected(Station& station) override;
  std::vector<double> choose_actions(Station& station) override;
  const QNet& net() const { return net_; }

 private:
  QNet net_;
};

// Rolling-horizon re-optimization. Each step it assembles the window of
// present vehicles plus predicted arrivals (sampled from the pattern, or read
// from the ground-truth list when ideal), fixes the allocation by urgency,
// solves the window LP, and executes the first-step powers rounded to the
// nearest feasible grid level. LP failure falls back to grd_act for the step.
class MpcPolicy : public Policy {
 public:
  MpcPolicy(double horizon_hours, bool ideal, ArrivalPattern pattern);
  std::string name() const override;
  void begin_episode(const Station& station, const std::vector<EvRequest>& requests,
                     uint64_t seed) override;
  std::vector<int> choose_connected(Station& station) override { return grd_allocate(station); }
  std::vector<double> choose_actions(Station& station) override;
  int fallbacks() const { return fallbacks_; }

 private:
  double horizon_hours_;
  bool ideal_;
  ArrivalPattern pattern_;
  std::vector<EvRequest> truth_;
  Rng predict_rng_;
  int fallbacks_ = 0;
};

// Exhaustive optimum for tiny instances: joint dynamic program over the
// vehicles' discretized energy trajectories, swept over every reachable
// per-period peak cap. Exact for the given action grid.
struct OracleResult {
  double profit = 0.0;
  // [step] -> handles connected / kW per handle (0 for unconnected)
  std::vector<std::vector<int>> connected;
  std::vector<std::vector<double>> power;
};

OracleResult oracle_solve(const std::vector<EvRequest>& requests, const StationConfig& cfg,
                          const Tariff& tariff);

void write_oracle_csv(const OracleResult& result, std::ostream& out);

// Replays a precomputed oracle schedule through the live station.
class SchedulePolicy : public Policy {
 public:
  explicit SchedulePolicy(OracleResult schedule) : schedule_(std::move(schedule)) {}
  std::string name() const override { return "oracle"; }
  std::vector<int> choose_connected(Station& station) override;
  std::vector<double> choose_actions(Station& station) override;

 private:
  OracleResult schedule_;
};

}  // namespace evcs
