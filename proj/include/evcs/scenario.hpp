#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "evcs/rng.hpp"
#include "evcs/tariff.hpp"

namespace evcs {

// Arrival process and per-vehicle draw parameters for one site type.
// Arrivals per step are Poisson with rate lambda(hour) * dt; dwell times are
// normal in hours, initial and requested energies normal in kWh.
struct ArrivalPattern {
  std::string name;
  std::array<double, 24> lambda_by_hour{};  // vehicles per hour
  double dwell_mean = 8.0, dwell_std = 4.0;
  double e_ini_mean = 20.0, e_ini_std = 10.0;
  double e_tgt_mean = 80.0, e_tgt_std = 10.0;

  void validate() const;
  // office / residential / highway / retail
  static ArrivalPattern builtin(const std::string& name);
};

// Physical station plus episode discretization. n_chargers is the number of
// plugs, n_waiting the waiting-area slots; a vehicle is admitted only while
// chargers + waiting slots have room.
struct StationConfig {
  int n_chargers = 10;
  int n_waiting = 5;
  double e_min = 10.0, e_max = 100.0;    // kWh battery window
  double a_min = -100.0, a_max = 100.0;  // kW power window
  double delta_a = 25.0;                 // kW action grid step
  double mu = 0.2;                       // $/kWh shortfall penalty rate
  double horizon_hours = 48.0;
  double dt_hours = 0.25;
  double episode_start_hour = 0.0;  // clock time of step 0

  int n_slots() const { return n_chargers + n_waiting; }
  int total_steps() const;
  double hour_of_step(int step) const;  // 24 h clock time at the step's start
  int period_of_step(int step, const Tariff& tariff) const;
  // Fraction of a billing period one episode covers; scales the demand charge.
  double demand_scale(const Tariff& tariff) const;
  void validate() const;
};

// One charging request. Arrival and departure are step indices with
// t_a < t_d <= total_steps; energies satisfy
// e_min <= e_ini <= e_tgt <= min(e_max, e_ini + a_max * (t_d - t_a) * dt).
struct EvRequest {
  int id = 0;
  int t_a = 0;
  int t_d = 0;
  double e_ini = 0.0;
  double e_tgt = 0.0;
};

void validate_requests(const std::vector<EvRequest>& requests, const StationConfig& cfg);

// Draws one episode of requests, sorted by (t_a, id), ids dense from 0.
// Per vehicle the draw order is dwell, e_ini, e_tgt; dwell rounds to at least
// one step and departures clamp to the episode end before the energy cap is
// applied, so stored requests always satisfy the invariants above.
std::vector<EvRequest> sample_episode(const ArrivalPattern& pattern, const StationConfig& cfg,
                                      Rng& rng);

// Same per-vehicle marginals for a single step (used by predictive policies).
std::vector<EvRequest> sample_step_arrivals(const ArrivalPattern& pattern,
                                            const StationConfig& cfg, int step, int next_id,
                                            Rng& rng);

void write_requests_csv(const std::vector<EvRequest>& requests, std::ostream& out);
std::vector<EvRequest> read_requests_csv(std::istream& in);

}  // namespace evcs
