#pragma once

#include <vector>

#include "evcs/lp.hpp"
#include "evcs/scenario.hpp"
#include "evcs/station.hpp"
#include "evcs/tariff.hpp"

namespace evcs {

// One vehicle's stay within a finite optimization window, in window-local
// steps [t_start, t_end). handle points back to a live station session, -1
// for predicted future arrivals.
struct EvWindow {
  int handle = -1;
  int id = 0;
  int t_start = 0;
  int t_end = 0;
  double e0 = 0.0;
  double e_tgt = 0.0;
};

// Finite-horizon slice of the operating problem with the charger assignment
// already fixed, which keeps the remaining profit maximization linear.
struct HorizonInstance {
  StationConfig cfg;
  Tariff tariff;
  int t0 = 0;     // absolute step of local step 0
  int steps = 0;  // window length
  std::vector<EvWindow> evs;
  std::vector<std::vector<char>> connected;  // [ev][local step]
  std::vector<double> incumbent_peaks;       // running L per TOU period

  int period_of_local(int tau) const { return cfg.period_of_step(t0 + tau, tariff); }
  void validate() const;
};

// Greedy urgency assignment: at each window step the vehicles present are
// ranked by remaining energy over remaining time and the top n_chargers get
// plugs. Connected vehicles advance a working energy at full charge power
// (capped at their target) so later steps rank against projected deficits and
// plugs hand over once a vehicle is projected full. Ties prefer the earlier
// departure, then the lower id.
std::vector<std::vector<char>> fix_allocation(const StationConfig& cfg,
                                              const std::vector<EvWindow>& evs, int steps);

// Window snapshot of a live station plus predicted arrivals (absolute-step
// requests; those at or after t0 + steps are dropped, departures clip).
HorizonInstance build_instance(const Station& station, int steps,
                               const std::vector<EvRequest>& predicted);

// Continuous relaxation over the window: per connected vehicle-step a split
// power a+ - a-; energy kept inside [e_min, e_max] through every prefix;
// shortfall slack per vehicle; per-period peak variables priced above the
// incumbent peaks only.
LinearProgram build_lp(const HorizonInstance& instance);

struct HorizonSolution {
  bool ok = false;
  double objective = 0.0;
  std::vector<std::vector<double>> power;  // [ev][local step], kW, 0 when idle
};

HorizonSolution solve_instance(const HorizonInstance& instance);

}  // namespace evcs
