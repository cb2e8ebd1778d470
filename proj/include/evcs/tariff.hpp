#pragma once

#include <string>
#include <vector>

namespace evcs {

// One time-of-use window [start_hour, end_hour) on the 24 h clock. A window
// with start_hour > end_hour wraps midnight.
struct TouPeriod {
  std::string label;
  double start_hour = 0.0;
  double end_hour = 0.0;

  bool contains(double hour_of_day) const;
  double length_hours() const;
};

// Station-facing prices. p_c / p_d are the flat customer rates for charging
// and discharging; p_e and p_l are the utility energy price and demand charge
// per TOU period, indexed in the same order as `periods`.
struct Tariff {
  std::vector<TouPeriod> periods;
  std::vector<double> p_e;  // $/kWh bought from the grid
  double p_c = 0.0;         // $/kWh paid by drivers when charging
  double p_d = 0.0;         // $/kWh paid to drivers when discharging
  std::vector<double> p_l;  // $/kW on the period's peak demand
  double billing_period_hours = 720.0;

  int n_periods() const { return static_cast<int>(periods.size()); }
  int period_of_hour(double hour_of_day) const;
  void validate() const;  // throws std::invalid_argument

  // Three-period schedule: on-peak noon-5PM, mid-peak 8AM-noon, off-peak
  // 5PM-8AM, with p_e = 0.20/0.10/0.05, p_l = 2.0/1.0/0.5, p_c = 0.15,
  // p_d = 0.16.
  static Tariff standard_three_period();
};

// Net margin earned on one kWh moved through a battery during the given TOU
// period: p_c - p_e when charging, p_e - p_d when discharging.
double net_margin(const Tariff& tariff, int period, bool charging);

}  // namespace evcs
