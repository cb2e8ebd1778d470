#include "evcs/tariff.hpp"

#include <cmath>
#include <stdexcept>

namespace evcs {

bool TouPeriod::contains(double hour_of_day) const {
  if (start_hour <= end_hour) return hour_of_day >= start_hour && hour_of_day < end_hour;
  return hour_of_day >= start_hour || hour_of_day < end_hour;  // wraps midnight
}

double TouPeriod::length_hours() const {
  if (start_hour <= end_hour) return end_hour - start_hour;
  return 24.0 - start_hour + end_hour;
}

int Tariff::period_of_hour(double hour_of_day) const {
  double h = std::fmod(hour_of_day, 24.0);
  if (h < 0) h += 24.0;
  for (int i = 0; i < n_periods(); ++i)
    if (periods[i].contains(h)) return i;
  throw std::invalid_argument("tariff periods do not cover hour " + std::to_string(h));
}

void Tariff::validate() const {
  if (periods.empty()) throw std::invalid_argument("tariff needs at least one period");
  if (p_e.size() != periods.size() || p_l.size() != periods.size())
    throw std::invalid_argument("tariff p_e/p_l must have one entry per period");
  if (billing_period_hours <= 0) throw std::invalid_argument("billing_period_hours must be positive");
  for (double p : p_l)
    if (p < 0) throw std::invalid_argument("demand charge must be nonnegative");
  double total = 0;
  for (const auto& w : periods) {
    if (w.start_hour < 0 || w.start_hour >= 24 || w.end_hour < 0 || w.end_hour > 24)
      throw std::invalid_argument("period hours must lie in [0, 24]");
    total += w.length_hours();
  }
  if (std::abs(total - 24.0) > 1e-9)
    throw std::invalid_argument("tariff periods must partition the 24 h day");
  // partition check: every half-hour midpoint belongs to exactly one window
  for (int s = 0; s < 48; ++s) {
    double h = s * 0.5 + 0.25;
    int hits = 0;
    for (const auto& w : periods) hits += w.contains(h) ? 1 : 0;
    if (hits != 1) throw std::invalid_argument("tariff periods overlap or leave gaps");
  }
}

Tariff Tariff::standard_three_period() {
  Tariff t;
  t.periods = {{"on-peak", 12, 17}, {"mid-peak", 8, 12}, {"off-peak", 17, 8}};
  t.p_e = {0.20, 0.10, 0.05};
  t.p_l = {2.0, 1.0, 0.5};
  t.p_c = 0.15;
  t.p_d = 0.16;
  t.billing_period_hours = 720.0;
  return t;
}

double net_margin(const Tariff& tariff, int period, bool charging) {
  if (period < 0 || period >= tariff.n_periods()) throw std::invalid_argument("bad period index");
  return charging ? tariff.p_c - tariff.p_e[period] : tariff.p_e[period] - tariff.p_d;
}

}  // namespace evcs
