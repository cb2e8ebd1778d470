#include "evcs/runner.hpp"

#include <cmath>
#include <ostream>

namespace evcs {

namespace {

void trace_header(std::ostream& out, const Station& station) {
  out << "step,period";
  int n = station.config().n_chargers;
  for (int j = 0; j < n; ++j)
    out << ",a_" << j << ",r_b_" << j << ",r_p_" << j << ",r_l_" << j;
  for (int h = 0; h < station.tariff().n_periods(); ++h) out << ",peak_" << h;
  out << ",B_c,B_d,C_p,C_l\n";
}

const char* status_name(SessionStatus s) {
  switch (s) {
    case SessionStatus::Pending: return "pending";
    case SessionStatus::Waiting: return "waiting";
    case SessionStatus::Charging: return "charging";
    case SessionStatus::Departed: return "departed";
    case SessionStatus::Rejected: return "rejected";
  }
  return "?";
}

}  // namespace

EpisodeOutcome run_episode(Station& station, std::vector<EvRequest> requests, Policy& policy,
                           uint64_t seed, const TraceSinks& sinks) {
  station.begin_episode(std::move(requests));
  std::vector<EvRequest> sorted;
  for (const auto& s : station.sessions()) sorted.push_back(s.request);
  policy.begin_episode(station, sorted, seed);

  EpisodeOutcome out;
  out.power_by_period.assign(station.tariff().n_periods(), 0.0);
  out.steps_by_period.assign(station.tariff().n_periods(), 0);

  if (sinks.trace) trace_header(*sinks.trace, station);
  if (sinks.soc) *sinks.soc << "step,id,charger,e,status\n";

  int n = station.config().n_chargers;
  while (!station.done()) {
    station.admit_arrivals();
    station.connect_set(policy.choose_connected(station));
    std::vector<double> actions = policy.choose_actions(station);

    if (sinks.soc) {
      for (const auto& s : station.sessions())
        if (s.present())
          *sinks.soc << station.step() << ',' << s.request.id << ',' << s.charger << ',' << s.e
                     << ',' << status_name(s.status) << '\n';
    }

    int period = station.current_period();
    std::vector<double> r_b = station.apply_actions(actions);
    auto [c_p, waiting_penalty] = station.settle_departures();
    std::vector<double> w_share =
        split_waiting_penalty(waiting_penalty, actions, station.config().a_max);
    auto [r_l_total, l_share] = station.update_peak(actions);
    (void)r_l_total;

    double step_power = 0.0;
    for (int j = 0; j < n; ++j) {
      out.reward_sum += r_b[j] - c_p[j] + w_share[j] + l_share[j];
      step_power += actions[j];
    }
    out.power_by_period[period] += step_power;
    out.steps_by_period[period] += 1;

    if (sinks.trace) {
      *sinks.trace << station.step() << ',' << period;
      for (int j = 0; j < n; ++j)
        *sinks.trace << ',' << actions[j] << ',' << r_b[j] << ',' << (-c_p[j] + w_share[j]) << ','
                     << l_share[j];
      for (double p : station.peaks()) *sinks.trace << ',' << p;
      const Ledger& led = station.ledger();
      *sinks.trace << ',' << led.b_charge << ',' << led.b_discharge << ',' << led.c_penalty << ','
                   << led.c_demand << '\n';
    }
    station.advance();
  }
  out.ledger = station.ledger();
  return out;
}

}  // namespace evcs
