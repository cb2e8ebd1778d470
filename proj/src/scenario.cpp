#include "evcs/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace evcs {

void ArrivalPattern::validate() const {
  for (double l : lambda_by_hour)
    if (l < 0 || !std::isfinite(l)) throw std::invalid_argument("arrival rate must be finite and >= 0");
  if (dwell_std < 0 || e_ini_std < 0 || e_tgt_std < 0)
    throw std::invalid_argument("std deviations must be >= 0");
  if (dwell_mean <= 0) throw std::invalid_argument("dwell_mean must be positive");
}

ArrivalPattern ArrivalPattern::builtin(const std::string& name) {
  ArrivalPattern p;
  p.name = name;
  p.e_ini_mean = 20.0;
  p.e_ini_std = 10.0;
  p.e_tgt_mean = 80.0;
  p.e_tgt_std = 10.0;
  if (name == "office") {
    // commuter inflow peaking 8-10AM, long daytime stays
    p.lambda_by_hour = {0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.2, 0.8, 3.0, 3.0, 1.5, 1.0,
                        0.8, 0.6, 0.5, 0.4, 0.3, 0.2, 0.2, 0.1, 0.1, 0.1, 0.1, 0.1};
    p.dwell_mean = 8.0;
    p.dwell_std = 4.0;
  } else if (name == "residential") {
    // evening return peak, overnight stays
    p.lambda_by_hour = {0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.2, 0.3, 0.2, 0.2, 0.2, 0.2,
                        0.3, 0.3, 0.4, 0.8, 1.5, 2.5, 2.5, 2.0, 1.0, 0.6, 0.4, 0.3};
    p.dwell_mean = 16.0;
    p.dwell_std = 4.0;
  } else if (name == "highway") {
    // steady transit traffic with morning / midday / evening surges
    p.lambda_by_hour = {0.5, 0.4, 0.3, 0.3, 0.4, 0.6, 1.5, 3.0, 6.0, 4.0, 2.0, 3.0,
                        5.0, 6.0, 4.0, 2.5, 3.0, 6.0, 7.0, 5.0, 3.0, 2.0, 1.0, 0.7};
    p.dwell_mean = 1.0;
    p.dwell_std = 0.5;
  } else if (name == "retail") {
    // shopping traffic, midday and early-evening peaks
    p.lambda_by_hour = {0.2, 0.1, 0.1, 0.1, 0.1, 0.2, 0.3, 0.5, 1.0, 1.5, 2.5, 3.5,
                        4.0, 3.5, 2.5, 2.0, 2.5, 4.0, 5.5, 6.0, 4.0, 2.0, 1.0, 0.4};
    p.dwell_mean = 1.0;
    p.dwell_std = 0.75;
  } else {
    throw std::invalid_argument("unknown arrival pattern: " + name);
  }
  return p;
}

int StationConfig::total_steps() const {
  return static_cast<int>(std::llround(horizon_hours / dt_hours));
}

double StationConfig::hour_of_step(int step) const {
  return std::fmod(episode_start_hour + step * dt_hours, 24.0);
}

int StationConfig::period_of_step(int step, const Tariff& tariff) const {
  return tariff.period_of_hour(hour_of_step(step));
}

double StationConfig::demand_scale(const Tariff& tariff) const {
  return horizon_hours / tariff.billing_period_hours;
}

void StationConfig::validate() const {
  if (n_chargers < 1) throw std::invalid_argument("n_chargers must be >= 1");
  if (n_waiting < 0) throw std::invalid_argument("n_waiting must be >= 0");
  if (!(e_min >= 0 && e_min < e_max)) throw std::invalid_argument("need 0 <= e_min < e_max");
  if (!(a_min <= 0 && 0 < a_max)) throw std::invalid_argument("need a_min <= 0 < a_max");
  if (delta_a <= 0) throw std::invalid_argument("delta_a must be positive");
  double ru = a_max / delta_a, rl = a_min / delta_a;
  if (std::abs(ru - std::llround(ru)) > 1e-9 || std::abs(rl - std::llround(rl)) > 1e-9)
    throw std::invalid_argument("a_min and a_max must be multiples of delta_a");
  if (mu < 0) throw std::invalid_argument("mu must be >= 0");
  if (dt_hours <= 0) throw std::invalid_argument("dt_hours must be positive");
  double steps = horizon_hours / dt_hours;
  if (std::abs(steps - std::llround(steps)) > 1e-9 || steps < 1)
    throw std::invalid_argument("horizon_hours must be a positive multiple of dt_hours");
  if (episode_start_hour < 0 || episode_start_hour >= 24)
    throw std::invalid_argument("episode_start_hour must lie in [0, 24)");
}

void validate_requests(const std::vector<EvRequest>& requests, const StationConfig& cfg) {
  int steps = cfg.total_steps();
  for (const auto& r : requests) {
    if (r.t_a < 0 || r.t_a >= steps) throw std::invalid_argument("request arrival outside episode");
    if (r.t_d <= r.t_a || r.t_d > steps) throw std::invalid_argument("request departure must satisfy t_a < t_d <= T");
    double cap = std::min(cfg.e_max, r.e_ini + cfg.a_max * (r.t_d - r.t_a) * cfg.dt_hours);
    if (!(cfg.e_min <= r.e_ini && r.e_ini <= r.e_tgt && r.e_tgt <= cap + 1e-9))
      throw std::invalid_argument("request energies violate e_min <= e_ini <= e_tgt <= cap");
  }
}

namespace {

double normal_draw(double mean, double std, Rng& rng) {
  if (std <= 0) return mean;
  std::normal_distribution<double> d(mean, std);
  return d(rng);
}

EvRequest draw_request(const ArrivalPattern& pattern, const StationConfig& cfg, int t_a, int id,
                       Rng& rng) {
  double dwell = normal_draw(pattern.dwell_mean, pattern.dwell_std, rng);
  int dwell_steps = std::max<int>(1, static_cast<int>(std::llround(dwell / cfg.dt_hours)));
  int t_d = std::min(t_a + dwell_steps, cfg.total_steps());

  double e_ini = std::clamp(normal_draw(pattern.e_ini_mean, pattern.e_ini_std, rng), cfg.e_min,
                            cfg.e_max);
  double cap = std::min(cfg.e_max, e_ini + cfg.a_max * (t_d - t_a) * cfg.dt_hours);
  double e_tgt = std::clamp(normal_draw(pattern.e_tgt_mean, pattern.e_tgt_std, rng), e_ini, cap);
  return EvRequest{id, t_a, t_d, e_ini, e_tgt};
}

int poisson_count(double rate, Rng& rng) {
  if (rate <= 0) return 0;
  std::poisson_distribution<int> d(rate);
  return d(rng);
}

}  // namespace

std::vector<EvRequest> sample_episode(const ArrivalPattern& pattern, const StationConfig& cfg,
                                      Rng& rng) {
  pattern.validate();
  cfg.validate();
  std::vector<EvRequest> out;
  int id = 0;
  for (int t = 0; t < cfg.total_steps(); ++t) {
    int hour = static_cast<int>(cfg.hour_of_step(t));
    int n = poisson_count(pattern.lambda_by_hour[hour] * cfg.dt_hours, rng);
    for (int i = 0; i < n; ++i) out.push_back(draw_request(pattern, cfg, t, id++, rng));
  }
  return out;
}

std::vector<EvRequest> sample_step_arrivals(const ArrivalPattern& pattern,
                                            const StationConfig& cfg, int step, int next_id,
                                            Rng& rng) {
  int hour = static_cast<int>(cfg.hour_of_step(step));
  int n = poisson_count(pattern.lambda_by_hour[hour] * cfg.dt_hours, rng);
  std::vector<EvRequest> out;
  for (int i = 0; i < n; ++i) out.push_back(draw_request(pattern, cfg, step, next_id++, rng));
  return out;
}

void write_requests_csv(const std::vector<EvRequest>& requests, std::ostream& out) {
  out << "id,t_a,t_d,e_ini,e_tgt\n";
  for (const auto& r : requests)
    out << r.id << ',' << r.t_a << ',' << r.t_d << ',' << r.e_ini << ',' << r.e_tgt << '\n';
}

std::vector<EvRequest> read_requests_csv(std::istream& in) {
  std::vector<EvRequest> out;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty request csv");
  if (line != "id,t_a,t_d,e_ini,e_tgt")
    throw std::runtime_error("unexpected request csv header: " + line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    EvRequest r;
    char c;
    if (!(ls >> r.id >> c >> r.t_a >> c >> r.t_d >> c >> r.e_ini >> c >> r.e_tgt))
      throw std::runtime_error("bad request csv row: " + line);
    out.push_back(r);
  }
  return out;
}

}  // namespace evcs
