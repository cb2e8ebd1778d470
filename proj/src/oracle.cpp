#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "evcs/baselines.hpp"

namespace evcs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Admitted {
  int handle = 0;
  EvRequest req;
  int down = 0, up = 0;  // energy index range [-down, +up] around e_ini
  int stride = 1;
};

struct Choice {
  uint8_t mask = 0;                 // connected subset over admitted vehicles
  std::array<int8_t, 3> k{0, 0, 0};  // action grid multiples for connected ones
};

}  // namespace

OracleResult oracle_solve(const std::vector<EvRequest>& requests, const StationConfig& cfg,
                          const Tariff& tariff) {
  cfg.validate();
  tariff.validate();
  int steps = cfg.total_steps();
  int kmin = static_cast<int>(std::llround(cfg.a_min / cfg.delta_a));
  int kmax = static_cast<int>(std::llround(cfg.a_max / cfg.delta_a));
  if (requests.size() > 3 || steps > 8 || cfg.n_chargers > 2 || kmax - kmin + 1 > 9)
    throw std::invalid_argument("instance beyond the oracle's enumeration budget");

  std::vector<EvRequest> sorted = requests;
  std::sort(sorted.begin(), sorted.end(), [](const EvRequest& a, const EvRequest& b) {
    return a.t_a != b.t_a ? a.t_a < b.t_a : a.id < b.id;
  });
  validate_requests(sorted, cfg);

  // admission pre-pass, identical to the live station's capacity rule
  std::vector<Admitted> evs;
  for (int h = 0; h < static_cast<int>(sorted.size()); ++h) {
    int present = 0;
    for (const Admitted& a : evs)
      if (a.req.t_a <= sorted[h].t_a && sorted[h].t_a < a.req.t_d) ++present;
    if (present >= cfg.n_slots()) continue;
    Admitted a;
    a.handle = h;
    a.req = sorted[h];
    evs.push_back(a);
  }
  int n = static_cast<int>(evs.size());

  double dt = cfg.dt_hours;
  double inc = cfg.delta_a * dt;  // energy per grid multiple
  long total_states = 1;
  for (Admitted& a : evs) {
    a.down = static_cast<int>(std::floor((a.req.e_ini - cfg.e_min) / inc + 1e-9));
    a.up = static_cast<int>(std::floor((cfg.e_max - a.req.e_ini) / inc + 1e-9));
    a.stride = static_cast<int>(total_states);
    total_states *= a.down + a.up + 1;
  }
  if (total_states > 100000)
    throw std::invalid_argument("instance beyond the oracle's enumeration budget");

  auto energy_of = [&](const Admitted& a, int idx) { return a.req.e_ini + (idx - a.down) * inc; };

  std::vector<int> period_of(steps);
  std::vector<double> m_charge(steps), m_discharge(steps);
  for (int t = 0; t < steps; ++t) {
    period_of[t] = cfg.period_of_step(t, tariff);
    m_charge[t] = net_margin(tariff, period_of[t], true);
    m_discharge[t] = net_margin(tariff, period_of[t], false);
  }

  std::vector<uint8_t> present_mask(steps, 0);
  for (int t = 0; t < steps; ++t)
    for (int i = 0; i < n; ++i)
      if (evs[i].req.t_a <= t && t < evs[i].req.t_d) present_mask[t] |= uint8_t(1) << i;

  // per-period peak caps: every reachable cap is a grid multiple of delta_a
  std::vector<int> cap_periods;
  for (int t = 0; t < steps; ++t)
    if (std::find(cap_periods.begin(), cap_periods.end(), period_of[t]) == cap_periods.end())
      cap_periods.push_back(period_of[t]);
  int cap_levels = cfg.n_chargers * kmax + 1;
  long combos = 1;
  for (size_t i = 0; i < cap_periods.size(); ++i) combos *= cap_levels;
  if (combos > 10000)
    throw std::invalid_argument("instance beyond the oracle's enumeration budget");
  double scale = cfg.demand_scale(tariff);

  int start_state = 0;
  for (const Admitted& a : evs) start_state += a.down * a.stride;

  OracleResult best;
  best.profit = kNegInf;

  std::vector<double> val(total_states), nxt(total_states);
  std::vector<std::vector<int>> parent(steps, std::vector<int>(total_states));
  std::vector<std::vector<Choice>> move(steps, std::vector<Choice>(total_states));

  for (long combo = 0; combo < combos; ++combo) {
    std::vector<double> cap(tariff.n_periods(), 0.0);
    long rem = combo;
    for (int p : cap_periods) {
      cap[p] = (rem % cap_levels) * cfg.delta_a;
      rem /= cap_levels;
    }

    std::fill(val.begin(), val.end(), kNegInf);
    val[start_state] = 0.0;

    for (int t = 0; t < steps; ++t) {
      std::fill(nxt.begin(), nxt.end(), kNegInf);
      uint8_t present = present_mask[t];
      int n_present = __builtin_popcount(present);
      int want = std::min(cfg.n_chargers, n_present);
      double cap_t = cap[period_of[t]];

      std::vector<uint8_t> subsets;
      for (uint8_t m = 0; m < (1u << n); ++m)
        if ((m & present) == m && __builtin_popcount(m) == want) subsets.push_back(m);

      for (int s = 0; s < total_states; ++s) {
        if (val[s] == kNegInf) continue;
        std::array<int, 3> idx{};
        for (int i = 0; i < n; ++i)
          idx[i] = (s / evs[i].stride) % (evs[i].down + evs[i].up + 1);

        for (uint8_t m : subsets) {
          std::array<int, 3> conn{};
          int nc = 0;
          for (int i = 0; i < n; ++i)
            if (m & (1u << i)) conn[nc++] = i;

          std::array<int8_t, 3> k{0, 0, 0};
          // odometer over the connected vehicles' feasible grid actions
          auto recurse = [&](auto&& self, int d, double revenue, int power_k) -> void {
            if (d == nc) {
              if (power_k * cfg.delta_a > cap_t + 1e-9) return;
              double value = val[s] + revenue;
              int ns = s;
              for (int q = 0; q < nc; ++q) ns += k[q] * evs[conn[q]].stride;
              // settle departures on the post-action energies
              double pen = 0.0;
              for (int i = 0; i < n; ++i) {
                if (evs[i].req.t_d != t + 1 || !(present & (1u << i))) continue;
                int ei = (ns / evs[i].stride) % (evs[i].down + evs[i].up + 1);
                pen += cfg.mu * std::max(0.0, evs[i].req.e_tgt - energy_of(evs[i], ei));
              }
              value -= pen;
              if (value > nxt[ns]) {
                nxt[ns] = value;
                parent[t][ns] = s;
                Choice c;
                c.mask = m;
                for (int q = 0; q < nc; ++q) c.k[q] = k[q];
                move[t][ns] = c;
              }
              return;
            }
            int i = conn[d];
            int lo = std::max(kmin, -idx[i]);
            int hi = std::min(kmax, evs[i].down + evs[i].up - idx[i]);
            for (int kc = lo; kc <= hi; ++kc) {
              k[d] = static_cast<int8_t>(kc);
              double r = kc > 0 ? m_charge[t] * kc * cfg.delta_a * dt
                                : m_discharge[t] * (-kc) * cfg.delta_a * dt;
              self(self, d + 1, revenue + r, power_k + kc);
            }
          };
          recurse(recurse, 0, 0.0, 0);
        }
      }
      std::swap(val, nxt);
    }

    int end_state = 0;
    double end_val = kNegInf;
    for (int s = 0; s < total_states; ++s)
      if (val[s] > end_val) {
        end_val = val[s];
        end_state = s;
      }
    if (end_val == kNegInf) continue;

    // backtrack, then rescore with the realized peaks instead of the caps
    std::vector<Choice> plan(steps);
    int s = end_state;
    for (int t = steps - 1; t >= 0; --t) {
      plan[t] = move[t][s];
      s = parent[t][s];
    }
    std::vector<double> peaks(tariff.n_periods(), 0.0);
    std::vector<std::vector<double>> power(steps, std::vector<double>(sorted.size(), 0.0));
    std::vector<std::vector<int>> connected(steps);
    for (int t = 0; t < steps; ++t) {
      const Choice& c = plan[t];
      int nc = 0;
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!(c.mask & (1u << i))) continue;
        double a = c.k[nc++] * cfg.delta_a;
        power[t][evs[i].handle] = a;
        connected[t].push_back(evs[i].handle);
        total += a;
      }
      peaks[period_of[t]] = std::max(peaks[period_of[t]], total);
    }
    double demand = 0.0;
    for (int p = 0; p < tariff.n_periods(); ++p) demand += tariff.p_l[p] * std::max(0.0, peaks[p]);
    double exact = end_val - scale * demand;

    if (exact > best.profit) {
      best.profit = exact;
      best.power = power;
      best.connected = connected;
    }
  }

  if (best.profit == kNegInf) throw std::logic_error("oracle found no feasible schedule");
  return best;
}

void write_oracle_csv(const OracleResult& result, std::ostream& out) {
  out << "step,handle,connected,a\n";
  for (size_t t = 0; t < result.power.size(); ++t) {
    for (size_t h = 0; h < result.power[t].size(); ++h) {
      bool conn = std::find(result.connected[t].begin(), result.connected[t].end(),
                            static_cast<int>(h)) != result.connected[t].end();
      out << t << ',' << h << ',' << (conn ? 1 : 0) << ',' << result.power[t][h] << '\n';
    }
  }
}

}  // namespace evcs
