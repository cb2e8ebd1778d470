#include "evcs/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace evcs {

void HorizonInstance::validate() const {
  if (steps < 1) throw std::invalid_argument("window needs at least one step");
  if (connected.size() != evs.size()) throw std::invalid_argument("allocation shape mismatch");
  if (static_cast<int>(incumbent_peaks.size()) != tariff.n_periods())
    throw std::invalid_argument("incumbent peaks shape mismatch");
  for (size_t w = 0; w < evs.size(); ++w) {
    const EvWindow& ev = evs[w];
    if (ev.t_start < 0 || ev.t_end > steps || ev.t_start >= ev.t_end)
      throw std::invalid_argument("vehicle window outside the horizon");
    if (static_cast<int>(connected[w].size()) != steps)
      throw std::invalid_argument("allocation shape mismatch");
    for (int tau = 0; tau < steps; ++tau)
      if (connected[w][tau] && (tau < ev.t_start || tau >= ev.t_end))
        throw std::invalid_argument("vehicle connected outside its window");
  }
  for (int tau = 0; tau < steps; ++tau) {
    int n = 0;
    for (size_t w = 0; w < evs.size(); ++w) n += connected[w][tau] ? 1 : 0;
    if (n > cfg.n_chargers) throw std::invalid_argument("allocation exceeds charger count");
  }
}

std::vector<std::vector<char>> fix_allocation(const StationConfig& cfg,
                                              const std::vector<EvWindow>& evs, int steps) {
  std::vector<std::vector<char>> connected(evs.size(), std::vector<char>(steps, 0));
  std::vector<double> e(evs.size());
  for (size_t w = 0; w < evs.size(); ++w) e[w] = evs[w].e0;
  for (int tau = 0; tau < steps; ++tau) {
    std::vector<int> present;
    for (size_t w = 0; w < evs.size(); ++w)
      if (evs[w].t_start <= tau && tau < evs[w].t_end) present.push_back(static_cast<int>(w));
    auto urgency = [&](int w) { return std::max(0.0, evs[w].e_tgt - e[w]) / (evs[w].t_end - tau); };
    std::sort(present.begin(), present.end(), [&](int a, int b) {
      double ua = urgency(a), ub = urgency(b);
      if (ua != ub) return ua > ub;
      if (evs[a].t_end != evs[b].t_end) return evs[a].t_end < evs[b].t_end;
      return evs[a].id < evs[b].id;
    });
    int take = std::min<int>(cfg.n_chargers, static_cast<int>(present.size()));
    for (int k = 0; k < take; ++k) {
      int w = present[k];
      connected[w][tau] = 1;
      e[w] = std::max(e[w], std::min(evs[w].e_tgt, e[w] + cfg.a_max * cfg.dt_hours));
    }
  }
  return connected;
}

HorizonInstance build_instance(const Station& station, int steps,
                               const std::vector<EvRequest>& predicted) {
  HorizonInstance inst;
  inst.cfg = station.config();
  inst.tariff = station.tariff();
  inst.t0 = station.step();
  inst.steps = std::min(steps, station.total_steps() - station.step());
  if (inst.steps < 1) inst.steps = 1;
  inst.incumbent_peaks = station.peaks();

  const auto& sessions = station.sessions();
  for (int h = 0; h < static_cast<int>(sessions.size()); ++h) {
    const EvSession& s = sessions[h];
    if (!s.present()) continue;
    EvWindow w;
    w.handle = h;
    w.id = s.request.id;
    w.t_start = 0;
    w.t_end = std::min(s.request.t_d - inst.t0, inst.steps);
    if (w.t_end < 1) w.t_end = 1;  // departures settle after this step's action
    w.e0 = s.e;
    w.e_tgt = s.request.e_tgt;
    inst.evs.push_back(w);
  }
  for (const EvRequest& r : predicted) {
    if (r.t_a < inst.t0 || r.t_a >= inst.t0 + inst.steps) continue;
    EvWindow w;
    w.handle = -1;
    w.id = r.id;
    w.t_start = r.t_a - inst.t0;
    w.t_end = std::min(r.t_d - inst.t0, inst.steps);
    if (w.t_end <= w.t_start) continue;  // no controllable step inside the window
    w.e0 = r.e_ini;
    w.e_tgt = r.e_tgt;
    inst.evs.push_back(w);
  }
  inst.connected = fix_allocation(inst.cfg, inst.evs, inst.steps);
  inst.validate();
  return inst;
}

namespace {

struct Columns {
  // var indices per (ev, local step); -1 when not connected
  std::vector<std::vector<int>> plus, minus;
  std::vector<int> slack;          // per ev
  std::vector<int> peak;           // per period, -1 if unused
};

Columns layout(const HorizonInstance& inst, LinearProgram& lp) {
  const StationConfig& cfg = inst.cfg;
  const Tariff& tariff = inst.tariff;
  double dt = cfg.dt_hours;
  double scale = cfg.demand_scale(tariff);
  size_t n_ev = inst.evs.size();

  Columns col;
  col.plus.assign(n_ev, std::vector<int>(inst.steps, -1));
  col.minus.assign(n_ev, std::vector<int>(inst.steps, -1));
  col.slack.assign(n_ev, -1);
  col.peak.assign(tariff.n_periods(), -1);

  for (size_t w = 0; w < n_ev; ++w) {
    std::string tag = "ev" + std::to_string(inst.evs[w].id);
    for (int tau = 0; tau < inst.steps; ++tau) {
      if (!inst.connected[w][tau]) continue;
      int h = inst.period_of_local(tau);
      col.plus[w][tau] = lp.add_var(tag + "_p" + std::to_string(tau),
                                    dt * (tariff.p_c - tariff.p_e[h]), cfg.a_max);
      col.minus[w][tau] = lp.add_var(tag + "_m" + std::to_string(tau),
                                     dt * (tariff.p_e[h] - tariff.p_d), -cfg.a_min);
    }
    col.slack[w] = lp.add_var(tag + "_pen", -1.0);
  }
  for (int tau = 0; tau < inst.steps; ++tau) {
    int h = inst.period_of_local(tau);
    if (col.peak[h] != -1) continue;
    bool used = false;
    for (size_t w = 0; w < n_ev && !used; ++w) used = inst.connected[w][tau];
    if (used)
      col.peak[h] = lp.add_var("peak" + std::to_string(h), -scale * tariff.p_l[h]);
  }
  return col;
}

}  // namespace

LinearProgram build_lp(const HorizonInstance& inst) {
  inst.validate();
  const StationConfig& cfg = inst.cfg;
  double dt = cfg.dt_hours;
  LinearProgram lp;
  Columns col = layout(inst, lp);

  for (size_t w = 0; w < inst.evs.size(); ++w) {
    const EvWindow& ev = inst.evs[w];
    // energy prefix bounds at every connected step
    std::vector<std::pair<int, double>> prefix;
    for (int tau = 0; tau < inst.steps; ++tau) {
      if (!inst.connected[w][tau]) continue;
      prefix.emplace_back(col.plus[w][tau], dt);
      prefix.emplace_back(col.minus[w][tau], -dt);
      lp.add_row(prefix, cfg.e_max - ev.e0);
      std::vector<std::pair<int, double>> neg;
      for (auto [j, v] : prefix) neg.emplace_back(j, -v);
      lp.add_row(neg, ev.e0 - cfg.e_min);
    }
    // shortfall slack covers whatever the final energy misses
    std::vector<std::pair<int, double>> pen;
    for (auto [j, v] : prefix) pen.emplace_back(j, -cfg.mu * v);
    pen.emplace_back(col.slack[w], -1.0);
    lp.add_row(pen, -cfg.mu * (ev.e_tgt - ev.e0));
  }

  // station draw never tops the peak variable; incumbents come in on the rhs
  for (int tau = 0; tau < inst.steps; ++tau) {
    int h = inst.period_of_local(tau);
    if (col.peak[h] == -1) continue;
    std::vector<std::pair<int, double>> row;
    for (size_t w = 0; w < inst.evs.size(); ++w) {
      if (!inst.connected[w][tau]) continue;
      row.emplace_back(col.plus[w][tau], 1.0);
      row.emplace_back(col.minus[w][tau], -1.0);
    }
    if (row.empty()) continue;
    row.emplace_back(col.peak[h], -1.0);
    lp.add_row(row, inst.incumbent_peaks[h]);
  }
  return lp;
}

HorizonSolution solve_instance(const HorizonInstance& inst) {
  LinearProgram lp = build_lp(inst);
  HorizonSolution sol;
  sol.power.assign(inst.evs.size(), std::vector<double>(inst.steps, 0.0));
  if (lp.n_vars() == 0) {
    sol.ok = true;
    return sol;
  }
  LpSolution raw = solve_lp(lp);
  if (raw.status != LpStatus::Optimal) return sol;
  sol.ok = true;
  sol.objective = raw.objective;

  // reconstruct column indices the same way layout() assigned them
  Columns col = [&] {
    LinearProgram scratch;
    return layout(inst, scratch);
  }();
  for (size_t w = 0; w < inst.evs.size(); ++w)
    for (int tau = 0; tau < inst.steps; ++tau)
      if (col.plus[w][tau] != -1)
        sol.power[w][tau] = raw.x[col.plus[w][tau]] - raw.x[col.minus[w][tau]];
  return sol;
}

}  // namespace evcs
