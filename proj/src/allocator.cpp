#include "evcs/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace evcs {

std::vector<int> AllocationDecision::connected_handles() const {
  std::vector<int> out;
  for (size_t i = 0; i < handles.size(); ++i)
    if (connect[i]) out.push_back(handles[i]);
  return out;
}

std::vector<double> allocation_features(const Station& station, int handle) {
  const EvSession& s = station.sessions()[handle];
  if (!s.present()) throw std::logic_error("scoring a session that is not present");
  const StationConfig& cfg = station.config();
  int t_r = std::max(0, s.request.t_d - station.step());
  return build_features(cfg, station.tariff(), true, station.step(), t_r, s.e,
                        s.request.e_tgt - s.e, station.prev_wait(), station.current_peak());
}

AllocationDecision allocate(const Station& station, const QNet& net) {
  AllocationDecision d;
  const auto& sessions = station.sessions();
  for (int h = 0; h < static_cast<int>(sessions.size()); ++h)
    if (sessions[h].present()) d.handles.push_back(h);
  int n = static_cast<int>(d.handles.size());
  int want = std::min(station.config().n_chargers, n);
  d.connect.assign(n, 0);
  d.q_connect.assign(n, 0.0);
  d.q_wait.assign(n, 0.0);
  if (n == 0) return d;

  const StationConfig& cfg = station.config();
  std::vector<std::vector<double>> features;
  std::vector<ActionBounds> bounds;
  features.reserve(n);
  bounds.reserve(n);
  size_t rows = 0;
  for (int h : d.handles) {
    features.push_back(allocation_features(station, h));
    bounds.push_back(station.feasible_for_energy(sessions[h].e));
    rows += bounds.back().count(cfg.delta_a);
  }

  // one batched pass scores every feasible action of every vehicle; the zero
  // action sits on every grid, so q_wait falls out of the same rows
  int dim = net.input_dim();
  Eigen::MatrixXd X(rows, dim);
  size_t row = 0;
  for (int i = 0; i < n; ++i) {
    int m = bounds[i].count(cfg.delta_a);
    for (int k = 0; k < m; ++k) {
      for (int c = 0; c + 1 < dim; ++c) X(row, c) = features[i][c];
      X(row, dim - 1) = bounds[i].at(k, cfg.delta_a) / cfg.a_max;
      ++row;
    }
  }
  Eigen::VectorXd q = net.forward(X);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> gap(n);
  row = 0;
  for (int i = 0; i < n; ++i) {
    int m = bounds[i].count(cfg.delta_a);
    double best_a = bounds[i].at(0, cfg.delta_a);
    double best_q = q(row);
    double zero_q = 0.0;
    bool saw_zero = false;
    for (int k = 0; k < m; ++k) {
      double a = bounds[i].at(k, cfg.delta_a);
      if (k > 0 && q_action_better(q(row + k), a, best_q, best_a)) {
        best_q = q(row + k);
        best_a = a;
      }
      if (std::abs(a) < 1e-12) {
        zero_q = q(row + k);
        saw_zero = true;
      }
    }
    if (!saw_zero) throw std::logic_error("feasible grid is missing the zero action");
    row += m;
    d.q_connect[i] = best_q;
    d.q_wait[i] = zero_q;
    gap[i] = best_q - zero_q;
  }
  // largest connect-wait gap wins a charger; ties go to the lower vehicle id
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (gap[a] != gap[b]) return gap[a] > gap[b];
    return sessions[d.handles[a]].request.id < sessions[d.handles[b]].request.id;
  });
  for (int k = 0; k < want; ++k) d.connect[order[k]] = 1;
  for (int i = 0; i < n; ++i) d.objective += d.connect[i] ? d.q_connect[i] : d.q_wait[i];
  return d;
}

}  // namespace evcs
