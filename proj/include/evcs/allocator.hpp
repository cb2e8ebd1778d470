#pragma once

#include <vector>

#include "evcs/qnet.hpp"
#include "evcs/station.hpp"

namespace evcs {

// Value-based allocation decision over all present vehicles. For vehicle i,
// q_connect is max_a Q(s_i | connected, a) over its feasible grid and q_wait
// is Q(s_i | connected, 0): the value of holding the vehicle at zero power.
// The chosen set maximizes sum of alpha_i q_connect_i + (1-alpha_i) q_wait_i
// subject to sum alpha_i = min(n_chargers, #present), achieved exactly by
// taking the largest connect-wait gaps.
struct AllocationDecision {
  std::vector<int> handles;  // present sessions, ascending handle order
  std::vector<char> connect;
  std::vector<double> q_connect;
  std::vector<double> q_wait;
  double objective = 0.0;

  std::vector<int> connected_handles() const;
};

// Scores with the waiting-area aggregates snapshotted at the end of the
// previous step, so every vehicle is scored against the same summary the
// step began with.
AllocationDecision allocate(const Station& station, const QNet& net);

// Hypothetical connected-state features for one present session.
std::vector<double> allocation_features(const Station& station, int handle);

}  // namespace evcs
