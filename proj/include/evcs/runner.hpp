#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "evcs/station.hpp"

namespace evcs {

// A deployed per-step controller: pick who gets a charger, then pick powers.
// begin_episode hands over the full request list (only clairvoyant policies
// may look past station.step()) and a seed for any internal randomness.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual void begin_episode(const Station& station, const std::vector<EvRequest>& requests,
                             uint64_t seed) {
    (void)station;
    (void)requests;
    (void)seed;
  }
  virtual std::vector<int> choose_connected(Station& station) = 0;
  virtual std::vector<double> choose_actions(Station& station) = 0;
};

struct EpisodeOutcome {
  Ledger ledger;
  double reward_sum = 0.0;  // sum of all per-charger reward parts
  std::vector<double> power_by_period;  // summed station draw per TOU period
  std::vector<int> steps_by_period;
};

// Optional per-step CSV sinks. `trace` gets one row per step (actions, reward
// parts, peaks, running ledger); `soc` gets one row per present session per
// step for state-of-charge inspection.
struct TraceSinks {
  std::ostream* trace = nullptr;
  std::ostream* soc = nullptr;
};

EpisodeOutcome run_episode(Station& station, std::vector<EvRequest> requests, Policy& policy,
                           uint64_t seed, const TraceSinks& sinks = {});

}  // namespace evcs
