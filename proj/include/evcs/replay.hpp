#pragma once

#include <cstddef>
#include <mutex>
#include <vector>

#include "evcs/actions.hpp"
#include "evcs/rng.hpp"

namespace evcs {

// One charger-level experience. State vectors hold normalized features
// (without the action input); feasible_next is the successor's action grid so
// the bootstrap maximization exactly matches what the charger could do.
struct Transition {
  std::vector<double> s;
  double a = 0.0;  // kW
  double r = 0.0;
  std::vector<double> s_next;
  bool terminal = false;
  ActionBounds feasible_next;
};

// Fixed-capacity FIFO experience store shared by every charger agent.
// push/sample/size are safe to call concurrently.
class ReplayMemory {
 public:
  explicit ReplayMemory(size_t capacity);

  void push(Transition t);
  size_t size() const;
  size_t capacity() const { return capacity_; }

  // Uniform sample without replacement; requires k <= size. Returned batch
  // is in insertion order, oldest first.
  std::vector<Transition> sample(size_t k, Rng& rng) const;

  const Transition& at(size_t i) const;  // i in insertion order

 private:
  size_t capacity_;
  size_t head_ = 0;  // next slot to overwrite once full
  std::vector<Transition> store_;
  mutable std::mutex mutex_;
};

}  // namespace evcs
