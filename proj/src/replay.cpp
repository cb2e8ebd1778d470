#include "evcs/replay.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace evcs {

ReplayMemory::ReplayMemory(size_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("replay capacity must be >= 1");
  store_.reserve(std::min<size_t>(capacity, 1 << 16));
}

void ReplayMemory::push(Transition t) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (store_.size() < capacity_) {
    store_.push_back(std::move(t));
  } else {
    store_[head_] = std::move(t);  // overwrite oldest
    head_ = (head_ + 1) % capacity_;
  }
}

size_t ReplayMemory::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return store_.size();
}

const Transition& ReplayMemory::at(size_t i) const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (i >= store_.size()) throw std::out_of_range("replay index");
  return store_[(head_ + i) % store_.size()];
}

std::vector<Transition> ReplayMemory::sample(size_t k, Rng& rng) const {
  std::lock_guard<std::mutex> lock(mutex_);
  size_t n = store_.size();
  if (k > n) throw std::logic_error("cannot sample more transitions than stored");
  // Floyd's sampling: k uniform draws without replacement in O(k)
  std::unordered_set<size_t> picked;
  picked.reserve(k * 2);
  for (size_t i = n - k; i < n; ++i) {
    size_t j = std::uniform_int_distribution<size_t>(0, i)(rng);
    if (!picked.insert(j).second) picked.insert(i);
  }
  std::vector<size_t> idx(picked.begin(), picked.end());
  std::sort(idx.begin(), idx.end());  // deterministic batch order
  std::vector<Transition> out;
  out.reserve(k);
  for (size_t i : idx) out.push_back(store_[(head_ + i) % n]);
  return out;
}

}  // namespace evcs
