#pragma once

#include <cstddef>
#include <vector>

#include "costreg/agents/transition.hpp"
#include "costreg/numeric/rng.hpp"

namespace costreg::agents {

/// Fixed-capacity ring of transitions with uniform sampling (with replacement).
/// Storage grows on demand up to the capacity, then the oldest entry is overwritten.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int observation_size, int action_size);

  void push(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }

  /// Entry i in insertion order, 0 being the oldest still stored.
  Transition at(std::size_t i) const;

  Batch sample(std::size_t batch_size, Rng& rng) const;

 private:
  std::size_t record_width() const { return 2 * obs_dim_ + act_dim_ + 3; }
  void read_into(std::size_t slot, Batch& batch, Eigen::Index column) const;

  std::size_t capacity_;
  int obs_dim_;
  int act_dim_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::vector<double> data_;  // record_width() doubles per slot
};

}  // namespace costreg::agents
