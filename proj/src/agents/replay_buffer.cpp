#include "costreg/agents/replay_buffer.hpp"

#include "costreg/errors.hpp"

namespace costreg::agents {

Batch make_batch(const std::vector<Transition>& transitions) {
  if (transitions.empty()) throw ConfigurationError("empty batch");
  const auto n = static_cast<Eigen::Index>(transitions.size());
  const auto obs_dim = transitions.front().observation.size();
  const auto act_dim = transitions.front().action.size();
  Batch b{Matrix(obs_dim, n), Matrix(act_dim, n), Vector(n), Vector(n), Matrix(obs_dim, n), Vector(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& t = transitions[static_cast<std::size_t>(j)];
    if (t.observation.size() != obs_dim || t.next_observation.size() != obs_dim || t.action.size() != act_dim)
      throw ConfigurationError("transitions in a batch must share dimensions");
    b.observations.col(j) = t.observation;
    b.actions.col(j) = t.action;
    b.rewards[j] = t.reward;
    b.costs[j] = t.cost;
    b.next_observations.col(j) = t.next_observation;
    b.done[j] = t.done ? 1.0 : 0.0;
  }
  return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, int observation_size, int action_size)
    : capacity_(capacity), obs_dim_(observation_size), act_dim_(action_size) {
  if (capacity_ == 0) throw ConfigurationError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  if (t.observation.size() != obs_dim_ || t.next_observation.size() != obs_dim_ || t.action.size() != act_dim_)
    throw ConfigurationError("transition dimensions do not match the replay buffer");
  const std::size_t width = record_width();
  if (data_.size() < (next_ + 1) * width) data_.resize((next_ + 1) * width);
  double* p = data_.data() + next_ * width;
  for (int i = 0; i < obs_dim_; ++i) *p++ = t.observation[i];
  for (int i = 0; i < act_dim_; ++i) *p++ = t.action[i];
  *p++ = t.reward;
  *p++ = t.cost;
  for (int i = 0; i < obs_dim_; ++i) *p++ = t.next_observation[i];
  *p++ = t.done ? 1.0 : 0.0;
  next_ = (next_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

void ReplayBuffer::read_into(std::size_t slot, Batch& b, Eigen::Index j) const {
  const double* p = data_.data() + slot * record_width();
  for (int i = 0; i < obs_dim_; ++i) b.observations(i, j) = *p++;
  for (int i = 0; i < act_dim_; ++i) b.actions(i, j) = *p++;
  b.rewards[j] = *p++;
  b.costs[j] = *p++;
  for (int i = 0; i < obs_dim_; ++i) b.next_observations(i, j) = *p++;
  b.done[j] = *p++;
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw ConfigurationError("replay buffer index out of range");
  const std::size_t oldest = size_ < capacity_ ? 0 : next_;
  Batch b{Matrix(obs_dim_, 1), Matrix(act_dim_, 1), Vector(1), Vector(1), Matrix(obs_dim_, 1), Vector(1)};
  read_into((oldest + i) % capacity_, b, 0);
  return Transition{b.observations.col(0), b.actions.col(0), b.rewards[0], b.costs[0], b.next_observations.col(0),
                    b.done[0] != 0.0};
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (size_ == 0) throw ConfigurationError("cannot sample from an empty replay buffer");
  if (batch_size == 0) throw ConfigurationError("batch size must be positive");
  const auto n = static_cast<Eigen::Index>(batch_size);
  Batch b{Matrix(obs_dim_, n), Matrix(act_dim_, n), Vector(n), Vector(n), Matrix(obs_dim_, n), Vector(n)};
  for (Eigen::Index j = 0; j < n; ++j) read_into(static_cast<std::size_t>(rng.below(size_)), b, j);
  return b;
}

}  // namespace costreg::agents
