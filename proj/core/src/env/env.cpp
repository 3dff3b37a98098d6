#include "transit/env/env.hpp"

#include <cmath>
#include <stdexcept>

namespace transit::env {

Eigen::MatrixXd EventGraph::event_matrix() const {
  Eigen::MatrixXd m(7, events.size());
  for (std::size_t i = 0; i < events.size(); ++i)
    m.col(static_cast<Eigen::Index>(i)) = events[i].features();
  return m;
}

Observation observe(const sim::SimState& state, int bus_id) {
  const auto& bus = state.buses.at(bus_id);
  const auto& ctx = bus.last_arrival;
  if (!ctx.valid || ctx.arrival_time_s != state.clock_s)
    throw std::logic_error("observe: bus is not at a decision point");

  Observation obs;
  const auto h = sim::project_headways(state, bus_id);
  obs.h_fwd_s = h.forward_s;
  obs.h_bwd_s = h.backward_s;
  obs.onboard = ctx.onboard_after_alight;
  obs.waiting = ctx.waiting_before_board;

  const double h0 = state.route.dispatch_headway_mean_s;
  const double cap = static_cast<double>(state.cfg.capacity);
  obs.normalized << obs.h_fwd_s / h0, obs.h_bwd_s / h0, obs.onboard / cap,
      obs.waiting / cap;
  if (!obs.normalized.allFinite())
    throw std::runtime_error("observe: non-finite observation");
  return obs;
}

RewardRecord compute_reward(const sim::SimState& state, double action,
                            double balance_w) {
  if (action < 0.0 || action > 1.0)
    throw std::invalid_argument("compute_reward: action outside [0,1]");
  RewardRecord rec;
  rec.cv2 = sim::fleet_cv2(state);
  rec.a = action;
  rec.w = balance_w;
  rec.r = -(1.0 - balance_w) * rec.cv2 - balance_w * action;
  return rec;
}

EventGraph collect_events(const std::vector<DecisionRecord>& log, int ego_bus,
                          int ego_stop, const Eigen::Vector4d& ego_state,
                          double ego_action, double t_prev, double t_now,
                          int n_stops, double headway_mean_s) {
  if (t_prev >= t_now)
    throw std::invalid_argument("collect_events: need t_prev < t_now");
  EventGraph g;
  g.ego << ego_state(0), ego_state(1), ego_state(2), ego_state(3), ego_action;
  for (const auto& d : log) {
    if (d.bus_id == ego_bus) continue;
    if (d.time_s <= t_prev || d.time_s > t_now) continue;
    EventNode node;
    node.state = d.norm_state;
    node.action = d.action;
    node.d_stop =
        static_cast<double>(d.stop_index - ego_stop) / static_cast<double>(n_stops);
    node.d_time = (d.time_s - t_prev) / headway_mean_s;
    g.events.push_back(node);
  }
  return g;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t threshold_b,
                           std::size_t minibatch_c)
    : capacity_(capacity), threshold_b_(threshold_b), minibatch_c_(minibatch_c) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity 0");
  storage_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Experience exp) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(exp));
  } else {
    storage_[write_pos_] = std::move(exp);  // overwrite oldest
    write_pos_ = (write_pos_ + 1) % capacity_;
  }
  ++total_pushed_;
}

std::vector<Experience> ReplayBuffer::sample(Rng& rng, std::size_t c) const {
  std::vector<Experience> out;
  if (storage_.size() <= threshold_b_) return out;
  const std::size_t n = storage_.size();
  const std::size_t take = std::min(c, n);
  // partial Fisher-Yates over indices: uniform without replacement
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
    out.push_back(storage_[idx[i]]);
  }
  return out;
}

}  // namespace transit::env
