#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "transit/rng.hpp"
#include "transit/sim/simulation.hpp"

namespace transit::env {

// Decision-point observation: headways plus local demand, with copies
// normalized by the schedule headway and the vehicle capacity.
struct Observation {
  double h_fwd_s = 0.0;
  double h_bwd_s = 0.0;
  int onboard = 0;
  int waiting = 0;
  Eigen::Vector4d normalized = Eigen::Vector4d::Zero();

  Eigen::Vector4d features() const { return normalized; }
};

struct ActionCmd {
  double a = 0.0;  // in [0, 1]
  double max_hold_s = 180.0;
  double hold_s() const { return a * max_hold_s; }
};

struct RewardRecord {
  double r = 0.0;
  double cv2 = 0.0;
  double a = 0.0;
  double w = 0.2;
};

// Another bus's decision inside the ego's decision interval, with its
// spatial/temporal offset relative to the ego.
struct EventNode {
  Eigen::Vector4d state;  // normalized observation of the other bus
  double action = 0.0;
  double d_stop = 0.0;  // signed stop offset / n_stops
  double d_time = 0.0;  // elapsed / schedule headway

  Eigen::Matrix<double, 7, 1> features() const {
    Eigen::Matrix<double, 7, 1> f;
    f << state(0), state(1), state(2), state(3), action, d_stop, d_time;
    return f;
  }
};

struct EventGraph {
  Eigen::Matrix<double, 5, 1> ego = Eigen::Matrix<double, 5, 1>::Zero();
  std::vector<EventNode> events;

  int event_count() const { return static_cast<int>(events.size()); }
  // event_dim x m column matrix for the attention aggregator
  Eigen::MatrixXd event_matrix() const;
};

struct Experience {
  Observation s;
  double a = 0.0;
  RewardRecord r;
  Observation s_next;
  EventGraph g;
};

// Decisions logged during an episode, the source for event graphs.
struct DecisionRecord {
  int bus_id;
  int stop_index;
  double time_s;
  Eigen::Vector4d norm_state;
  double action;
};

// Valid only at the tick a bus reaches a stop (its decision point).
Observation observe(const sim::SimState& state, int bus_id);

// r = -(1-w)*CV^2 - w*a at the reward instant.
RewardRecord compute_reward(const sim::SimState& state, double action,
                            double balance_w);

// Other buses' decisions in (t_prev, t_now], offsets relative to the ego
// decision at t_prev.
EventGraph collect_events(const std::vector<DecisionRecord>& log, int ego_bus,
                          int ego_stop, const Eigen::Vector4d& ego_state,
                          double ego_action, double t_prev, double t_now,
                          int n_stops, double headway_mean_s);

// Per-agent ring buffer; sampling yields nothing until the stored count
// exceeds the begin-training threshold.
class ReplayBuffer {
 public:
  ReplayBuffer() = default;
  ReplayBuffer(std::size_t capacity, std::size_t threshold_b,
               std::size_t minibatch_c);

  void push(Experience exp);
  std::vector<Experience> sample(Rng& rng) const { return sample(rng, minibatch_c_); }
  std::vector<Experience> sample(Rng& rng, std::size_t c) const;

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::int64_t total_pushed() const { return total_pushed_; }
  const Experience& at(std::size_t i) const { return storage_[i]; }

 private:
  std::size_t capacity_ = 0;
  std::size_t threshold_b_ = 0;
  std::size_t minibatch_c_ = 0;
  std::size_t write_pos_ = 0;
  std::int64_t total_pushed_ = 0;
  std::vector<Experience> storage_;
};

}  // namespace transit::env
