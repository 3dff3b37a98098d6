#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "transit/sim/types.hpp"

namespace transit::sim {

// Builds an episode: buses scheduled with cumulative Gaussian headways
// (clamped 60 s apart), empty queues, clock at zero, independent RNG
// streams for dispatch, demand, scenario and per-bus link speeds.
SimState init_episode(const RouteSpec& route, const DemandMatrix& demand,
                      const SimConfig& cfg, std::uint64_t seed);

// Poisson arrivals for every OD pair over dt seconds.
void spawn_passengers(SimState& state, double dt, const DemandMatrix& demand,
                      Rng& rng);

double dwell_time(int n_alight, int n_board, const SimConfig& cfg);

struct BoardAlightResult {
  int n_alight = 0;
  int n_board = 0;
  int left_behind = 0;
};

// Alights everyone destined here, boards FIFO up to capacity, records the
// decision-point snapshot on the bus. Pre: bus is at the stop entering its
// dwell.
BoardAlightResult board_alight(SimState& state, int bus_id, int stop_index);

// Extends the stop time past the dwell. Pre: bus dwelling; 0 <= hold <= max.
void apply_holding(SimState& state, int bus_id, double hold_s,
                   double max_hold_s);

// One tick: spawn, dispatch, move, clamp followers, transition phases.
// Emitted events carry the post-advance clock.
void advance(SimState& state, std::vector<SimEvent>& events_out);

struct Headways {
  double forward_s;
  double backward_s;
};

// Time projections of the distance gaps at nominal speed; missing
// neighbours fall back to the schedule headway.
Headways project_headways(const SimState& state, int bus_id);

// Projected headways between consecutive active buses, leader first.
std::vector<double> fleet_headways(const SimState& state);

// Squared coefficient of variation of the instantaneous fleet headways,
// with the schedule headway as the fixed expectation.
double fleet_cv2(const SimState& state);

// Hash of the full dynamic state (including RNG streams); equal digests
// mean bitwise-equal episodes.
std::string state_digest(const SimState& state);

}  // namespace transit::sim
