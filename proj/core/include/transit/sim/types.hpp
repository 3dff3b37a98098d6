#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "transit/rng.hpp"

namespace transit::sim {

// Physical constants of the service. Times in seconds, speeds in km/h,
// positions in km.
struct SimConfig {
  double alight_time_per_pax = 1.8;
  double board_time_per_pax = 3.0;
  double nominal_speed_kmh = 30.0;
  double speed_noise_lo = 0.6;
  double speed_noise_hi = 1.2;
  int capacity = 120;
  double tick_s = 1.0;
  double horizon_s = 14400.0;

  void validate() const;
};

struct RouteSpec {
  std::vector<double> stops_km;  // ascending, last == route_length_km
  int n_services = 2;
  double dispatch_headway_mean_s = 600.0;
  double dispatch_headway_std_s = 0.0;
  double route_length_km = 0.0;

  int n_stops() const { return static_cast<int>(stops_km.size()); }
  void validate() const;
};

// Origin-destination arrival rates in pax/hour. Forward travel only:
// rates[i][j] == 0 whenever j <= i.
class DemandMatrix {
 public:
  DemandMatrix() = default;
  explicit DemandMatrix(std::vector<std::vector<double>> rates);

  int n_stops() const { return static_cast<int>(rates_.size()); }
  double rate(int origin, int dest) const { return rates_[origin][dest]; }
  const std::vector<std::vector<double>>& rates() const { return rates_; }

  DemandMatrix scaled(double factor) const;
  double total_rate() const;

 private:
  std::vector<std::vector<double>> rates_;
};

enum class BusPhase { WaitingDispatch, Cruising, Dwelling, Holding, Finished };

const char* to_string(BusPhase phase);

struct OnboardPax {
  int dest;
  double board_time_s;
};

struct WaitingPax {
  int dest;
  double arrive_time_s;
};

// Snapshot taken when a bus reaches a stop; this is the decision-point
// context the environment observes.
struct ArrivalContext {
  int stop_index = -1;
  double arrival_time_s = 0.0;
  int n_alight = 0;
  int n_board = 0;
  int onboard_after_alight = 0;
  int waiting_before_board = 0;
  int left_behind = 0;
  bool valid = false;
};

struct BusState {
  int id = 0;
  BusPhase phase = BusPhase::WaitingDispatch;
  double position_km = 0.0;
  double link_speed_kmh = 0.0;
  std::vector<OnboardPax> occupancy;
  int next_stop = 0;
  double dwell_end_s = 0.0;
  double phase_end_s = 0.0;  // departure time = dwell_end + hold
  double hold_s = 0.0;
  double cumulative_hold_s = 0.0;
  double dispatch_time_s = 0.0;  // scheduled
  double start_time_s = -1.0;    // actual entry into service
  double finish_time_s = -1.0;
  bool completed_trip = false;  // reached the last stop before horizon cut
  ArrivalContext last_arrival;

  bool active() const {
    return phase != BusPhase::WaitingDispatch && phase != BusPhase::Finished;
  }
};

struct StopState {
  int index = 0;
  std::deque<WaitingPax> queue;
};

enum class SimEventKind { BusArrivedAtStop, BusDepartedStop, BusFinished };

struct SimEvent {
  SimEventKind kind;
  int bus_id;
  int stop_index;
  double time_s;
};

// Anomaly windows installed by the scenario layer and consulted by the
// tick loop. Speed multipliers revert exactly once the window closes.
struct InterruptionWindow {
  int bus_id;
  double factor;
  double start_s;
  double end_s;
};

struct SurgeWindow {
  int stop_index;
  int extra_pax;
  double start_s;
  double end_s;
};

// Aggregate per-episode passenger and operation samples used by metrics.
struct EpisodeStats {
  std::vector<double> wait_s;                  // per boarded passenger
  std::vector<double> journey_s;               // per completed trip
  std::vector<double> bus_travel_s;            // per completed bus run
  std::vector<double> occupancy_at_departure;  // per (bus, stop departure)
  std::vector<double> hold_s;                  // per holding decision
  std::int64_t spawned = 0;
  std::int64_t boarded = 0;
  std::int64_t alighted = 0;
};

struct RngStreams {
  Rng dispatch;
  Rng demand;
  Rng scenario;
  std::vector<Rng> per_bus_speed;
};

struct SimState {
  RouteSpec route;
  SimConfig cfg;
  DemandMatrix demand;

  double clock_s = 0.0;
  std::vector<BusState> buses;
  std::vector<StopState> stops;
  double speed_scale = 1.0;  // episode-level cruising-speed factor

  std::vector<InterruptionWindow> interruptions;
  std::vector<SurgeWindow> surges;

  EpisodeStats stats;
  RngStreams rngs;

  bool all_finished() const;
  std::int64_t waiting_count() const;
  std::int64_t onboard_count() const;
};

}  // namespace transit::sim
