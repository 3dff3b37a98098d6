#include "transit/sim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "transit/metrics/metrics.hpp"
#include "transit/sha1.hpp"

namespace transit::sim {

namespace {
constexpr double kFollowGapKm = 0.001;  // 1 m, no-overtaking clearance

double effective_speed_multiplier(const SimState& state, int bus_id) {
  double m = 1.0;
  for (const auto& w : state.interruptions)
    if (w.bus_id == bus_id && state.clock_s >= w.start_s &&
        state.clock_s < w.end_s)
      m *= w.factor;
  return m;
}

// Most recent predecessor still on the road, or -1.
int active_leader(const SimState& state, int bus_id) {
  for (int j = bus_id - 1; j >= 0; --j)
    if (state.buses[j].active()) return j;
  return -1;
}

int active_follower(const SimState& state, int bus_id) {
  for (int j = bus_id + 1; j < static_cast<int>(state.buses.size()); ++j)
    if (state.buses[j].active()) return j;
  return -1;
}

void inject_surge(SimState& state, int stop_index, double now_s) {
  auto& stop = state.stops[stop_index];
  const int n = state.route.n_stops();
  for (const auto& s : state.surges) {
    if (s.stop_index != stop_index || now_s < s.start_s || now_s >= s.end_s)
      continue;
    if (stop_index >= n - 1) continue;  // no downstream destination exists
    // destination weights follow the stop's outbound rates; an all-zero row
    // falls back to uniform over downstream stops
    std::vector<double> weights(n, 0.0);
    double total = 0.0;
    for (int j = stop_index + 1; j < n; ++j) {
      weights[j] = state.demand.rate(stop_index, j);
      total += weights[j];
    }
    if (total <= 0.0) {
      for (int j = stop_index + 1; j < n; ++j) weights[j] = 1.0;
      total = static_cast<double>(n - 1 - stop_index);
    }
    for (int p = 0; p < s.extra_pax; ++p) {
      double u = state.rngs.scenario.uniform() * total;
      int dest = n - 1;
      for (int j = stop_index + 1; j < n; ++j) {
        if (u < weights[j]) {
          dest = j;
          break;
        }
        u -= weights[j];
      }
      stop.queue.push_back({dest, now_s});
      ++state.stats.spawned;
    }
  }
}

void draw_link_speed(SimState& state, BusState& bus) {
  const double noise = state.rngs.per_bus_speed[bus.id].uniform(
      state.cfg.speed_noise_lo, state.cfg.speed_noise_hi);
  bus.link_speed_kmh = state.cfg.nominal_speed_kmh * noise * state.speed_scale;
}

void finish_bus(SimState& state, BusState& bus, double now_s, bool completed,
                std::vector<SimEvent>& events) {
  bus.phase = BusPhase::Finished;
  bus.finish_time_s = now_s;
  bus.completed_trip = completed;
  if (completed && bus.start_time_s >= 0.0)
    state.stats.bus_travel_s.push_back(now_s - bus.start_time_s);
  events.push_back({SimEventKind::BusFinished, bus.id,
                    bus.next_stop < state.route.n_stops() ? bus.next_stop : -1,
                    now_s});
}

// Arrival at a stop: surge injection, alight/board, dwell setup. At the
// last stop the bus retires immediately after alighting.
void handle_arrival(SimState& state, BusState& bus, int stop_index,
                    double now_s, std::vector<SimEvent>& events) {
  bus.position_km = state.route.stops_km[stop_index];
  bus.next_stop = stop_index;
  inject_surge(state, stop_index, now_s);
  events.push_back(
      {SimEventKind::BusArrivedAtStop, bus.id, stop_index, now_s});

  const auto counts = board_alight(state, bus.id, stop_index);
  if (stop_index == state.route.n_stops() - 1) {
    finish_bus(state, bus, now_s, /*completed=*/true, events);
    return;
  }
  bus.phase = BusPhase::Dwelling;
  bus.hold_s = 0.0;
  bus.dwell_end_s =
      now_s + dwell_time(counts.n_alight, counts.n_board, state.cfg);
  bus.phase_end_s = bus.dwell_end_s;
}

void depart(SimState& state, BusState& bus, double now_s,
            std::vector<SimEvent>& events) {
  // passengers who turned up during the dwell/hold board before the doors
  // close; a bus with room at departure never stranded anyone at arrival,
  // so left-behind passengers still wait for the next service
  auto& queue = state.stops[bus.next_stop].queue;
  while (!queue.empty() &&
         static_cast<int>(bus.occupancy.size()) < state.cfg.capacity) {
    const WaitingPax pax = queue.front();
    queue.pop_front();
    bus.occupancy.push_back({pax.dest, now_s});
    state.stats.wait_s.push_back(now_s - pax.arrive_time_s);
    ++state.stats.boarded;
  }

  state.stats.occupancy_at_departure.push_back(
      static_cast<double>(bus.occupancy.size()));
  events.push_back(
      {SimEventKind::BusDepartedStop, bus.id, bus.next_stop, now_s});
  bus.phase = BusPhase::Cruising;
  bus.next_stop += 1;
  draw_link_speed(state, bus);
}

}  // namespace

void SimConfig::validate() const {
  if (alight_time_per_pax <= 0 || board_time_per_pax <= 0 ||
      nominal_speed_kmh <= 0 || tick_s <= 0 || horizon_s <= 0)
    throw std::invalid_argument("SimConfig: all values must be positive");
  if (speed_noise_lo <= 0 || speed_noise_lo >= speed_noise_hi)
    throw std::invalid_argument("SimConfig: need 0 < noise_lo < noise_hi");
  if (capacity < 1) throw std::invalid_argument("SimConfig: capacity >= 1");
}

void RouteSpec::validate() const {
  if (stops_km.size() < 2)
    throw std::invalid_argument("RouteSpec: need at least two stops");
  for (std::size_t i = 1; i < stops_km.size(); ++i)
    if (stops_km[i] <= stops_km[i - 1])
      throw std::invalid_argument("RouteSpec: stop positions must ascend");
  if (stops_km.front() < 0)
    throw std::invalid_argument("RouteSpec: negative stop position");
  if (std::abs(stops_km.back() - route_length_km) > 1e-9)
    throw std::invalid_argument("RouteSpec: last stop must sit at the route end");
  if (n_services < 2)
    throw std::invalid_argument("RouteSpec: need at least two services");
  if (dispatch_headway_mean_s <= 0 || dispatch_headway_std_s < 0)
    throw std::invalid_argument("RouteSpec: bad headway parameters");
}

DemandMatrix::DemandMatrix(std::vector<std::vector<double>> rates)
    : rates_(std::move(rates)) {
  const int n = static_cast<int>(rates_.size());
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rates_[i].size()) != n)
      throw std::invalid_argument("DemandMatrix: matrix must be square");
    for (int j = 0; j < n; ++j) {
      if (rates_[i][j] < 0)
        throw std::invalid_argument("DemandMatrix: negative rate");
      if (j <= i && rates_[i][j] != 0.0)
        throw std::invalid_argument(
            "DemandMatrix: passengers travel forward (rates[i][j]=0 for j<=i)");
    }
  }
}

DemandMatrix DemandMatrix::scaled(double factor) const {
  if (factor < 0) throw std::invalid_argument("DemandMatrix: negative scale");
  auto rates = rates_;
  for (auto& row : rates)
    for (auto& r : row) r *= factor;
  return DemandMatrix(std::move(rates));
}

double DemandMatrix::total_rate() const {
  double t = 0.0;
  for (const auto& row : rates_)
    for (double r : row) t += r;
  return t;
}

const char* to_string(BusPhase phase) {
  switch (phase) {
    case BusPhase::WaitingDispatch: return "waiting-dispatch";
    case BusPhase::Cruising: return "cruising";
    case BusPhase::Dwelling: return "dwelling";
    case BusPhase::Holding: return "holding";
    case BusPhase::Finished: return "finished";
  }
  return "?";
}

bool SimState::all_finished() const {
  for (const auto& b : buses)
    if (b.phase != BusPhase::Finished) return false;
  return true;
}

std::int64_t SimState::waiting_count() const {
  std::int64_t n = 0;
  for (const auto& s : stops) n += static_cast<std::int64_t>(s.queue.size());
  return n;
}

std::int64_t SimState::onboard_count() const {
  std::int64_t n = 0;
  for (const auto& b : buses)
    n += static_cast<std::int64_t>(b.occupancy.size());
  return n;
}

SimState init_episode(const RouteSpec& route, const DemandMatrix& demand,
                      const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  route.validate();
  if (demand.n_stops() != route.n_stops())
    throw std::invalid_argument("init_episode: demand size != stop count");

  SimState state;
  state.route = route;
  state.cfg = cfg;
  state.demand = demand;
  state.clock_s = 0.0;

  state.rngs.dispatch = Rng(derive_seed(seed, 1));
  state.rngs.demand = Rng(derive_seed(seed, 2));
  state.rngs.scenario = Rng(derive_seed(seed, 3));
  state.rngs.per_bus_speed.reserve(route.n_services);
  for (int i = 0; i < route.n_services; ++i)
    state.rngs.per_bus_speed.emplace_back(derive_seed(seed, 100 + i));

  state.stops.resize(route.n_stops());
  for (int i = 0; i < route.n_stops(); ++i) state.stops[i].index = i;

  state.buses.resize(route.n_services);
  double t = 0.0;
  for (int i = 0; i < route.n_services; ++i) {
    auto& bus = state.buses[i];
    bus.id = i;
    bus.phase = BusPhase::WaitingDispatch;
    bus.position_km = route.stops_km.front();
    bus.next_stop = 0;
    if (i > 0) {
      const double gap = state.rngs.dispatch.normal(
          route.dispatch_headway_mean_s, route.dispatch_headway_std_s);
      t += std::max(60.0, gap);
    }
    bus.dispatch_time_s = t;
  }
  return state;
}

void spawn_passengers(SimState& state, double dt, const DemandMatrix& demand,
                      Rng& rng) {
  if (dt <= 0) throw std::invalid_argument("spawn_passengers: dt must be > 0");
  const int n = demand.n_stops();
  const double now = state.clock_s;
  for (int i = 0; i < n; ++i) {
    auto& queue = state.stops[i].queue;
    for (int j = i + 1; j < n; ++j) {
      const double lambda = demand.rate(i, j) * dt / 3600.0;
      if (lambda <= 0.0) continue;
      const int k = rng.poisson(lambda);
      for (int p = 0; p < k; ++p) {
        queue.push_back({j, now});
        ++state.stats.spawned;
      }
    }
  }
}

double dwell_time(int n_alight, int n_board, const SimConfig& cfg) {
  if (n_alight < 0 || n_board < 0)
    throw std::invalid_argument("dwell_time: negative counts");
  return cfg.alight_time_per_pax * n_alight + cfg.board_time_per_pax * n_board;
}

BoardAlightResult board_alight(SimState& state, int bus_id, int stop_index) {
  auto& bus = state.buses.at(bus_id);
  auto& stop = state.stops.at(stop_index);
  const double now = state.clock_s;

  BoardAlightResult r;
  auto it = bus.occupancy.begin();
  while (it != bus.occupancy.end()) {
    if (it->dest == stop_index) {
      state.stats.journey_s.push_back(now - it->board_time_s);
      ++state.stats.alighted;
      ++r.n_alight;
      it = bus.occupancy.erase(it);
    } else {
      ++it;
    }
  }

  bus.last_arrival = ArrivalContext{};
  bus.last_arrival.stop_index = stop_index;
  bus.last_arrival.arrival_time_s = now;
  bus.last_arrival.n_alight = r.n_alight;
  bus.last_arrival.onboard_after_alight =
      static_cast<int>(bus.occupancy.size());
  bus.last_arrival.waiting_before_board = static_cast<int>(stop.queue.size());

  while (!stop.queue.empty() &&
         static_cast<int>(bus.occupancy.size()) < state.cfg.capacity) {
    const WaitingPax pax = stop.queue.front();
    stop.queue.pop_front();
    bus.occupancy.push_back({pax.dest, now});
    state.stats.wait_s.push_back(now - pax.arrive_time_s);
    ++state.stats.boarded;
    ++r.n_board;
  }
  r.left_behind = static_cast<int>(stop.queue.size());

  bus.last_arrival.n_board = r.n_board;
  bus.last_arrival.left_behind = r.left_behind;
  bus.last_arrival.valid = true;
  return r;
}

void apply_holding(SimState& state, int bus_id, double hold_s,
                   double max_hold_s) {
  auto& bus = state.buses.at(bus_id);
  if (bus.phase != BusPhase::Dwelling && bus.phase != BusPhase::Holding)
    throw std::logic_error("apply_holding: bus is not at a stop");
  if (hold_s < 0 || hold_s > max_hold_s)
    throw std::invalid_argument("apply_holding: hold outside [0, max]");
  bus.hold_s = hold_s;
  bus.cumulative_hold_s += hold_s;
  bus.phase_end_s = bus.dwell_end_s + hold_s;
  state.stats.hold_s.push_back(hold_s);
}

void advance(SimState& state, std::vector<SimEvent>& events_out) {
  if (state.clock_s >= state.cfg.horizon_s)
    throw std::logic_error("advance: past horizon");
  const double dt = state.cfg.tick_s;
  const double now = state.clock_s + dt;

  spawn_passengers(state, dt, state.demand, state.rngs.demand);
  state.clock_s = now;

  const double terminal_clear_km =
      state.route.stops_km.front() + kFollowGapKm;

  // One pass in dispatch order so each follower clamps against its
  // leader's position for this tick.
  for (auto& bus : state.buses) {
    switch (bus.phase) {
      case BusPhase::Finished:
        break;
      case BusPhase::WaitingDispatch: {
        if (bus.dispatch_time_s > now) break;
        const int leader = active_leader(state, bus.id);
        // hold at the terminal until the predecessor clears the berth
        if (leader >= 0 &&
            state.buses[leader].position_km < terminal_clear_km)
          break;
        bus.start_time_s = now;
        handle_arrival(state, bus, 0, now, events_out);
        break;
      }
      case BusPhase::Dwelling:
      case BusPhase::Holding: {
        if (now >= bus.phase_end_s) {
          depart(state, bus, now, events_out);
        } else if (now >= bus.dwell_end_s) {
          bus.phase = BusPhase::Holding;
        }
        break;
      }
      case BusPhase::Cruising: {
        const double mult = effective_speed_multiplier(state, bus.id);
        double pos =
            bus.position_km + bus.link_speed_kmh * mult * dt / 3600.0;
        const int leader = active_leader(state, bus.id);
        if (leader >= 0)
          pos = std::min(pos, state.buses[leader].position_km - kFollowGapKm);
        pos = std::max(pos, bus.position_km);  // clamping never moves us back
        const double stop_pos = state.route.stops_km[bus.next_stop];
        if (pos >= stop_pos) {
          handle_arrival(state, bus, bus.next_stop, now, events_out);
        } else {
          bus.position_km = pos;
        }
        break;
      }
    }
  }

  if (now >= state.cfg.horizon_s) {
    for (auto& bus : state.buses)
      if (bus.phase != BusPhase::Finished)
        finish_bus(state, bus, now, /*completed=*/false, events_out);
  }
}

Headways project_headways(const SimState& state, int bus_id) {
  const auto& bus = state.buses.at(bus_id);
  const double v = state.cfg.nominal_speed_kmh;
  const double sentinel = state.route.dispatch_headway_mean_s;
  Headways h{sentinel, sentinel};

  const int leader = active_leader(state, bus_id);
  if (leader >= 0)
    h.forward_s = std::max(
        0.0, (state.buses[leader].position_km - bus.position_km) / v * 3600.0);
  const int follower = active_follower(state, bus_id);
  if (follower >= 0)
    h.backward_s = std::max(
        0.0,
        (bus.position_km - state.buses[follower].position_km) / v * 3600.0);
  return h;
}

std::vector<double> fleet_headways(const SimState& state) {
  std::vector<double> gaps;
  const double v = state.cfg.nominal_speed_kmh;
  int prev = -1;
  for (const auto& bus : state.buses) {
    if (!bus.active()) continue;
    if (prev >= 0)
      gaps.push_back((state.buses[prev].position_km - bus.position_km) / v *
                     3600.0);
    prev = bus.id;
  }
  return gaps;
}

double fleet_cv2(const SimState& state) {
  return metrics::cv2(fleet_headways(state),
                      state.route.dispatch_headway_mean_s);
}

std::string state_digest(const SimState& state) {
  std::ostringstream os;
  os.precision(17);
  os << state.clock_s << '|' << state.speed_scale << '|';
  for (const auto& b : state.buses) {
    os << b.id << ',' << static_cast<int>(b.phase) << ',' << b.position_km
       << ',' << b.link_speed_kmh << ',' << b.next_stop << ','
       << b.dwell_end_s << ',' << b.phase_end_s << ',' << b.hold_s << ','
       << b.cumulative_hold_s << ',' << b.dispatch_time_s << ','
       << b.start_time_s << ',' << b.finish_time_s << ';';
    for (const auto& p : b.occupancy) os << p.dest << ':' << p.board_time_s
                                         << ' ';
    os << '|';
  }
  for (const auto& s : state.stops) {
    os << s.index << ';';
    for (const auto& p : s.queue) os << p.dest << ':' << p.arrive_time_s
                                     << ' ';
    os << '|';
  }
  os << state.stats.spawned << ',' << state.stats.boarded << ','
     << state.stats.alighted << '|';
  os << state.rngs.dispatch.engine() << '|' << state.rngs.demand.engine()
     << '|' << state.rngs.scenario.engine() << '|';
  for (const auto& r : state.rngs.per_bus_speed) os << r.engine() << '|';
  return Sha1::hex(os.str());
}

}  // namespace transit::sim
