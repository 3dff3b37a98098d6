#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "test_support.hpp"
#include "transit/io/run_config.hpp"

using namespace transit;
using testsupport::desk_config;
using testsupport::desk_demand;
using testsupport::desk_route;

namespace {

sim::SimState fresh_state(std::uint64_t seed = 7) {
  return sim::init_episode(desk_route(), desk_demand(), desk_config(), seed);
}

// run until every bus is done, applying zero holds at decision points
void run_no_control(sim::SimState& state, std::vector<sim::SimEvent>* all_events= nullptr) {
  std::vector<sim::SimEvent> events;
  const int last = state.route.n_stops() - 1;
  while (state.clock_s < state.cfg.horizon_s && !state.all_finished()) {
    events.clear();
    sim::advance(state, events);
    for (const auto& ev : events) {
      if (ev.kind == sim::SimEventKind::BusArrivedAtStop &&
          ev.stop_index < last)
        sim::apply_holding(state, ev.bus_id, 0.0, 180.0);
      if (all_events) all_events->push_back(ev);
    }
  }
}

}  // namespace

TEST_CASE("init_episode schedules 59 services on the r1 fixture") {
  const auto rc =
      io::load_run_config(std::string(TRANSIT_FIXTURES_DIR) + "/r1.json");
  CHECK(rc.route.n_services == 59);
  CHECK(rc.route.n_stops() == 46);
  CHECK(rc.route.route_length_km == doctest::Approx(17.4));
  CHECK(rc.route.dispatch_headway_mean_s == doctest::Approx(874));
  CHECK(rc.route.dispatch_headway_std_s == doctest::Approx(302));
  const auto state = sim::init_episode(rc.route, rc.demand, rc.sim, 1);
  CHECK(state.buses.size() == 59);
  for (const auto& b : state.buses)
    CHECK(b.phase == sim::BusPhase::WaitingDispatch);
}

TEST_CASE("zero-variance dispatch gives exact headways") {
  auto route = desk_route();
  route.n_services = 2;
  route.dispatch_headway_std_s = 0.0;
  const auto state =
      sim::init_episode(route, desk_demand(), desk_config(), 99);
  CHECK(state.buses[0].dispatch_time_s == 0.0);
  CHECK(state.buses[1].dispatch_time_s == 480.0);
}

TEST_CASE("dispatch headways are clamped at 60 s apart") {
  auto route = desk_route();
  route.n_services = 30;
  route.dispatch_headway_mean_s = 61.0;
  route.dispatch_headway_std_s = 400.0;
  const auto state =
      sim::init_episode(route, desk_demand(), desk_config(), 5);
  for (std::size_t i = 1; i < state.buses.size(); ++i)
    CHECK(state.buses[i].dispatch_time_s -
              state.buses[i - 1].dispatch_time_s >=
          60.0);
}

TEST_CASE("init_episode rejects invalid configs") {
  auto cfg = desk_config();
  cfg.capacity = 0;
  CHECK_THROWS(sim::init_episode(desk_route(), desk_demand(), cfg, 1));
  cfg = desk_config();
  cfg.tick_s = -1;
  CHECK_THROWS(sim::init_episode(desk_route(), desk_demand(), cfg, 1));
  cfg = desk_config();
  cfg.speed_noise_lo = 1.3;  // above hi
  CHECK_THROWS(sim::init_episode(desk_route(), desk_demand(), cfg, 1));
}

TEST_CASE("same seed gives bit-identical states") {
  auto a = fresh_state(123);
  auto b = fresh_state(123);
  CHECK(sim::state_digest(a) == sim::state_digest(b));
  run_no_control(a);
  run_no_control(b);
  CHECK(sim::state_digest(a) == sim::state_digest(b));
  auto c = fresh_state(124);
  CHECK(sim::state_digest(a) != sim::state_digest(c));
}

TEST_CASE("spawn_passengers: zero rates never arrive") {
  const int n = 10;
  std::vector<std::vector<double>> zero(n, std::vector<double>(n, 0.0));
  auto state = sim::init_episode(desk_route(), sim::DemandMatrix(zero),
                                 desk_config(), 3);
  for (int t = 0; t < 1000; ++t)
    sim::spawn_passengers(state, 1.0, state.demand, state.rngs.demand);
  CHECK(state.waiting_count() == 0);
  CHECK(state.stats.spawned == 0);
}

TEST_CASE("spawn_passengers: empirical Poisson mean matches the rate") {
  // 60 pax/h for one OD pair over 60 s draws: mean 1.0 per draw
  const int n = 10;
  std::vector<std::vector<double>> rates(n, std::vector<double>(n, 0.0));
  rates[2][7] = 60.0;
  auto state = sim::init_episode(desk_route(), sim::DemandMatrix(rates),
                                 desk_config(), 11);
  const int draws = 100000;
  for (int t = 0; t < draws; ++t)
    sim::spawn_passengers(state, 60.0, state.demand, state.rngs.demand);
  const double mean =
      static_cast<double>(state.stats.spawned) / static_cast<double>(draws);
  CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("demand matrix rejects backward travel") {
  std::vector<std::vector<double>> rates(3, std::vector<double>(3, 0.0));
  rates[2][1] = 5.0;
  CHECK_THROWS(sim::DemandMatrix(rates));
  rates[2][1] = 0.0;
  rates[1][1] = 1.0;
  CHECK_THROWS(sim::DemandMatrix(rates));
}

TEST_CASE("dwell_time arithmetic") {
  const auto cfg = desk_config();
  CHECK(sim::dwell_time(0, 0, cfg) == 0.0);
  CHECK(sim::dwell_time(5, 10, cfg) == doctest::Approx(39.0));
  CHECK(sim::dwell_time(1, 0, cfg) == doctest::Approx(1.8));
  CHECK_THROWS(sim::dwell_time(-1, 0, cfg));
}

TEST_CASE("board_alight respects capacity and FIFO") {
  auto state = fresh_state();
  auto& bus = state.buses[0];
  bus.phase = sim::BusPhase::Dwelling;
  bus.position_km = state.route.stops_km[3];
  bus.next_stop = 3;

  SUBCASE("empty stop, no alighters") {
    const auto r = sim::board_alight(state, 0, 3);
    CHECK(r.n_alight == 0);
    CHECK(r.n_board == 0);
    CHECK(r.left_behind == 0);
  }

  SUBCASE("nearly full bus boards one of five") {
    for (int i = 0; i < 119; ++i) bus.occupancy.push_back({9, 0.0});
    for (int i = 0; i < 5; ++i) state.stops[3].queue.push_back({7, 0.0});
    const auto r = sim::board_alight(state, 0, 3);
    CHECK(r.n_board == 1);
    CHECK(r.left_behind == 4);
    CHECK(static_cast<int>(bus.occupancy.size()) == 120);
  }

  SUBCASE("oversized queue clamps at capacity") {
    for (int i = 0; i < 130; ++i) state.stops[3].queue.push_back({8, 0.0});
    const auto r = sim::board_alight(state, 0, 3);
    CHECK(r.n_board == 120);
    CHECK(r.left_behind == 10);
  }

  SUBCASE("alighting precedes boarding") {
    for (int i = 0; i < 120; ++i) bus.occupancy.push_back({3, 0.0});
    for (int i = 0; i < 4; ++i) state.stops[3].queue.push_back({6, 0.0});
    const auto r = sim::board_alight(state, 0, 3);
    CHECK(r.n_alight == 120);
    CHECK(r.n_board == 4);
    CHECK(bus.last_arrival.onboard_after_alight == 0);
    CHECK(bus.last_arrival.waiting_before_board == 4);
  }
}

TEST_CASE("apply_holding boundaries") {
  auto state = fresh_state();
  auto& bus = state.buses[0];
  bus.phase = sim::BusPhase::Dwelling;
  bus.dwell_end_s = 100.0;
  bus.phase_end_s = 100.0;

  sim::apply_holding(state, 0, 0.0, 180.0);
  CHECK(bus.phase_end_s == 100.0);  // departs at dwell end

  sim::apply_holding(state, 0, 180.0, 180.0);
  CHECK(bus.phase_end_s == 280.0);  // exactly the cap past dwell end

  CHECK_THROWS(sim::apply_holding(state, 0, 200.0, 180.0));
  CHECK_THROWS(sim::apply_holding(state, 0, -1.0, 180.0));

  bus.phase = sim::BusPhase::Cruising;
  CHECK_THROWS(sim::apply_holding(state, 0, 10.0, 180.0));
}

TEST_CASE("advance moves a cruising bus by speed * tick") {
  auto state = fresh_state();
  auto& bus = state.buses[0];
  bus.phase = sim::BusPhase::Cruising;
  bus.position_km = 1.0;
  bus.next_stop = 1;
  bus.link_speed_kmh = 30.0;
  // park the other buses far in the future
  for (int i = 1; i < 4; ++i) state.buses[i].dispatch_time_s = 1e9;
  std::vector<sim::SimEvent> events;
  sim::advance(state, events);
  CHECK(bus.position_km == doctest::Approx(1.0 + 30.0 / 3600.0));
}

TEST_CASE("no overtaking: follower clamps one metre behind its leader") {
  auto state = fresh_state();
  auto& leader = state.buses[0];
  auto& follower = state.buses[1];
  leader.phase = sim::BusPhase::Cruising;
  leader.position_km = 5.0;
  leader.next_stop = 3;
  leader.link_speed_kmh = 5.0;  // crawling
  follower.phase = sim::BusPhase::Cruising;
  follower.position_km = 4.99;
  follower.next_stop = 3;
  follower.link_speed_kmh = 40.0;  // would overtake unclamped
  for (int i = 2; i < 4; ++i) state.buses[i].dispatch_time_s = 1e9;

  // brute-force reference: integrate both buses with the clamp rule
  double ref_leader = leader.position_km, ref_follower = follower.position_km;
  std::vector<sim::SimEvent> events;
  for (int t = 0; t < 200; ++t) {
    events.clear();
    sim::advance(state, events);
    ref_leader += 5.0 / 3600.0;
    ref_follower = std::min(ref_follower + 40.0 / 3600.0, ref_leader - 0.001);
    CHECK(follower.position_km <= leader.position_km - 0.001 + 1e-12);
    CHECK(follower.position_km == doctest::Approx(ref_follower));
    CHECK(leader.position_km == doctest::Approx(ref_leader));
  }
}

TEST_CASE("horizon cut finishes everyone with final events") {
  auto cfg = desk_config();
  cfg.horizon_s = 100.0;
  auto state = sim::init_episode(desk_route(), desk_demand(), cfg, 17);
  std::vector<sim::SimEvent> all;
  std::vector<sim::SimEvent> events;
  while (state.clock_s < cfg.horizon_s) {
    events.clear();
    sim::advance(state, events);
    all.insert(all.end(), events.begin(), events.end());
  }
  CHECK(state.all_finished());
  int finished_events = 0;
  for (const auto& ev : all)
    if (ev.kind == sim::SimEventKind::BusFinished) ++finished_events;
  CHECK(finished_events == 4);
  for (const auto& ev : all) CHECK(ev.time_s <= cfg.horizon_s);
}

TEST_CASE("project_headways") {
  auto state = fresh_state();
  auto& b0 = state.buses[0];
  auto& b1 = state.buses[1];

  SUBCASE("single bus in service gets schedule sentinels") {
    b0.phase = sim::BusPhase::Cruising;
    b0.position_km = 6.0;
    const auto h = sim::project_headways(state, 0);
    CHECK(h.forward_s == doctest::Approx(480.0));
    CHECK(h.backward_s == doctest::Approx(480.0));
  }

  SUBCASE("five km gap at 30 km/h projects to 600 s") {
    b0.phase = sim::BusPhase::Cruising;
    b0.position_km = 10.0;
    b1.phase = sim::BusPhase::Cruising;
    b1.position_km = 5.0;
    const auto h = sim::project_headways(state, 1);
    CHECK(h.forward_s == doctest::Approx(600.0));
    const auto h0 = sim::project_headways(state, 0);
    CHECK(h0.backward_s == doctest::Approx(600.0));
  }

  SUBCASE("co-located leader gives zero forward headway") {
    b0.phase = sim::BusPhase::Dwelling;
    b0.position_km = 4.0;
    b1.phase = sim::BusPhase::Cruising;
    b1.position_km = 4.0;
    const auto h = sim::project_headways(state, 1);
    CHECK(h.forward_s == 0.0);
  }
}

TEST_CASE("passenger conservation and trip completion") {
  auto state = fresh_state(31);
  run_no_control(state);
  CHECK(state.stats.spawned ==
        state.waiting_count() + state.onboard_count() + state.stats.alighted);
  // every boarded passenger either alighted or is onboard at the end
  CHECK(state.stats.boarded ==
        state.stats.alighted + state.onboard_count());
  CHECK(state.stats.spawned > 0);
  CHECK(state.stats.alighted > 0);
}

TEST_CASE("ordering invariant holds through a full episode") {
  auto state = fresh_state(57);
  std::vector<sim::SimEvent> events;
  const int last = state.route.n_stops() - 1;
  while (state.clock_s < state.cfg.horizon_s && !state.all_finished()) {
    events.clear();
    sim::advance(state, events);
    for (const auto& ev : events)
      if (ev.kind == sim::SimEventKind::BusArrivedAtStop &&
          ev.stop_index < last)
        sim::apply_holding(state, ev.bus_id, 0.0, 180.0);
    int prev = -1;
    for (const auto& b : state.buses) {
      if (!b.active()) continue;
      if (prev >= 0)
        CHECK(b.position_km <= state.buses[prev].position_km + 1e-12);
      prev = b.id;
      CHECK(b.position_km >= 0.0);
      CHECK(b.position_km <= state.route.route_length_km);
      CHECK(b.occupancy.size() <=
            static_cast<std::size_t>(state.cfg.capacity));
    }
  }
}

TEST_CASE("event clocks are monotone and match emission time") {
  auto state = fresh_state(63);
  std::vector<sim::SimEvent> all;
  run_no_control(state, &all);
  double prev = 0.0;
  for (const auto& ev : all) {
    CHECK(ev.time_s >= prev);
    prev = ev.time_s;
  }
  CHECK(!all.empty());
}
