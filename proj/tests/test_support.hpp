#pragma once

#include <vector>

#include "transit/env/env.hpp"
#include "transit/sim/simulation.hpp"
#include "transit/trainer/episode.hpp"

namespace transit::testsupport {

// Small linear route used across the suites: 10 stops over 18 km,
// 4 services, 480 +/- 120 s dispatch headways.
inline sim::RouteSpec desk_route() {
  sim::RouteSpec r;
  for (int i = 0; i < 10; ++i) r.stops_km.push_back(2.0 * i);
  r.route_length_km = 18.0;
  r.n_services = 4;
  r.dispatch_headway_mean_s = 480.0;
  r.dispatch_headway_std_s = 120.0;
  return r;
}

inline sim::DemandMatrix desk_demand(double total_pax_per_hour = 1000.0) {
  const int n = 10;
  std::vector<double> weights(n, 0.0);
  double sum = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    weights[i] = std::sin(M_PI * std::min(1.25 * x, 1.0)) + 0.35;
    sum += weights[i];
  }
  std::vector<std::vector<double>> rates(n, std::vector<double>(n, 0.0));
  for (int i = 0; i + 1 < n; ++i) {
    const double row_total = total_pax_per_hour * weights[i] / sum;
    for (int j = i + 1; j < n; ++j)
      rates[i][j] = row_total / static_cast<double>(n - 1 - i);
  }
  return sim::DemandMatrix(rates);
}

inline sim::SimConfig desk_config() {
  sim::SimConfig cfg;  // defaults carry the production constants
  cfg.horizon_s = 14400.0;
  return cfg;
}

inline trainer::EpisodeSetup desk_setup() {
  trainer::EpisodeSetup setup;
  setup.route = desk_route();
  setup.demand = desk_demand();
  setup.cfg = desk_config();
  setup.scenario.sigma_d = 1.0;
  setup.scenario.sigma_s = 0.1;
  return setup;
}

inline env::Observation make_obs(double h_fwd, double h_bwd, int onboard,
                                 int waiting, double h0 = 480.0,
                                 double cap = 120.0) {
  env::Observation o;
  o.h_fwd_s = h_fwd;
  o.h_bwd_s = h_bwd;
  o.onboard = onboard;
  o.waiting = waiting;
  o.normalized << h_fwd / h0, h_bwd / h0, onboard / cap, waiting / cap;
  return o;
}

inline env::Experience make_experience(Rng& rng, int n_events = 0) {
  env::Experience e;
  e.s = make_obs(rng.uniform(100, 900), rng.uniform(100, 900),
                 static_cast<int>(rng.below(100)),
                 static_cast<int>(rng.below(40)));
  e.s_next = make_obs(rng.uniform(100, 900), rng.uniform(100, 900),
                      static_cast<int>(rng.below(100)),
                      static_cast<int>(rng.below(40)));
  e.a = rng.uniform();
  e.r.a = e.a;
  e.r.cv2 = rng.uniform(0.0, 2.0);
  e.r.w = 0.2;
  e.r.r = -0.8 * e.r.cv2 - 0.2 * e.a;
  e.g.ego << e.s.normalized, e.a;
  for (int j = 0; j < n_events; ++j) {
    env::EventNode node;
    node.state = make_obs(rng.uniform(100, 900), rng.uniform(100, 900),
                          static_cast<int>(rng.below(100)),
                          static_cast<int>(rng.below(40)))
                     .normalized;
    node.action = rng.uniform();
    node.d_stop = rng.uniform(-0.5, 0.5);
    node.d_time = rng.uniform(0.0, 1.0);
    e.g.events.push_back(node);
  }
  return e;
}

}  // namespace transit::testsupport
