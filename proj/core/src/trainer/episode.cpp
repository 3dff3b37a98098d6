#include "transit/trainer/episode.hpp"

#include <cmath>
#include <optional>

namespace transit::trainer {

namespace {

struct PendingDecision {
  env::Observation obs;
  double action = 0.0;
  double time_s = 0.0;
  int stop_index = 0;
  std::size_t log_index = 0;
};

}  // namespace

EpisodeLog run_episode(const agents::AgentRuntime& agent,
                       const EpisodeSetup& setup, std::uint64_t seed,
                       const EpisodeOptions& opts) {
  EpisodeLog log;
  log.seed = seed;

  Rng scen_rng(derive_seed(seed, 11));
  log.sigma_d = setup.scenario.sample_sigmas
                    ? scen_rng.uniform(setup.scenario.sigma_d_lo,
                                       setup.scenario.sigma_d_hi)
                    : setup.scenario.sigma_d;
  log.sigma_s = setup.scenario.sample_sigmas
                    ? scen_rng.uniform(setup.scenario.sigma_s_lo,
                                       setup.scenario.sigma_s_hi)
                    : setup.scenario.sigma_s;
  log.p_d = scenario::sample_demand_scale(scen_rng, log.sigma_d);
  log.p_s = scenario::sample_speed_scale(scen_rng, log.sigma_s);

  sim::SimState state = sim::init_episode(
      setup.route, setup.demand.scaled(log.p_d), setup.cfg, seed);
  state.speed_scale = log.p_s;
  for (const auto& a : setup.scenario.anomalies) {
    if (a.kind == scenario::AnomalyKind::Interruption)
      scenario::apply_interruption(state, a);
    else
      scenario::apply_demand_surge(state, a);
  }

  Rng explore_rng(derive_seed(seed, 12));

  const int n_buses = setup.route.n_services;
  const int last_stop = setup.route.n_stops() - 1;
  std::vector<std::optional<PendingDecision>> pending(n_buses);
  std::vector<env::DecisionRecord> decision_records;

  double reward_sum = 0.0;
  std::int64_t reward_count = 0;
  double cv2_sum = 0.0;
  std::int64_t cv2_count = 0;
  std::vector<sim::SimEvent> events;
  std::int64_t tick_index = 0;

  while (state.clock_s < state.cfg.horizon_s && !state.all_finished()) {
    events.clear();
    sim::advance(state, events);
    ++tick_index;

    const double cv2_now = sim::fleet_cv2(state);
    log.cv2_times_s.push_back(state.clock_s);
    log.cv2_values.push_back(cv2_now);
    int active = 0;
    for (const auto& b : state.buses)
      if (b.active()) ++active;
    if (active >= 2) {
      cv2_sum += cv2_now;
      ++cv2_count;
    }

    for (const auto& ev : events) {
      if (ev.kind != sim::SimEventKind::BusArrivedAtStop) continue;
      const int bus = ev.bus_id;
      const env::Observation obs = env::observe(state, bus);

      if (pending[bus]) {
        const auto& p = *pending[bus];
        const env::RewardRecord rec =
            env::compute_reward(state, p.action, setup.reward_w);
        env::Experience exp;
        exp.s = p.obs;
        exp.a = p.action;
        exp.r = rec;
        exp.s_next = obs;
        exp.g = env::collect_events(
            decision_records, bus, p.stop_index, p.obs.features(), p.action,
            p.time_s, state.clock_s, setup.route.n_stops(),
            setup.route.dispatch_headway_mean_s);
        log.experiences.emplace_back(bus, std::move(exp));
        log.decisions[p.log_index].rewarded = true;
        log.decisions[p.log_index].reward = rec.r;
        log.decisions[p.log_index].cv2_at_reward = rec.cv2;
        reward_sum += rec.r;
        ++reward_count;
        pending[bus].reset();
      }

      if (ev.stop_index < last_stop) {
        const double a = agent.act(bus, obs, opts.explore, explore_rng);
        const double hold = a * setup.max_hold_s;
        sim::apply_holding(state, bus, hold, setup.max_hold_s);

        DecisionLogEntry entry;
        entry.bus_id = bus;
        entry.stop_index = ev.stop_index;
        entry.time_s = state.clock_s;
        entry.obs = obs;
        entry.action = a;
        entry.hold_s = hold;
        log.decisions.push_back(entry);

        decision_records.push_back({bus, ev.stop_index, state.clock_s,
                                    obs.features(), a});
        pending[bus] = PendingDecision{obs, a, state.clock_s, ev.stop_index,
                                       log.decisions.size() - 1};
      }
    }

    if (tick_index % opts.trajectory_sample_every == 0) {
      for (const auto& b : state.buses)
        if (b.active())
          log.trajectory.push_back({state.clock_s, b.id, b.position_km,
                                    b.phase,
                                    static_cast<int>(b.occupancy.size())});
    }
  }

  log.stats = state.stats;
  log.report = metrics::compute_metrics(state.stats);
  log.mean_reward = reward_count > 0
                        ? reward_sum / static_cast<double>(reward_count)
                        : 0.0;
  log.mean_cv2 = cv2_count > 0 ? cv2_sum / static_cast<double>(cv2_count) : 0.0;
  log.episode_end_s = state.clock_s;
  return log;
}

}  // namespace transit::trainer
