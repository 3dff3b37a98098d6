#include "transit/trainer/evaluate.hpp"

#include <future>

namespace transit::trainer {

namespace {

std::optional<double> delta_of(const std::optional<double>& a,
                               const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

void accumulate(std::optional<double>& acc, const std::optional<double>& x,
                int& count) {
  if (!x) return;
  acc = acc.value_or(0.0) + *x;
  ++count;
}

}  // namespace

EvalCellResult evaluate_cell(const agents::AgentRuntime& agent,
                             const EpisodeSetup& base, const EvalCell& cell,
                             int n_seeds, std::uint64_t base_seed,
                             const EvalOptions& opts) {
  EvalCellResult res;
  res.cell = cell;
  res.n_seeds = n_seeds;

  EpisodeSetup setup = base;
  setup.scenario.sample_sigmas = false;
  setup.scenario.sigma_d = cell.sigma_d;
  setup.scenario.sigma_s = cell.sigma_s;
  setup.scenario.anomalies = cell.anomalies;

  agents::AgentSpec nc_spec;
  nc_spec.variant = agents::Variant::NC;
  nc_spec.max_hold_s = agent.spec().max_hold_s;
  nc_spec.reward_w = agent.spec().reward_w;
  const agents::AgentRuntime nc(nc_spec, setup.route.n_services,
                                setup.route.dispatch_headway_mean_s, 0);

  EpisodeOptions ep_opts;
  ep_opts.explore = false;
  ep_opts.trajectory_sample_every = opts.trajectory_sample_every;

  double aht_sum = 0.0, aod_sum = 0.0, cv2_sum = 0.0, cv2_nc_sum = 0.0;
  std::optional<double> awt_sum, ajt_sum, att_sum;
  int awt_n = 0, ajt_n = 0, att_n = 0;
  std::optional<double> d_awt_sum, d_att_sum, d_aod_sum;
  int d_awt_n = 0, d_att_n = 0, d_aod_n = 0;

  for (int s = 0; s < n_seeds; ++s) {
    const std::uint64_t seed = derive_seed(base_seed, 500000 + s);
    EpisodeLog treated = run_episode(agent, setup, seed, ep_opts);
    EpisodeLog baseline = run_episode(nc, setup, seed, ep_opts);

    const auto& rt = treated.report;
    const auto& rb = baseline.report;
    res.per_seed.push_back(rt);
    res.per_seed_nc.push_back(rb);

    aht_sum += rt.aht_s;
    aod_sum += rt.aod;
    cv2_sum += treated.mean_cv2;
    cv2_nc_sum += baseline.mean_cv2;
    accumulate(awt_sum, rt.awt_s, awt_n);
    accumulate(ajt_sum, rt.ajt_s, ajt_n);
    accumulate(att_sum, rt.att_s, att_n);
    accumulate(d_awt_sum, delta_of(rt.awt_s, rb.awt_s), d_awt_n);
    accumulate(d_att_sum, delta_of(rt.att_s, rb.att_s), d_att_n);
    std::optional<double> d_aod = rt.aod - rb.aod;
    accumulate(d_aod_sum, d_aod, d_aod_n);

    if (opts.keep_logs) {
      res.logs.push_back(std::move(treated));
      res.logs_nc.push_back(std::move(baseline));
    }
  }

  const double n = static_cast<double>(n_seeds);
  res.mean.aht_s = aht_sum / n;
  res.mean.aod = aod_sum / n;
  res.mean_cv2 = cv2_sum / n;
  res.mean_cv2_nc = cv2_nc_sum / n;
  if (awt_n > 0) res.mean.awt_s = *awt_sum / awt_n;
  if (ajt_n > 0) res.mean.ajt_s = *ajt_sum / ajt_n;
  if (att_n > 0) res.mean.att_s = *att_sum / att_n;
  if (d_awt_n > 0) res.mean.d_awt_s = *d_awt_sum / d_awt_n;
  if (d_att_n > 0) res.mean.d_att_s = *d_att_sum / d_att_n;
  if (d_aod_n > 0) res.mean.d_aod = *d_aod_sum / d_aod_n;
  return res;
}

std::vector<EvalCellResult> evaluate_grid(const agents::AgentRuntime& agent,
                                          const EpisodeSetup& base,
                                          const std::vector<EvalCell>& cells,
                                          int n_seeds, std::uint64_t base_seed,
                                          const EvalOptions& opts) {
  std::vector<std::future<EvalCellResult>> futures;
  futures.reserve(cells.size());
  for (const auto& cell : cells)
    futures.push_back(std::async(std::launch::async, [&, cell] {
      return evaluate_cell(agent, base, cell, n_seeds, base_seed, opts);
    }));
  std::vector<EvalCellResult> out;
  out.reserve(cells.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

}  // namespace transit::trainer
