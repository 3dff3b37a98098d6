#include "transit/io/run_config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "transit/sha1.hpp"

namespace transit::io {

using nlohmann::json;

namespace {

scenario::AnomalySpec anomaly_from_json(const json& j) {
  scenario::AnomalySpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "interruption")
    spec.kind = scenario::AnomalyKind::Interruption;
  else if (kind == "demand-surge")
    spec.kind = scenario::AnomalyKind::DemandSurge;
  else
    throw std::invalid_argument("unknown anomaly kind: " + kind);
  if (j.contains("targets"))
    spec.targets = j.at("targets").get<std::vector<int>>();
  spec.random_targets = j.value("random_targets", 0);
  spec.factor = j.value("factor", 0.1);
  spec.extra_pax = j.value("extra_pax", 0);
  const auto window = j.at("window").get<std::vector<double>>();
  if (window.size() != 2)
    throw std::invalid_argument("anomaly window must be [start, end]");
  spec.window_start_s = window[0];
  spec.window_end_s = window[1];
  return spec;
}

void parse_scenario(const json& j, trainer::ScenarioConfig& sc) {
  sc.sigma_d = j.value("sigma_d", sc.sigma_d);
  sc.sigma_s = j.value("sigma_s", sc.sigma_s);
  sc.sample_sigmas = j.value("resample_per_episode", sc.sample_sigmas);
  if (j.contains("sigma_d_range")) {
    const auto r = j.at("sigma_d_range").get<std::vector<double>>();
    sc.sigma_d_lo = r.at(0);
    sc.sigma_d_hi = r.at(1);
  }
  if (j.contains("sigma_s_range")) {
    const auto r = j.at("sigma_s_range").get<std::vector<double>>();
    sc.sigma_s_lo = r.at(0);
    sc.sigma_s_hi = r.at(1);
  }
  if (j.contains("anomalies"))
    for (const auto& ja : j.at("anomalies"))
      sc.anomalies.push_back(anomaly_from_json(ja));
}

void parse_agent(const json& j, agents::AgentSpec& a) {
  if (j.contains("variant"))
    a.variant = agents::variant_from_string(j.at("variant").get<std::string>());
  a.k_online = j.value("K", a.k_online);
  a.k_target = j.value("K_prime", a.k_target);
  a.kappa = j.value("kappa", a.kappa);
  a.gamma = j.value("gamma", a.gamma);
  a.beta = j.value("beta", a.beta);
  a.alpha_a = j.value("alpha_a", a.alpha_a);
  a.alpha_c = j.value("alpha_c", a.alpha_c);
  a.alpha_m = j.value("alpha_m", a.alpha_m);
  a.target_mix = j.value("target_mix", a.target_mix);
  a.buffer_threshold_b = j.value("buffer_B", a.buffer_threshold_b);
  a.minibatch_c = j.value("minibatch", a.minibatch_c);
  a.buffer_capacity = j.value("buffer_capacity", a.buffer_capacity);
  a.max_hold_s = j.value("max_hold_s", a.max_hold_s);
  a.reward_w = j.value("reward_w", a.reward_w);
  a.explore_noise_std = j.value("noise_std", a.explore_noise_std);
  a.hidden = j.value("hidden", a.hidden);
  a.n_cos = j.value("n_cos", a.n_cos);
  a.attn_dim = j.value("attn_dim", a.attn_dim);
  a.head_hidden = j.value("head_hidden", a.head_hidden);
  a.shared_parameters = j.value("shared_parameters", a.shared_parameters);
  a.random_fractions = j.value("random_fractions", a.random_fractions);
  a.paper_pair_weighting =
      j.value("paper_pair_weighting", a.paper_pair_weighting);
  a.use_target_actor = j.value("use_target_actor", a.use_target_actor);
  if (j.contains("fh")) {
    const auto& jf = j.at("fh");
    a.fh.h0_s = jf.value("h0_s", a.fh.h0_s);
    a.fh.d_bar_s = jf.value("d_bar_s", a.fh.d_bar_s);
    a.fh.gain = jf.value("gain", a.fh.gain);
  }
}

}  // namespace

trainer::EpisodeSetup RunConfig::episode_setup() const {
  trainer::EpisodeSetup setup;
  setup.route = route;
  setup.demand = demand;
  setup.cfg = sim;
  setup.scenario = scenario;
  setup.max_hold_s = agent.max_hold_s;
  setup.reward_w = agent.reward_w;
  return setup;
}

RunConfig parse_run_config(const std::string& json_text,
                           const std::string& name_hint) {
  const json j = json::parse(json_text);
  RunConfig rc;
  rc.route_name = j.value("name", name_hint);

  const auto& jr = j.at("route");
  rc.route.stops_km = jr.at("stops_km").get<std::vector<double>>();
  rc.route.n_services = jr.at("services").get<int>();
  rc.route.dispatch_headway_mean_s = jr.at("headway_mean_s").get<double>();
  rc.route.dispatch_headway_std_s = jr.at("headway_std_s").get<double>();
  rc.route.route_length_km =
      jr.value("route_length_km", rc.route.stops_km.back());
  rc.route.validate();

  rc.demand = sim::DemandMatrix(
      j.at("demand").at("rates_pax_per_hour")
          .get<std::vector<std::vector<double>>>());
  if (rc.demand.n_stops() != rc.route.n_stops())
    throw std::invalid_argument("run config: demand size != stop count");

  if (j.contains("sim")) {
    const auto& js = j.at("sim");
    rc.sim.alight_time_per_pax = js.value("t_a", rc.sim.alight_time_per_pax);
    rc.sim.board_time_per_pax = js.value("t_b", rc.sim.board_time_per_pax);
    rc.sim.nominal_speed_kmh = js.value("v_kmh", rc.sim.nominal_speed_kmh);
    if (js.contains("speed_noise")) {
      const auto n = js.at("speed_noise").get<std::vector<double>>();
      rc.sim.speed_noise_lo = n.at(0);
      rc.sim.speed_noise_hi = n.at(1);
    }
    rc.sim.capacity = js.value("capacity", rc.sim.capacity);
    rc.sim.tick_s = js.value("tick_s", rc.sim.tick_s);
    rc.sim.horizon_s = js.value("horizon_s", rc.sim.horizon_s);
  }
  rc.sim.validate();

  if (j.contains("scenario")) parse_scenario(j.at("scenario"), rc.scenario);
  if (j.contains("agent")) parse_agent(j.at("agent"), rc.agent);

  if (j.contains("trainer")) {
    const auto& jt = j.at("trainer");
    rc.trainer.episodes = jt.value("episodes", rc.trainer.episodes);
    rc.trainer.updates_per_episode =
        jt.value("updates_per_episode", rc.trainer.updates_per_episode);
    rc.trainer.seed = jt.value("seed", rc.trainer.seed);
    rc.trainer.divergence_guard =
        jt.value("divergence_guard", rc.trainer.divergence_guard);
    rc.trainer.decay_noise = jt.value("decay_noise", rc.trainer.decay_noise);
    rc.trainer.trajectory_sample_every = jt.value(
        "trajectory_sample_every", rc.trainer.trajectory_sample_every);
  }
  rc.trainer.agent = rc.agent;
  rc.trainer.scenario = rc.scenario;
  // training samples the sigma ranges unless the config pins them
  if (!j.contains("scenario") ||
      !j.at("scenario").contains("resample_per_episode"))
    rc.trainer.scenario.sample_sigmas = true;
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto stem = std::filesystem::path(path).stem().string();
  return parse_run_config(ss.str(), stem);
}

scenario::AnomalySpec parse_anomaly_json(const std::string& json_text) {
  return anomaly_from_json(json::parse(json_text));
}

std::string file_blob_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Sha1::git_blob_hex(ss.str());
}

void write_run_manifest(const std::string& path, const std::string& command,
                        const std::vector<std::string>& input_files,
                        const std::string& config_echo) {
  json j;
  j["command"] = command;
  j["config"] = json::parse(config_echo.empty() ? "{}" : config_echo);
  json inputs = json::array();
  for (const auto& f : input_files)
    inputs.push_back({{"path", f}, {"blob_sha1", file_blob_hash(f)}});
  j["inputs"] = inputs;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace transit::io
