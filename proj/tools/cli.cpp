#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "transit/io/run_config.hpp"
#include "transit/io/svg.hpp"
#include "transit/nn/checkpoint.hpp"
#include "transit/selftest.hpp"

namespace transit::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct TrainArgs {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool dump_experiences = false;
};

struct EvalArgs {
  std::string checkpoint;
  std::string route_file;
  std::string agent = "nc";
  double sigma_d = 1.0;
  double sigma_s = 0.1;
  int seeds = 10;
  std::string anomaly;
  std::string out_dir;
};

struct SweepArgs {
  std::string config;
  std::string out_dir;
};

struct PlotArgs {
  std::string log_file;
  std::string out_file;
  std::string kind = "timespace";
  double capacity = 120.0;
  double route_length_km = 0.0;
};

agents::AgentRuntime make_runtime(const io::RunConfig& rc,
                                  const std::string& variant,
                                  const std::string& checkpoint,
                                  std::uint64_t seed) {
  agents::AgentSpec spec = rc.agent;
  spec.variant = agents::variant_from_string(variant);
  agents::AgentRuntime runtime(spec, rc.route.n_services,
                               rc.route.dispatch_headway_mean_s, seed);
  if (runtime.learned()) {
    if (checkpoint.empty())
      throw std::runtime_error("agent '" + variant + "' needs --checkpoint");
    const std::string stored = nn::checkpoint_meta(checkpoint, "variant");
    if (!stored.empty() && stored != variant)
      throw std::runtime_error("checkpoint holds variant '" + stored +
                               "', requested '" + variant + "'");
    runtime.load_checkpoint(checkpoint);
  }
  return runtime;
}

std::vector<io::WeightSeries> weight_series_from_profile(
    const trainer::MetaWeightProfile& profile) {
  std::vector<io::WeightSeries> series;
  for (const auto& [count, weights] : profile.mean_weight_by_count) {
    io::WeightSeries s;
    s.label = "events_" + std::to_string(count);
    for (Eigen::Index i = 0; i < profile.midpoints.size(); ++i) {
      s.taus.push_back(profile.midpoints(i));
      s.weights.push_back(weights(i));
    }
    series.push_back(std::move(s));
  }
  return series;
}

int cmd_train(const TrainArgs& args) {
  io::RunConfig rc = io::load_run_config(args.config);
  if (args.seed_set) rc.trainer.seed = args.seed;
  fs::create_directories(args.out_dir);

  agents::AgentRuntime runtime(rc.agent, rc.route.n_services,
                               rc.route.dispatch_headway_mean_s,
                               rc.trainer.seed);
  const auto setup = rc.episode_setup();
  trainer::TrainerConfig tcfg = rc.trainer;
  tcfg.agent = rc.agent;

  const auto result = trainer::train(tcfg, setup, runtime, &std::cerr);

  io::write_curves_csv(result.curves,
                       (fs::path(args.out_dir) / "curves.csv").string());
  if (runtime.learned())
    runtime.save_checkpoint(
        (fs::path(args.out_dir) / "checkpoint.json").string(),
        tcfg.episodes);
  if (!result.meta_profile.mean_weight_by_count.empty()) {
    const auto series = weight_series_from_profile(result.meta_profile);
    io::write_weights_csv(series,
                          (fs::path(args.out_dir) / "meta_weights.csv").string());
    io::write_weights_svg(series,
                          (fs::path(args.out_dir) / "meta_weights.svg").string());
  }

  // one greedy rollout for the trajectory artifacts
  trainer::EpisodeSetup eval_setup = setup;
  eval_setup.scenario.sample_sigmas = false;
  trainer::EpisodeOptions opts;
  opts.trajectory_sample_every = 10;
  const auto log = trainer::run_episode(runtime, eval_setup,
                                        derive_seed(tcfg.seed, 999), opts);
  io::write_trajectory_csv(log.trajectory, rc.sim.tick_s,
                           (fs::path(args.out_dir) / "trajectory.csv").string());
  if (args.dump_experiences)
    io::write_experiences_jsonl(
        log.experiences,
        (fs::path(args.out_dir) / "experiences.jsonl").string());

  std::ifstream cfg_in(args.config);
  std::stringstream cfg_echo;
  cfg_echo << cfg_in.rdbuf();
  io::write_run_manifest((fs::path(args.out_dir) / "manifest.json").string(),
                         "train", {args.config}, cfg_echo.str());
  return 0;
}

int cmd_eval(const EvalArgs& args) {
  io::RunConfig rc = io::load_run_config(args.route_file);
  fs::create_directories(args.out_dir);

  const auto runtime = make_runtime(rc, args.agent, args.checkpoint, 7);

  trainer::EvalCell cell;
  cell.sigma_d = args.sigma_d;
  cell.sigma_s = args.sigma_s;
  if (!args.anomaly.empty()) {
    std::string text = args.anomaly;
    if (fs::exists(text)) {
      std::ifstream in(text);
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    cell.anomalies.push_back(io::parse_anomaly_json(text));
    cell.anomaly_label =
        cell.anomalies[0].kind == scenario::AnomalyKind::Interruption
            ? "interruption"
            : "demand-surge";
  }

  trainer::EvalOptions opts;
  opts.keep_logs = true;
  opts.trajectory_sample_every = 10;
  const auto result = trainer::evaluate_cell(runtime, rc.episode_setup(), cell,
                                             args.seeds, 42, opts);

  io::write_report_csv({io::report_row_from(result, args.agent, rc.route_name)},
                       (fs::path(args.out_dir) / "report.csv").string());
  if (!result.logs.empty()) {
    io::write_trajectory_csv(
        result.logs.front().trajectory, rc.sim.tick_s,
        (fs::path(args.out_dir) / "trajectory.csv").string());
    io::write_timespace_svg(
        result.logs.front().trajectory, rc.sim.capacity,
        rc.route.route_length_km,
        (fs::path(args.out_dir) / "timespace.svg").string());
  }
  io::write_run_manifest((fs::path(args.out_dir) / "manifest.json").string(),
                         "eval", {args.route_file}, "{}");
  return 0;
}

int cmd_sweep(const SweepArgs& args) {
  std::ifstream in(args.config);
  if (!in) throw std::runtime_error("cannot open " + args.config);
  const json j = json::parse(in);
  fs::create_directories(args.out_dir);

  const int seeds = j.value("seeds", 10);
  const auto sigma_s_grid =
      j.value("sigma_s_grid", std::vector<double>{0.1, 0.2, 0.3});
  const double sigma_d_fixed = j.value("sigma_d_fixed", 1.0);
  const auto sigma_d_grid =
      j.value("sigma_d_grid", std::vector<double>{1.0, 2.0, 3.0});
  const double sigma_s_fixed = j.value("sigma_s_fixed", 0.1);

  std::vector<trainer::EvalCell> cells;
  for (double ss : sigma_s_grid) cells.push_back({sigma_d_fixed, ss, {}, "none"});
  for (double sd : sigma_d_grid) {
    if (sd == sigma_d_fixed &&
        std::find(sigma_s_grid.begin(), sigma_s_grid.end(), sigma_s_fixed) !=
            sigma_s_grid.end())
      continue;  // avoid duplicating the shared corner cell
    cells.push_back({sd, sigma_s_fixed, {}, "none"});
  }

  std::vector<io::ReportRow> rows;
  std::vector<std::string> inputs = {args.config};
  for (const auto& jroute : j.at("route_files")) {
    const std::string route_file = jroute.get<std::string>();
    inputs.push_back(route_file);
    const io::RunConfig rc = io::load_run_config(route_file);
    for (const auto& jagent : j.at("agents")) {
      const std::string variant = jagent.at("variant").get<std::string>();
      const std::string ckpt = jagent.value("checkpoint", "");
      const auto runtime = make_runtime(rc, variant, ckpt, 7);
      const auto results = trainer::evaluate_grid(runtime, rc.episode_setup(),
                                                  cells, seeds, 42);
      for (const auto& res : results)
        rows.push_back(io::report_row_from(res, variant, rc.route_name));
    }
  }
  io::write_report_csv(rows, (fs::path(args.out_dir) / "report.csv").string());
  io::write_run_manifest((fs::path(args.out_dir) / "manifest.json").string(),
                         "sweep", inputs, "{}");
  return 0;
}

int cmd_plot(const PlotArgs& args) {
  if (args.kind == "timespace") {
    const auto samples = io::read_trajectory_csv(args.log_file, 1.0);
    double route_length = args.route_length_km;
    if (route_length <= 0)
      for (const auto& s : samples)
        route_length = std::max(route_length, s.position_km);
    if (route_length <= 0) route_length = 1.0;
    io::write_timespace_svg(samples, args.capacity, route_length,
                            args.out_file);
    return 0;
  }
  if (args.kind == "weights") {
    io::write_weights_svg(io::read_weights_csv(args.log_file), args.out_file);
    return 0;
  }
  throw std::runtime_error("unknown plot kind: " + args.kind);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"bus-route simulation and holding-control training"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train a control policy");
  train->add_option("--config", train_args.config, "run config JSON")
      ->required();
  train->add_option("--seed", train_args.seed, "override the config seed")
      ->each([&](const std::string&) { train_args.seed_set = true; });
  train->add_option("--out", train_args.out_dir, "output directory")
      ->required();
  train->add_flag("--dump-experiences", train_args.dump_experiences,
                  "write experiences.jsonl from the final rollout");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "evaluate an agent on a route");
  eval->add_option("--checkpoint", eval_args.checkpoint, "checkpoint manifest");
  eval->add_option("--route", eval_args.route_file, "route config JSON")
      ->required();
  eval->add_option("--agent", eval_args.agent, "agent variant")->required();
  eval->add_option("--sigma-d", eval_args.sigma_d, "demand sigma");
  eval->add_option("--sigma-s", eval_args.sigma_s, "speed sigma");
  eval->add_option("--seeds", eval_args.seeds, "paired evaluation seeds");
  eval->add_option("--anomaly", eval_args.anomaly,
                   "anomaly spec (inline JSON or file)");
  eval->add_option("--out", eval_args.out_dir, "output directory")->required();

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "evaluate an agent grid");
  sweep->add_option("--config", sweep_args.config, "sweep config JSON")
      ->required();
  sweep->add_option("--out", sweep_args.out_dir, "output directory")
      ->required();

  PlotArgs plot_args;
  auto* plot = app.add_subcommand("plot", "render a log as SVG");
  plot->add_option("--log", plot_args.log_file, "trajectory or weights CSV")
      ->required();
  plot->add_option("--out", plot_args.out_file, "output SVG")->required();
  plot->add_option("--kind", plot_args.kind, "timespace|weights");
  plot->add_option("--capacity", plot_args.capacity, "vehicle capacity");
  plot->add_option("--route-length", plot_args.route_length_km,
                   "route length (km)");

  auto* selftest = app.add_subcommand("selftest", "run loss/gradient oracles");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "{\"error\":\"bad arguments\",\"detail\":\""
              << e.what() << "\"}" << std::endl;
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train(train_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (plot->parsed()) return cmd_plot(plot_args);
    if (selftest->parsed())
      return transit::selftest::run_all(&std::cout) ? 0 : 1;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& c : msg)
      if (c == '"') c = '\'';
    std::cerr << "{\"error\":\"" << msg << "\"}" << std::endl;
    return 1;
  }
  return 2;
}

}  // namespace transit::cli
