#pragma once

#include <string>

#include "transit/trainer/trainer.hpp"

namespace transit::io {

// Full run description parsed from one JSON document:
// {route: {...}, demand: {...}, sim: {...}, scenario: {...}, agent: {...},
//  trainer: {...}}. Missing sections keep their defaults.
struct RunConfig {
  sim::RouteSpec route;
  sim::DemandMatrix demand;
  sim::SimConfig sim;
  trainer::ScenarioConfig scenario;
  agents::AgentSpec agent;
  trainer::TrainerConfig trainer;
  std::string route_name = "route";

  trainer::EpisodeSetup episode_setup() const;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text,
                           const std::string& name_hint = "route");

// Anomaly spec from an inline JSON object, e.g.
// {"kind":"interruption","factor":0.1,"random_targets":4,
//  "window":[1500,2100]}.
scenario::AnomalySpec parse_anomaly_json(const std::string& json_text);

// Run manifest: full configuration echo plus git-style blob hashes of the
// input fixture files.
void write_run_manifest(const std::string& path, const std::string& command,
                        const std::vector<std::string>& input_files,
                        const std::string& config_echo);

std::string file_blob_hash(const std::string& path);

}  // namespace transit::io
