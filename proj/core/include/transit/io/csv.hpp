#pragma once

#include <optional>
#include <string>
#include <vector>

#include "transit/trainer/evaluate.hpp"
#include "transit/trainer/trainer.hpp"

namespace transit::io {

// One row of the sweep/eval report. Optional fields render as empty
// cells. Column order is fixed:
// agent,route,sigma_d,sigma_s,anomaly,seed_count,aht_s,awt_s,ajt_s,att_s,
// aod,d_awt_s,d_att_s,d_aod
struct ReportRow {
  std::string agent;
  std::string route;
  double sigma_d = 0.0;
  double sigma_s = 0.0;
  std::string anomaly = "none";
  int seed_count = 0;
  double aht_s = 0.0;
  std::optional<double> awt_s;
  std::optional<double> ajt_s;
  std::optional<double> att_s;
  double aod = 0.0;
  std::optional<double> d_awt_s;
  std::optional<double> d_att_s;
  std::optional<double> d_aod;
};

std::string render_report_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_report_csv(const std::string& text);
void write_report_csv(const std::vector<ReportRow>& rows,
                      const std::string& path);

ReportRow report_row_from(const trainer::EvalCellResult& cell,
                          const std::string& agent, const std::string& route);

void write_trajectory_csv(const std::vector<trainer::TrajectorySample>& samples,
                          double tick_s, const std::string& path);
std::vector<trainer::TrajectorySample> read_trajectory_csv(
    const std::string& path, double tick_s);

void write_curves_csv(const std::vector<trainer::TrainCurvePoint>& curves,
                      const std::string& path);

// Weight profiles over the tau grid, one labelled series per line.
struct WeightSeries {
  std::string label;
  std::vector<double> taus;
  std::vector<double> weights;
};
void write_weights_csv(const std::vector<WeightSeries>& series,
                       const std::string& path);
std::vector<WeightSeries> read_weights_csv(const std::string& path);

// Experience dump, one JSON object per line.
std::string experience_to_jsonl(const env::Experience& exp, int agent_id);
void write_experiences_jsonl(
    const std::vector<std::pair<int, env::Experience>>& experiences,
    const std::string& path);

std::string format_double(double v);

}  // namespace transit::io
