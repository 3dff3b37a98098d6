#pragma once

#include <optional>
#include <string>
#include <vector>

#include "transit/sim/types.hpp"

namespace transit::metrics {

// Episode-level report. Waiting/journey metrics are absent when no
// passenger ever boarded. Deltas are filled by paired evaluation.
struct MetricsReport {
  double aht_s = 0.0;
  std::optional<double> awt_s;
  std::optional<double> ajt_s;
  std::optional<double> att_s;
  double aod = 0.0;

  std::optional<double> d_awt_s;
  std::optional<double> d_att_s;
  std::optional<double> d_aod;
};

// Population variance of the headways around their own mean, divided by
// the squared expected headway. Fewer than two headways count as zero.
double cv2(const std::vector<double>& headways_s, double expected_headway_s);

double population_variance(const std::vector<double>& xs);
double mean_of(const std::vector<double>& xs);

MetricsReport compute_metrics(const sim::EpisodeStats& stats);

}  // namespace transit::metrics
