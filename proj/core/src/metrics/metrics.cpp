#include "transit/metrics/metrics.hpp"

#include <stdexcept>

namespace transit::metrics {

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double population_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size());
}

double cv2(const std::vector<double>& headways_s, double expected_headway_s) {
  if (expected_headway_s <= 0)
    throw std::invalid_argument("cv2: expected headway must be > 0");
  if (headways_s.size() < 2) return 0.0;
  return population_variance(headways_s) /
         (expected_headway_s * expected_headway_s);
}

MetricsReport compute_metrics(const sim::EpisodeStats& stats) {
  MetricsReport r;
  r.aht_s = mean_of(stats.hold_s);
  if (!stats.wait_s.empty()) r.awt_s = mean_of(stats.wait_s);
  if (!stats.journey_s.empty()) r.ajt_s = mean_of(stats.journey_s);
  if (!stats.bus_travel_s.empty()) r.att_s = mean_of(stats.bus_travel_s);
  const double occ_mean = mean_of(stats.occupancy_at_departure);
  r.aod = occ_mean > 0.0
              ? population_variance(stats.occupancy_at_departure) / occ_mean
              : 0.0;
  return r;
}

}  // namespace transit::metrics
