#pragma once

#include <string>
#include <vector>

#include "transit/io/csv.hpp"
#include "transit/trainer/episode.hpp"

namespace transit::io {

// Time-space diagram: time on x, route position on y, per-bus polylines
// colored by occupancy fraction on a fixed ramp. Identical inputs render
// byte-identical documents.
std::string render_timespace_svg(
    const std::vector<trainer::TrajectorySample>& samples, double capacity,
    double route_length_km);
void write_timespace_svg(const std::vector<trainer::TrajectorySample>& samples,
                         double capacity, double route_length_km,
                         const std::string& path);

// Distortion-weight curves over the tau grid, one line per series.
std::string render_weights_svg(const std::vector<WeightSeries>& series);
void write_weights_svg(const std::vector<WeightSeries>& series,
                       const std::string& path);

// #rrggbb on the fixed occupancy ramp, fraction clamped to [0,1].
std::string occupancy_color(double fraction);

}  // namespace transit::io
