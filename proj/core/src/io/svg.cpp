#include "transit/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace transit::io {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 540.0;
constexpr double kMargin = 45.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

struct Rgb {
  int r, g, b;
};

// dark blue -> teal -> yellow -> red
constexpr Rgb kRamp[] = {
    {33, 47, 122}, {29, 145, 149}, {232, 213, 62}, {208, 49, 33}};

std::string to_hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

const char* kSeriesColors[] = {"#1f5fa8", "#d0662c", "#3a8f3f", "#a03f9b",
                               "#777215", "#202020", "#7d2c2c", "#2c7d78"};

}  // namespace

std::string occupancy_color(double fraction) {
  const double f = std::clamp(fraction, 0.0, 1.0);
  const double scaled = f * 3.0;
  const int seg = std::min(2, static_cast<int>(scaled));
  const double t = scaled - seg;
  const Rgb& lo = kRamp[seg];
  const Rgb& hi = kRamp[seg + 1];
  const Rgb c{static_cast<int>(std::lround(lo.r + t * (hi.r - lo.r))),
              static_cast<int>(std::lround(lo.g + t * (hi.g - lo.g))),
              static_cast<int>(std::lround(lo.b + t * (hi.b - lo.b)))};
  return to_hex(c);
}

std::string render_timespace_svg(
    const std::vector<trainer::TrajectorySample>& samples, double capacity,
    double route_length_km) {
  if (samples.empty())
    throw std::invalid_argument("render_timespace_svg: empty log");
  if (capacity <= 0 || route_length_km <= 0)
    throw std::invalid_argument("render_timespace_svg: bad bounds");

  double t_min = samples.front().time_s, t_max = samples.front().time_s;
  for (const auto& s : samples) {
    t_min = std::min(t_min, s.time_s);
    t_max = std::max(t_max, s.time_s);
  }
  if (t_max <= t_min) t_max = t_min + 1.0;

  const auto x_of = [&](double t) {
    return kMargin + (t - t_min) / (t_max - t_min) * (kWidth - 2 * kMargin);
  };
  const auto y_of = [&](double pos) {
    return kHeight - kMargin - pos / route_length_km * (kHeight - 2 * kMargin);
  };

  std::map<int, std::vector<const trainer::TrajectorySample*>> by_bus;
  for (const auto& s : samples) by_bus[s.bus_id].push_back(&s);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
     << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  os << "<line x1=\"" << fmt(kMargin) << "\" y1=\"" << fmt(kHeight - kMargin)
     << "\" x2=\"" << fmt(kWidth - kMargin) << "\" y2=\""
     << fmt(kHeight - kMargin) << "\" stroke=\"#333333\"/>\n";
  os << "<line x1=\"" << fmt(kMargin) << "\" y1=\"" << fmt(kMargin)
     << "\" x2=\"" << fmt(kMargin) << "\" y2=\"" << fmt(kHeight - kMargin)
     << "\" stroke=\"#333333\"/>\n";
  os << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"" << fmt(kHeight - 10)
     << "\" font-size=\"13\" text-anchor=\"middle\">time (s)</text>\n";
  os << "<text x=\"14\" y=\"" << fmt(kHeight / 2)
     << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
     << fmt(kHeight / 2) << ")\">position (km)</text>\n";

  for (const auto& [bus, pts] : by_bus) {
    os << "<g id=\"bus-" << bus << "\">\n";
    // split the trajectory into runs of (nearly) constant occupancy so
    // each polyline carries one ramp color
    std::size_t start = 0;
    const auto bucket = [&](const trainer::TrajectorySample* p) {
      return static_cast<int>(
          std::lround(std::clamp(p->occupancy / capacity, 0.0, 1.0) * 20.0));
    };
    for (std::size_t i = 1; i <= pts.size(); ++i) {
      if (i < pts.size() && bucket(pts[i]) == bucket(pts[start])) continue;
      const std::size_t end = std::min(i, pts.size() - 1);
      os << "<polyline fill=\"none\" stroke=\""
         << occupancy_color(pts[start]->occupancy / capacity)
         << "\" stroke-width=\"1.4\" points=\"";
      for (std::size_t j = start; j <= end; ++j) {
        if (j > start) os << ' ';
        os << fmt(x_of(pts[j]->time_s)) << ',' << fmt(y_of(pts[j]->position_km));
      }
      os << "\"/>\n";
      start = i;
      if (start >= pts.size()) break;
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_timespace_svg(const std::vector<trainer::TrajectorySample>& samples,
                         double capacity, double route_length_km,
                         const std::string& path) {
  write_file(path, render_timespace_svg(samples, capacity, route_length_km));
}

std::string render_weights_svg(const std::vector<WeightSeries>& series) {
  if (series.empty())
    throw std::invalid_argument("render_weights_svg: no series");
  double w_min = 0.0, w_max = 1.0;
  for (const auto& s : series)
    for (double w : s.weights) {
      w_min = std::min(w_min, w);
      w_max = std::max(w_max, w);
    }
  if (w_max <= w_min) w_max = w_min + 1.0;

  const auto x_of = [&](double tau) {
    return kMargin + tau * (kWidth - 2 * kMargin);
  };
  const auto y_of = [&](double w) {
    return kHeight - kMargin -
           (w - w_min) / (w_max - w_min) * (kHeight - 2 * kMargin);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
     << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  os << "<line x1=\"" << fmt(kMargin) << "\" y1=\"" << fmt(kHeight - kMargin)
     << "\" x2=\"" << fmt(kWidth - kMargin) << "\" y2=\""
     << fmt(kHeight - kMargin) << "\" stroke=\"#333333\"/>\n";
  os << "<line x1=\"" << fmt(kMargin) << "\" y1=\"" << fmt(kMargin)
     << "\" x2=\"" << fmt(kMargin) << "\" y2=\"" << fmt(kHeight - kMargin)
     << "\" stroke=\"#333333\"/>\n";
  os << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"" << fmt(kHeight - 10)
     << "\" font-size=\"13\" text-anchor=\"middle\">quantile fraction</text>\n";
  os << "<text x=\"14\" y=\"" << fmt(kHeight / 2)
     << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
     << fmt(kHeight / 2) << ")\">distortion weight</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    if (s.taus.size() != s.weights.size() || s.taus.empty())
      throw std::invalid_argument("render_weights_svg: ragged series");
    const char* color = kSeriesColors[i % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t j = 0; j < s.taus.size(); ++j) {
      if (j > 0) os << ' ';
      os << fmt(x_of(s.taus[j])) << ',' << fmt(y_of(s.weights[j]));
    }
    os << "\"/>\n";
    os << "<text x=\"" << fmt(kWidth - kMargin + 4) << "\" y=\""
       << fmt(y_of(s.weights.back())) << "\" font-size=\"11\" fill=\"" << color
       << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_weights_svg(const std::vector<WeightSeries>& series,
                       const std::string& path) {
  write_file(path, render_weights_svg(series));
}

}  // namespace transit::io
