#include "transit/io/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace transit::io {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string render_report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << "agent,route,sigma_d,sigma_s,anomaly,seed_count,aht_s,awt_s,ajt_s,"
        "att_s,aod,d_awt_s,d_att_s,d_aod\n";
  for (const auto& r : rows) {
    os << r.agent << ',' << r.route << ',' << format_double(r.sigma_d) << ','
       << format_double(r.sigma_s) << ',' << r.anomaly << ',' << r.seed_count
       << ',' << format_double(r.aht_s) << ',' << opt_str(r.awt_s) << ','
       << opt_str(r.ajt_s) << ',' << opt_str(r.att_s) << ','
       << format_double(r.aod) << ',' << opt_str(r.d_awt_s) << ','
       << opt_str(r.d_att_s) << ',' << opt_str(r.d_aod) << '\n';
  }
  return os.str();
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("report csv: missing header");
  std::vector<ReportRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != 14)
      throw std::runtime_error("report csv: bad column count");
    ReportRow r;
    r.agent = f[0];
    r.route = f[1];
    r.sigma_d = std::stod(f[2]);
    r.sigma_s = std::stod(f[3]);
    r.anomaly = f[4];
    r.seed_count = std::stoi(f[5]);
    r.aht_s = std::stod(f[6]);
    r.awt_s = parse_opt(f[7]);
    r.ajt_s = parse_opt(f[8]);
    r.att_s = parse_opt(f[9]);
    r.aod = std::stod(f[10]);
    r.d_awt_s = parse_opt(f[11]);
    r.d_att_s = parse_opt(f[12]);
    r.d_aod = parse_opt(f[13]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_report_csv(const std::vector<ReportRow>& rows,
                      const std::string& path) {
  write_file(path, render_report_csv(rows));
}

ReportRow report_row_from(const trainer::EvalCellResult& cell,
                          const std::string& agent, const std::string& route) {
  ReportRow r;
  r.agent = agent;
  r.route = route;
  r.sigma_d = cell.cell.sigma_d;
  r.sigma_s = cell.cell.sigma_s;
  r.anomaly = cell.cell.anomaly_label;
  r.seed_count = cell.n_seeds;
  r.aht_s = cell.mean.aht_s;
  r.awt_s = cell.mean.awt_s;
  r.ajt_s = cell.mean.ajt_s;
  r.att_s = cell.mean.att_s;
  r.aod = cell.mean.aod;
  r.d_awt_s = cell.mean.d_awt_s;
  r.d_att_s = cell.mean.d_att_s;
  r.d_aod = cell.mean.d_aod;
  return r;
}

void write_trajectory_csv(const std::vector<trainer::TrajectorySample>& samples,
                          double tick_s, const std::string& path) {
  std::ostringstream os;
  os << "tick,bus_id,position_km,phase,occupancy\n";
  for (const auto& s : samples)
    os << static_cast<long long>(std::llround(s.time_s / tick_s)) << ','
       << s.bus_id << ',' << format_double(s.position_km) << ','
       << sim::to_string(s.phase) << ',' << s.occupancy << '\n';
  write_file(path, os.str());
}

std::vector<trainer::TrajectorySample> read_trajectory_csv(
    const std::string& path, double tick_s) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("trajectory csv: missing header");
  std::vector<trainer::TrajectorySample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != 5) throw std::runtime_error("trajectory csv: bad row");
    trainer::TrajectorySample s;
    s.time_s = std::stod(f[0]) * tick_s;
    s.bus_id = std::stoi(f[1]);
    s.position_km = std::stod(f[2]);
    s.phase = sim::BusPhase::Cruising;
    for (auto p : {sim::BusPhase::WaitingDispatch, sim::BusPhase::Cruising,
                   sim::BusPhase::Dwelling, sim::BusPhase::Holding,
                   sim::BusPhase::Finished})
      if (f[3] == sim::to_string(p)) s.phase = p;
    s.occupancy = std::stoi(f[4]);
    out.push_back(s);
  }
  return out;
}

void write_curves_csv(const std::vector<trainer::TrainCurvePoint>& curves,
                      const std::string& path) {
  std::ostringstream os;
  os << "episode,mean_reward,critic_loss,mean_aht\n";
  for (const auto& c : curves)
    os << c.episode << ',' << format_double(c.mean_reward) << ','
       << format_double(c.critic_loss) << ',' << format_double(c.mean_aht_s)
       << '\n';
  write_file(path, os.str());
}

void write_weights_csv(const std::vector<WeightSeries>& series,
                       const std::string& path) {
  if (series.empty()) throw std::invalid_argument("write_weights_csv: empty");
  std::ostringstream os;
  os << "tau_hat";
  for (const auto& s : series) os << ',' << s.label;
  os << '\n';
  const std::size_t n = series.front().taus.size();
  for (const auto& s : series)
    if (s.taus.size() != n || s.weights.size() != n)
      throw std::invalid_argument("write_weights_csv: ragged series");
  for (std::size_t i = 0; i < n; ++i) {
    os << format_double(series.front().taus[i]);
    for (const auto& s : series) os << ',' << format_double(s.weights[i]);
    os << '\n';
  }
  write_file(path, os.str());
}

std::vector<WeightSeries> read_weights_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("weights csv: missing header");
  const auto header = split_line(line);
  if (header.size() < 2 || header[0] != "tau_hat")
    throw std::runtime_error("weights csv: bad header");
  std::vector<WeightSeries> series(header.size() - 1);
  for (std::size_t i = 1; i < header.size(); ++i)
    series[i - 1].label = header[i];
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != header.size())
      throw std::runtime_error("weights csv: ragged row");
    const double tau = std::stod(f[0]);
    for (std::size_t i = 1; i < f.size(); ++i) {
      series[i - 1].taus.push_back(tau);
      series[i - 1].weights.push_back(std::stod(f[i]));
    }
  }
  return series;
}

std::string experience_to_jsonl(const env::Experience& exp, int agent_id) {
  nlohmann::json j;
  j["agent"] = agent_id;
  j["s"] = {{"h_fwd_s", exp.s.h_fwd_s},
            {"h_bwd_s", exp.s.h_bwd_s},
            {"onboard", exp.s.onboard},
            {"waiting", exp.s.waiting}};
  j["a"] = exp.a;
  j["r"] = {{"r", exp.r.r}, {"cv2", exp.r.cv2}, {"a", exp.r.a}, {"w", exp.r.w}};
  j["s_next"] = {{"h_fwd_s", exp.s_next.h_fwd_s},
                 {"h_bwd_s", exp.s_next.h_bwd_s},
                 {"onboard", exp.s_next.onboard},
                 {"waiting", exp.s_next.waiting}};
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : exp.g.events)
    events.push_back({{"action", e.action},
                      {"d_stop", e.d_stop},
                      {"d_time", e.d_time}});
  j["g"] = {{"n_events", exp.g.event_count()}, {"events", events}};
  return j.dump();
}

void write_experiences_jsonl(
    const std::vector<std::pair<int, env::Experience>>& experiences,
    const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& [agent, exp] : experiences)
    out << experience_to_jsonl(exp, agent) << '\n';
}

}  // namespace transit::io
