#include "lean3d/streamsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lean3d/error.hpp"

namespace lean3d {

double link_time_ms(std::uint64_t bytes, double bandwidth_bytes_per_s) {
  if (std::isinf(bandwidth_bytes_per_s)) return 0.0;
  return static_cast<double>(bytes) * 1000.0 / bandwidth_bytes_per_s;
}

SimResult simulate(const std::vector<TraceRecord>& trace, double bandwidth_bytes_per_s, double arrival_period_ms) {
  if (!(bandwidth_bytes_per_s > 0.0)) fail(ErrorKind::kParameter, "bandwidth must be positive");
  if (trace.empty()) fail(ErrorKind::kUsage, "trace is empty");
  if (!(arrival_period_ms >= 0.0)) fail(ErrorKind::kParameter, "arrival period must be non-negative");

  SimResult r;
  r.bandwidth_bytes_per_s = bandwidth_bytes_per_s;
  r.frames.reserve(trace.size());
  FrameTiming prev{};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& rec = trace[i];
    if (rec.t_enc_ms < 0 || rec.t_dec_ms < 0) fail(ErrorKind::kInput, "negative time in trace");
    const double available = static_cast<double>(i) * arrival_period_ms;
    FrameTiming f;
    f.enc_start = i == 0 ? available : std::max(available, prev.enc_finish);
    f.enc_finish = f.enc_start + rec.t_enc_ms;
    f.net_start = i == 0 ? f.enc_finish : std::max(f.enc_finish, prev.net_finish);
    f.net_finish = f.net_start + link_time_ms(rec.bytes, bandwidth_bytes_per_s);
    f.dec_start = i == 0 ? f.net_finish : std::max(f.net_finish, prev.dec_finish);
    f.dec_finish = f.dec_start + rec.t_dec_ms;
    f.latency = f.dec_finish - f.enc_start;
    r.frames.push_back(f);
    prev = f;
  }

  std::vector<double> lat;
  lat.reserve(r.frames.size());
  for (const auto& f : r.frames) lat.push_back(f.latency);
  r.mean_latency_ms = std::accumulate(lat.begin(), lat.end(), 0.0) / static_cast<double>(lat.size());
  const double end = r.frames.back().dec_finish;
  r.throughput_fps = end > 0 ? static_cast<double>(r.frames.size()) * 1000.0 / end
                             : std::numeric_limits<double>::infinity();
  const std::vector<double> tail(lat.begin() + static_cast<std::ptrdiff_t>(lat.size() / 2), lat.end());
  r.backlog_slope_ms = least_squares_slope(tail);
  r.backlog = r.backlog_slope_ms > kBacklogSlopeMs;
  return r;
}

double least_squares_slope(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean_x = static_cast<double>(n - 1) / 2.0;
  const double mean_y = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - mean_x;
    sxy += dx * (values[i] - mean_y);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) fail(ErrorKind::kUsage, "percentile of an empty sequence");
  std::sort(values.begin(), values.end());
  const double rank = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

SimSummary summarize(const SimResult& r) {
  std::vector<double> lat;
  for (const auto& f : r.frames) lat.push_back(f.latency);
  SimSummary s;
  s.bandwidth_bytes_per_s = r.bandwidth_bytes_per_s;
  s.mean_ms = std::accumulate(lat.begin(), lat.end(), 0.0) / static_cast<double>(lat.size());
  s.median_ms = percentile(lat, 50.0);
  s.p95_ms = percentile(lat, 95.0);
  s.throughput_fps = r.throughput_fps;
  s.backlog_slope_ms = r.backlog_slope_ms;
  s.backlog = r.backlog;
  return s;
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::kFormat, "trace CSV is empty");
  std::vector<std::string> cols;
  {
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) {
      c.erase(std::remove_if(c.begin(), c.end(), [](unsigned char ch) { return std::isspace(ch); }), c.end());
      cols.push_back(c);
    }
  }
  auto col = [&](const char* name) {
    auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) fail(ErrorKind::kFormat, std::string("trace CSV lacks column ") + name);
    return static_cast<std::size_t>(it - cols.begin());
  };
  const std::size_t ie = col("t_enc_ms"), ib = col("bytes"), id = col("t_dec_ms");

  std::vector<TraceRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) f.push_back(c);
    if (f.size() < cols.size()) fail(ErrorKind::kFormat, "trace CSV line " + std::to_string(line_no) + " is short");
    try {
      TraceRecord r;
      r.t_enc_ms = std::stod(f[ie]);
      r.bytes = std::stoull(f[ib]);
      r.t_dec_ms = std::stod(f[id]);
      if (!(r.t_enc_ms >= 0) || !(r.t_dec_ms >= 0)) throw std::invalid_argument("negative");
      out.push_back(r);
    } catch (const std::logic_error&) {
      fail(ErrorKind::kFormat, "trace CSV line " + std::to_string(line_no) + " has a bad value");
    }
  }
  return out;
}

std::vector<TraceRecord> read_trace_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path);
  return read_trace_csv(in);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "t_enc_ms,bytes,t_dec_ms\n" << std::setprecision(17);
  for (const auto& r : trace) out << r.t_enc_ms << ',' << r.bytes << ',' << r.t_dec_ms << '\n';
}

void write_results_csv(std::ostream& out, const std::vector<SimResult>& results) {
  out << "kind,bandwidth_mbps,frame,enc_start_ms,net_finish_ms,dec_finish_ms,latency_ms,"
         "mean_ms,median_ms,p95_ms,throughput_fps,backlog_slope_ms_per_frame,backlog\n";
  out << std::setprecision(10);
  for (const auto& r : results) {
    const double mbps = r.bandwidth_bytes_per_s / 1e6;
    for (std::size_t i = 0; i < r.frames.size(); ++i) {
      const auto& f = r.frames[i];
      out << "frame," << mbps << ',' << i << ',' << f.enc_start << ',' << f.net_finish << ',' << f.dec_finish << ','
          << f.latency << ",,,,,,\n";
    }
    const auto s = summarize(r);
    out << "summary," << mbps << ",,,,,," << s.mean_ms << ',' << s.median_ms << ',' << s.p95_ms << ','
        << s.throughput_fps << ',' << s.backlog_slope_ms << ',' << (s.backlog ? 1 : 0) << '\n';
  }
}

}  // namespace lean3d
