#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lean3d {

/// One frame of a measured codec trace. Times are milliseconds.
struct TraceRecord {
  double t_enc_ms = 0.0;
  std::uint64_t bytes = 0;
  double t_dec_ms = 0.0;
};

struct FrameTiming {
  double enc_start = 0.0, enc_finish = 0.0;
  double net_start = 0.0, net_finish = 0.0;
  double dec_start = 0.0, dec_finish = 0.0;
  double latency = 0.0;  // dec_finish - enc_start
};

/// Frames are served first-come first-served by encoder, link, and decoder in turn.
struct SimResult {
  double bandwidth_bytes_per_s = 0.0;
  std::vector<FrameTiming> frames;
  double mean_latency_ms = 0.0;
  double throughput_fps = 0.0;       // frames / completion time of the last frame
  double backlog_slope_ms = 0.0;     // least-squares latency slope, trailing half
  bool backlog = false;
};

/// Trailing-half latency slope above this many ms/frame flags a backlog.
inline constexpr double kBacklogSlopeMs = 1.0;

/// Link service time of a frame: bytes / B, in milliseconds.
double link_time_ms(std::uint64_t bytes, double bandwidth_bytes_per_s);

SimResult simulate(const std::vector<TraceRecord>& trace, double bandwidth_bytes_per_s,
                   double arrival_period_ms = 0.0);

/// Least-squares slope of values[i] against i. Zero for fewer than two points.
double least_squares_slope(const std::vector<double>& values);

/// Linear-interpolation percentile, p in [0, 100].
double percentile(std::vector<double> values, double p);

struct SimSummary {
  double bandwidth_bytes_per_s = 0.0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double throughput_fps = 0.0;
  double backlog_slope_ms = 0.0;
  bool backlog = false;
};

SimSummary summarize(const SimResult& result);

/// CSV with header t_enc_ms,bytes,t_dec_ms.
std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv_file(const std::string& path);
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

/// Per-frame rows followed by one summary row per simulated bandwidth.
void write_results_csv(std::ostream& out, const std::vector<SimResult>& results);

}  // namespace lean3d
