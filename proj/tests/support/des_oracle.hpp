#pragma once

#include <algorithm>
#include <deque>
#include <queue>
#include <vector>

#include "lean3d/streamsim.hpp"

namespace lean3d::test {

/// Event-queue simulation of three FIFO servers in series. Shares nothing
/// with the closed-form recurrence except the trace format.
inline std::vector<double> des_latencies(const std::vector<TraceRecord>& trace, double bandwidth_bytes_per_s,
                                         double arrival_period_ms) {
  struct Event {
    double time;
    int kind;  // 0 arrival, 1..3 service completion at server kind-1
    std::size_t frame;
    bool operator>(const Event& o) const {
      if (time != o.time) return time > o.time;
      if (kind != o.kind) return kind < o.kind;  // later stages first so queues drain before new work starts
      return frame > o.frame;
    }
  };
  const std::size_t n = trace.size();
  auto service = [&](int server, std::size_t i) {
    if (server == 0) return trace[i].t_enc_ms;
    if (server == 1) return static_cast<double>(trace[i].bytes) * 1000.0 / bandwidth_bytes_per_s;
    return trace[i].t_dec_ms;
  };

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::deque<std::size_t> waiting[3];
  bool busy[3] = {false, false, false};
  std::vector<double> start(n, 0.0), done(n, 0.0);

  auto try_start = [&](int server, double now) {
    if (busy[server] || waiting[server].empty()) return;
    const std::size_t i = waiting[server].front();
    waiting[server].pop_front();
    busy[server] = true;
    if (server == 0) start[i] = now;
    events.push({now + service(server, i), server + 1, i});
  };

  for (std::size_t i = 0; i < n; ++i) events.push({static_cast<double>(i) * arrival_period_ms, 0, i});
  while (!events.empty()) {
    const Event e = events.top();
    events.pop();
    if (e.kind == 0) {
      waiting[0].push_back(e.frame);
      try_start(0, e.time);
      continue;
    }
    const int server = e.kind - 1;
    busy[server] = false;
    if (server < 2) {
      waiting[server + 1].push_back(e.frame);
      try_start(server + 1, e.time);
    } else {
      done[e.frame] = e.time;
    }
    try_start(server, e.time);
  }
  std::vector<double> latency(n);
  for (std::size_t i = 0; i < n; ++i) latency[i] = done[i] - start[i];
  return latency;
}

}  // namespace lean3d::test
