#pragma once

// Discrete-event model of a provider's warm pool and a monthly cost model.
//
// Model, in simulated milliseconds:
//  - a request takes the most recently used idle warm instance and is served
//    in serviceTimeMs;
//  - otherwise a new instance is started, paying coldStartMs first, as long
//    as fewer than maxInstances exist;
//  - otherwise the request waits in an unbounded FIFO queue for the first
//    instance to free up (which is warm at that moment);
//  - an instance idle for expiryMinutes or longer is evicted;
//  - every periodMinutes, if warming is enabled, the warming event refreshes
//    up to warmPoolTarget idle instances (most recently used first). Warming
//    invocations do not occupy instances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <istream>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "infraloom/config.hpp"
#include "infraloom/error.hpp"
#include "infraloom/schema.hpp"

namespace infraloom::sim {

struct Arrival {
  double arrival_ms = 0;
  int concurrency = 1;  // requests arriving together at arrival_ms
};

struct Instance {
  double free_at = 0;    // when it finished (or will finish) its current work
  double last_used = 0;  // last time it served or was warmed
};

struct WarmPoolState {
  std::vector<Instance> instances;
  int max_instances = 1000;
  double expiry_minutes = 15;
  double cold_start_ms = 400;
  double service_time_ms = 200;
  int warm_pool_target = 1;

  double expiry_ms() const { return expiry_minutes * 60'000.0; }
};

inline WarmPoolState state_from_config(const ProjectConfig& c) {
  WarmPoolState s;
  s.max_instances = c.max_instances;
  s.expiry_minutes = c.expiry_minutes;
  s.cold_start_ms = c.cold_start_ms;
  s.service_time_ms = c.service_time_ms;
  s.warm_pool_target = c.warm_pool_target;
  return s;
}

// Instances warm at `now` (busy instances count as warm).
inline std::size_t warm_count(const WarmPoolState& s, double now) {
  return std::count_if(s.instances.begin(), s.instances.end(), [&](const Instance& i) {
    return i.free_at > now || now - i.last_used < s.expiry_ms();
  });
}

inline double max_throughput_rps(const WarmPoolState& s) {
  return s.max_instances * 1000.0 / s.service_time_ms;
}

struct Metrics {
  std::size_t requests = 0;        // requests inside the measurement window
  std::size_t cold_starts = 0;     // of those, how many paid a cold start
  double cold_fraction = 0;
  double p50_latency_ms = 0;
  double p99_latency_ms = 0;
  double max_throughput_rps = 0;
  double served_rps = 0;           // all requests / (last completion - first arrival)
  std::size_t peak_instances = 0;
  std::size_t dropped = 0;         // always 0: the queue is unbounded
  std::size_t warming_invocations = 0;
  double makespan_ms = 0;
};

struct SimulationOptions {
  // Requests arriving before this time are simulated but excluded from
  // cold_fraction and the latency percentiles.
  double measure_from_ms = 0;
};

// Nearest-rank percentile of an ascending sample.
inline double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0;
  auto rank = static_cast<std::size_t>(std::ceil(p * sorted.size()));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

// Runs the workload against `state`, leaving the final pool in it.
//
// Throws Error("InvalidWorkload") if arrivals are not sorted ascending or a
// concurrency is negative.
inline Metrics simulate_warm_pool(const std::vector<Arrival>& workload, WarmPoolState& state,
                                  const WarmingConfig& warming, const SimulationOptions& options = {}) {
  for (std::size_t i = 0; i < workload.size(); ++i) {
    if (workload[i].concurrency < 0 || !std::isfinite(workload[i].arrival_ms) ||
        (i > 0 && workload[i].arrival_ms < workload[i - 1].arrival_ms)) {
      throw Error("InvalidWorkload", "InvalidWorkload: arrivals must be sorted ascending with "
                                     "nonnegative concurrency (row " + std::to_string(i + 1) + ")");
    }
  }

  Metrics m;
  m.max_throughput_rps = max_throughput_rps(state);
  const double expiry = state.expiry_ms();
  const double service = state.service_time_ms;

  // Idle instances by ascending last use; back is the most recent.
  std::deque<double> idle;
  // Completion times of busy instances.
  std::priority_queue<double, std::vector<double>, std::greater<>> busy;
  for (const auto& inst : state.instances) busy.push(std::max(inst.free_at, inst.last_used));

  auto advance_to = [&](double now) {
    while (!busy.empty() && busy.top() <= now) {
      double done = busy.top();
      busy.pop();
      // Keep idle sorted; releases arrive in completion order except for
      // instances handed in through the initial state.
      auto pos = std::upper_bound(idle.begin(), idle.end(), done);
      idle.insert(pos, done);
    }
    while (!idle.empty() && now - idle.front() >= expiry) idle.pop_front();
  };

  const double period = warming.period_minutes * 60'000.0;
  double next_tick = period;
  const double horizon = workload.empty() ? 0 : workload.back().arrival_ms;
  auto run_ticks_until = [&](double now) {
    if (!warming.enabled) return;
    while (next_tick <= now && next_tick <= horizon) {
      advance_to(next_tick);
      std::size_t live = idle.size() + busy.size();
      std::size_t k = std::min<std::size_t>(std::min<std::size_t>(state.warm_pool_target, live), idle.size());
      for (std::size_t j = 0; j < k; ++j) idle[idle.size() - 1 - j] = next_tick;
      ++m.warming_invocations;
      next_tick += period;
    }
  };

  std::vector<double> latencies;
  double first_arrival = workload.empty() ? 0 : workload.front().arrival_ms;
  double last_completion = first_arrival;
  std::size_t total = 0;

  for (const auto& a : workload) {
    run_ticks_until(a.arrival_ms);
    for (int r = 0; r < a.concurrency; ++r) {
      const double t = a.arrival_ms;
      advance_to(t);
      double latency;
      bool cold = false;
      if (!idle.empty()) {
        idle.pop_back();
        latency = service;
      } else if (static_cast<int>(busy.size()) < state.max_instances) {
        latency = state.cold_start_ms + service;
        cold = true;
      } else {
        double start = busy.top();
        busy.pop();
        latency = start - t + service;
      }
      busy.push(t + latency);
      m.peak_instances = std::max(m.peak_instances, idle.size() + busy.size());
      last_completion = std::max(last_completion, t + latency);
      ++total;
      if (t >= options.measure_from_ms) {
        ++m.requests;
        if (cold) ++m.cold_starts;
        latencies.push_back(latency);
      }
    }
  }

  state.instances.clear();
  for (double used : idle) state.instances.push_back({used, used});
  while (!busy.empty()) {
    state.instances.push_back({busy.top(), busy.top()});
    busy.pop();
  }

  std::sort(latencies.begin(), latencies.end());
  m.cold_fraction = m.requests ? static_cast<double>(m.cold_starts) / m.requests : 0.0;
  m.p50_latency_ms = percentile(latencies, 0.50);
  m.p99_latency_ms = percentile(latencies, 0.99);
  m.makespan_ms = total ? last_completion - first_arrival : 0;
  m.served_rps = m.makespan_ms > 0 ? total * 1000.0 / m.makespan_ms : 0;
  return m;
}

// `arrival_ms,concurrency` rows; an optional header row and blank lines are
// allowed. Throws Error("MalformedWorkload").
inline std::vector<Arrival> parse_workload_csv(std::istream& in) {
  std::vector<Arrival> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = infraloom::detail::trim(line);
    if (t.empty()) continue;
    if (lineno == 1 && t == "arrival_ms,concurrency") continue;
    auto comma = t.find(',');
    auto bad = [&] {
      return Error("MalformedWorkload",
                   "MalformedWorkload: line " + std::to_string(lineno) + ": '" + t + "'");
    };
    if (comma == std::string::npos) throw bad();
    std::string a = infraloom::detail::trim(std::string_view(t).substr(0, comma));
    std::string c = infraloom::detail::trim(std::string_view(t).substr(comma + 1));
    Arrival arr;
    auto r1 = std::from_chars(a.data(), a.data() + a.size(), arr.arrival_ms);
    auto r2 = std::from_chars(c.data(), c.data() + c.size(), arr.concurrency);
    if (r1.ec != std::errc() || r1.ptr != a.data() + a.size() || r2.ec != std::errc() ||
        r2.ptr != c.data() + c.size() || arr.concurrency < 0 || !std::isfinite(arr.arrival_ms)) {
      throw bad();
    }
    out.push_back(arr);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cost

inline constexpr double kWarmingDurationMs = 10;
inline constexpr double kMinutesPerMonth = 30 * 24 * 60;

struct CostParams {
  double price_per_request = 0;
  double price_per_gb_second = 0;
  double memory_gb = 3;
  double requests_per_month = 0;
  double avg_duration_ms = 0;
  double warming_per_month = 0;
};

// Warming invocations in a 30-day month.
inline double warming_per_month(const WarmingConfig& w) {
  return w.enabled ? std::floor(kMinutesPerMonth / w.period_minutes) : 0;
}

// Monthly cost: per-request charge for user requests plus compute charge for
// user requests at their average duration and warming calls at 10 ms each.
inline double estimate_cost(const CostParams& p) {
  double gb_seconds = (p.requests_per_month * p.avg_duration_ms / 1000.0 +
                       p.warming_per_month * kWarmingDurationMs / 1000.0) *
                      p.memory_gb;
  return p.requests_per_month * p.price_per_request + gb_seconds * p.price_per_gb_second;
}

// Pricing file: `price_per_request`, `price_per_gb_second`,
// `requests_per_month`, `avg_duration_ms` and optionally `memory_gb`.
// Throws ConfigError.
inline CostParams parse_pricing(std::istream& in, const std::string& name, const ProjectConfig& config) {
  CostParams p;
  p.memory_gb = config.memory_gb;
  p.warming_per_month = warming_per_month({config.warming_enabled, config.warming_period_minutes});
  for (const auto& [key, entry] : infraloom::detail::read_key_values(in, name)) {
    const auto& [value, line] = entry;
    double v = infraloom::detail::parse_number<double>(value, name, key, line);
    if (v < 0) throw ConfigError(name, line, "'" + key + "' must be >= 0");
    if (key == "price_per_request") {
      p.price_per_request = v;
    } else if (key == "price_per_gb_second") {
      p.price_per_gb_second = v;
    } else if (key == "requests_per_month") {
      p.requests_per_month = v;
    } else if (key == "avg_duration_ms") {
      p.avg_duration_ms = v;
    } else if (key == "memory_gb") {
      p.memory_gb = v;
    } else {
      throw ConfigError(name, line, "unknown key '" + key + "'");
    }
  }
  return p;
}

}  // namespace infraloom::sim
