#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sfc {

struct TrafficParams {
  double lambda = 0.0;   // aggregate event rate per subsymbol interval
  int64_t horizon = 0;   // number of subsymbol intervals simulated
  int num_sensors = 1;   // events are spread across this many independent sources
  // false: per-sensor renewal traffic (exponential gaps, the physical model).
  // true: idealized mode drawing the per-interval total directly from
  // Poisson(lambda) and assigning sensors uniformly — the distribution the
  // closed-form analysis actually assumes.
  bool exact_poisson = false;
};

// One transmission trigger: sensor `sensor` starts its codeword at interval
// `time`. `offset` in [0,1) is where inside the interval the underlying event
// fired (kept for contention models that work in continuous time).
struct Flag {
  int64_t time = 0;
  int32_t sensor = 0;
  double offset = 0.0;
};

// Sorted by (time, sensor); at most one flag per (time, sensor) pair —
// multiple triggers of one sensor inside one interval collapse into one
// transmission start.
struct EventLog {
  int64_t horizon = 0;
  int num_sensors = 0;
  std::vector<Flag> flags;
};

// Per-sensor renewal traffic: each sensor fires at exponential gaps with mean
// num_sensors/lambda intervals, so the aggregate rate is lambda per interval.
// Warns on stderr (but proceeds) when num_sensors/lambda < 10, where the
// per-interval totals drift away from Poisson(lambda).
EventLog generate_events(const TrafficParams& params, uint64_t seed);

// Upward-crossing detector for a sampled waveform. Sample times must be
// strictly increasing and at least two samples are required. With
// S(t) = [value >= threshold], interval n covers physical time
// [(n-1)*tau, n*tau), and flag n is set iff the interval holds samples
// x < y with S(x) = 0 and S(y) = 1. Returns one indicator per n in
// [0, horizon); index 0 covers [-tau, 0) and so stays clear.
std::vector<uint8_t> events_from_signal(const std::vector<double>& times,
                                        const std::vector<double>& values, double threshold,
                                        double tau, int64_t horizon);

// CSV round-trip, schema: header "n,sensor_id" then one row per flag.
// Offsets are not persisted; reading assigns offset 0.
void write_events_csv(std::ostream& out, const EventLog& log);
EventLog read_events_csv(std::istream& in, int64_t horizon, int num_sensors);
void write_events_file(const std::string& path, const EventLog& log);
EventLog read_events_file(const std::string& path, int64_t horizon, int num_sensors);

}  // namespace sfc
