#include "sfc/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "sfc/rng.hpp"

namespace sfc {

namespace {

void sort_flags(std::vector<Flag>& flags) {
  std::sort(flags.begin(), flags.end(), [](const Flag& a, const Flag& b) {
    return a.time != b.time ? a.time < b.time : a.sensor < b.sensor;
  });
}

// Knuth product-of-uniforms sampler; fine for the modest rates used here
int poisson_draw(Rng& rng, double mean) {
  double limit = std::exp(-mean);
  double prod = 1.0;
  int count = -1;
  do {
    prod *= rng.next_unit();
    ++count;
  } while (prod > limit);
  return count;
}

}  // namespace

EventLog generate_events(const TrafficParams& params, uint64_t seed) {
  if (params.lambda < 0) throw std::invalid_argument("lambda must be >= 0");
  if (params.horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  if (params.num_sensors < 1) throw std::invalid_argument("num_sensors must be >= 1");
  if (params.lambda > 0 && params.num_sensors / params.lambda < 10.0)
    std::cerr << "warning: sensor count / lambda = "
              << params.num_sensors / params.lambda
              << " < 10; per-interval totals will deviate from the analyzed regime\n";

  EventLog log;
  log.horizon = params.horizon;
  log.num_sensors = params.num_sensors;
  if (params.lambda == 0.0 || params.horizon == 0) return log;

  if (params.exact_poisson) {
    // idealized mode: totals are exactly Poisson, sensors drawn uniformly
    Rng rng(derive_seed(seed, 0x1DEA15EDULL));
    std::vector<int64_t> last_flagged(static_cast<size_t>(params.num_sensors), -1);
    for (int64_t n = 0; n < params.horizon; ++n) {
      int c = poisson_draw(rng, params.lambda);
      for (int i = 0; i < c; ++i) {
        auto sensor = static_cast<int32_t>(rng.next_below(static_cast<uint32_t>(params.num_sensors)));
        double offset = rng.next_unit();
        if (last_flagged[static_cast<size_t>(sensor)] == n) continue;  // same-interval collapse
        last_flagged[static_cast<size_t>(sensor)] = n;
        log.flags.push_back({n, sensor, offset});
      }
    }
    sort_flags(log.flags);
    return log;
  }

  const double mean_gap = params.num_sensors / params.lambda;
  for (int32_t sensor = 0; sensor < params.num_sensors; ++sensor) {
    Rng rng(derive_seed(seed, 0x7FA66E00ULL, static_cast<uint64_t>(sensor)));
    double t = rng.next_exponential(mean_gap);
    int64_t last_flagged = -1;
    while (t < static_cast<double>(params.horizon)) {
      int64_t n = static_cast<int64_t>(t);
      if (n > last_flagged) {
        // first trigger in the interval becomes the transmission start;
        // later triggers of the same sensor in the same interval are absorbed
        log.flags.push_back({n, sensor, t - static_cast<double>(n)});
        last_flagged = n;
      }
      t += rng.next_exponential(mean_gap);
    }
  }
  sort_flags(log.flags);
  return log;
}

std::vector<uint8_t> events_from_signal(const std::vector<double>& times,
                                        const std::vector<double>& values, double threshold,
                                        double tau, int64_t horizon) {
  if (times.size() != values.size()) throw std::invalid_argument("times/values length mismatch");
  if (times.size() < 2) throw std::invalid_argument("need at least two samples");
  if (tau <= 0) throw std::invalid_argument("tau must be > 0");
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("sample times must strictly increase");

  std::vector<uint8_t> flagged(static_cast<size_t>(horizon), 0);
  int64_t cur_interval = INT64_MIN;
  bool seen_low = false;  // a below-threshold sample earlier in this interval
  for (size_t i = 0; i < times.size(); ++i) {
    // interval n spans [(n-1)*tau, n*tau)
    int64_t n = static_cast<int64_t>(std::floor(times[i] / tau)) + 1;
    if (n != cur_interval) {
      cur_interval = n;
      seen_low = false;
    }
    if (values[i] >= threshold) {
      if (seen_low && n >= 0 && n < horizon) flagged[static_cast<size_t>(n)] = 1;
    } else {
      seen_low = true;
    }
  }
  return flagged;
}

void write_events_csv(std::ostream& out, const EventLog& log) {
  out << "n,sensor_id\n";
  for (const Flag& f : log.flags) out << f.time << ',' << f.sensor << '\n';
}

EventLog read_events_csv(std::istream& in, int64_t horizon, int num_sensors) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("n,sensor_id", 0) != 0)
    throw std::runtime_error("events csv: missing header");
  EventLog log;
  log.horizon = horizon;
  log.num_sensors = num_sensors;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int64_t n;
    int32_t sensor;
    char comma;
    if (!(ls >> n >> comma >> sensor)) throw std::runtime_error("events csv: bad row: " + line);
    if (n < 0 || n >= horizon) throw std::runtime_error("events csv: time out of range");
    if (sensor < 0 || sensor >= num_sensors)
      throw std::runtime_error("events csv: sensor out of range");
    log.flags.push_back({n, sensor, 0.0});
  }
  sort_flags(log.flags);
  return log;
}

void write_events_file(const std::string& path, const EventLog& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  write_events_csv(out, log);
}

EventLog read_events_file(const std::string& path, int64_t horizon, int num_sensors) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  return read_events_csv(in, horizon, num_sensors);
}

}  // namespace sfc
