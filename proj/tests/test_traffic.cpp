#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "sfc/stats.hpp"
#include "sfc/traffic.hpp"

using namespace sfc;

static TrafficParams traffic(double lambda, int64_t horizon, int n, bool exact = false) {
  TrafficParams p;
  p.lambda = lambda;
  p.horizon = horizon;
  p.num_sensors = n;
  p.exact_poisson = exact;
  return p;
}

static void check_well_formed(const EventLog& log) {
  std::set<std::pair<int64_t, int32_t>> seen;
  for (size_t i = 0; i < log.flags.size(); ++i) {
    const Flag& f = log.flags[i];
    CHECK(f.time >= 0);
    CHECK(f.time < log.horizon);
    CHECK(f.sensor >= 0);
    CHECK(f.sensor < log.num_sensors);
    CHECK(f.offset >= 0.0);
    CHECK(f.offset < 1.0);
    if (i > 0) {
      const Flag& prev = log.flags[i - 1];
      CHECK((prev.time < f.time || (prev.time == f.time && prev.sensor < f.sensor)));
    }
    seen.insert({f.time, f.sensor});
  }
  CHECK(seen.size() == log.flags.size());  // one flag per (interval, sensor)
}

TEST_CASE("generation is deterministic and well formed") {
  for (bool exact : {false, true}) {
    EventLog a = generate_events(traffic(0.3, 5000, 16, exact), 11);
    EventLog b = generate_events(traffic(0.3, 5000, 16, exact), 11);
    CHECK(a.flags.size() == b.flags.size());
    for (size_t i = 0; i < a.flags.size(); ++i) {
      CHECK(a.flags[i].time == b.flags[i].time);
      CHECK(a.flags[i].sensor == b.flags[i].sensor);
      CHECK(a.flags[i].offset == b.flags[i].offset);
    }
    EventLog c = generate_events(traffic(0.3, 5000, 16, exact), 12);
    bool same = a.flags.size() == c.flags.size();
    for (size_t i = 0; same && i < a.flags.size(); ++i)
      same = a.flags[i].time == c.flags[i].time && a.flags[i].sensor == c.flags[i].sensor &&
             a.flags[i].offset == c.flags[i].offset;
    CHECK(!same);  // different seed, different draw
    check_well_formed(a);
    check_well_formed(c);
  }
}

TEST_CASE("vanishing rate yields an empty log") {
  EventLog log = generate_events(traffic(1e-12, 1000000, 64), 5);
  CHECK(log.flags.empty());
}

TEST_CASE("aggregate rate matches the configured lambda") {
  // many sensors, light per-sensor load: flags per interval ~ lambda
  EventLog log = generate_events(traffic(0.2, 1000000, 64), 2024);
  double mean = static_cast<double>(log.flags.size()) / 1000000.0;
  CHECK(std::abs(mean - 0.2) < 0.002);  // within 1%
}

TEST_CASE("single heavy sensor saturates below its trigger rate") {
  // one sensor at lambda = 0.5: several triggers can share an interval but
  // produce one transmission, so the flag rate stays below lambda and lands
  // at 1 - exp(-1/2)
  const double target = 1.0 - std::exp(-0.5);
  EventLog log = generate_events(traffic(0.5, 1000000, 1), 33);
  double rate = static_cast<double>(log.flags.size()) / 1000000.0;
  CHECK(rate < 0.5);
  CHECK(rate < target);  // this draw sits under the asymptote
  double sigma = std::sqrt(target * (1.0 - target) / 1000000.0);
  CHECK(std::abs(rate - target) < 4.0 * sigma);
}

TEST_CASE("per-interval totals pass a Poisson goodness-of-fit gate") {
  // sensors/lambda = 320: totals should be indistinguishable from
  // Poisson(0.2) at the 1% level. Bins {0, 1, 2, >=3}.
  const double lambda = 0.2;
  const int64_t horizon = 200000;
  EventLog log = generate_events(traffic(lambda, horizon, 64), 77);
  int64_t counts[4] = {0, 0, 0, 0};
  std::vector<int> per_interval(horizon, 0);
  for (const Flag& f : log.flags) ++per_interval[static_cast<size_t>(f.time)];
  for (int64_t n = 0; n < horizon; ++n) counts[per_interval[static_cast<size_t>(n)] > 3 ? 3 : per_interval[static_cast<size_t>(n)]]++;

  double expected[4];
  expected[0] = poisson_pmf(0, lambda) * horizon;
  expected[1] = poisson_pmf(1, lambda) * horizon;
  expected[2] = poisson_pmf(2, lambda) * horizon;
  expected[3] = horizon - expected[0] - expected[1] - expected[2];
  double stat = 0.0;
  for (int b = 0; b < 4; ++b) {
    double d = counts[b] - expected[b];
    stat += d * d / expected[b];
  }
  CHECK(stat < chi_square_critical(3, 0.01));
}

TEST_CASE("idealized mode draws exactly Poisson totals") {
  EventLog log = generate_events(traffic(0.2, 500000, 64, true), 15);
  double mean = static_cast<double>(log.flags.size()) / 500000.0;
  CHECK(std::abs(mean - 0.2) < 0.002);
  check_well_formed(log);
}

TEST_CASE("waveform crossings set the right interval flags") {
  // interval n covers [(n-1)*tau, n*tau); a flag needs a below-threshold
  // sample and then an above-threshold sample inside one interval
  auto flags = events_from_signal({0.1, 0.4}, {0.0, 1.0}, 0.5, 1.0, 4);
  CHECK(flags == std::vector<uint8_t>{0, 1, 0, 0});

  // already above threshold on entry: no upward crossing
  CHECK(events_from_signal({0.1, 0.4}, {1.0, 1.0}, 0.5, 1.0, 4) ==
        std::vector<uint8_t>{0, 0, 0, 0});

  // downward crossing only
  CHECK(events_from_signal({0.1, 0.4}, {1.0, 0.0}, 0.5, 1.0, 4) ==
        std::vector<uint8_t>{0, 0, 0, 0});

  // two crossings in one interval still one flag
  CHECK(events_from_signal({0.1, 0.2, 0.3, 0.4}, {0.0, 1.0, 0.0, 1.0}, 0.5, 1.0, 4) ==
        std::vector<uint8_t>{0, 1, 0, 0});

  // low sample in one interval, high sample in the next: neither flags
  CHECK(events_from_signal({0.9, 1.1}, {0.0, 1.0}, 0.5, 1.0, 4) ==
        std::vector<uint8_t>{0, 0, 0, 0});

  // crossing in a later interval, scaled tau
  CHECK(events_from_signal({1.0, 1.2, 2.6, 2.8}, {0.0, 0.0, 0.0, 3.0}, 2.5, 0.5, 8) ==
        std::vector<uint8_t>{0, 0, 0, 0, 0, 0, 1, 0});

  // crossings past the horizon are dropped
  CHECK(events_from_signal({3.1, 3.6}, {0.0, 1.0}, 0.5, 1.0, 4) ==
        std::vector<uint8_t>{0, 0, 0, 0});
}

TEST_CASE("waveform input validation") {
  CHECK_THROWS_AS(events_from_signal({0.1}, {1.0}, 0.5, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(events_from_signal({0.1, 0.2}, {1.0}, 0.5, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(events_from_signal({0.2, 0.2}, {0.0, 1.0}, 0.5, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(events_from_signal({0.3, 0.2}, {0.0, 1.0}, 0.5, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(events_from_signal({0.1, 0.2}, {0.0, 1.0}, 0.5, 0.0, 4), std::invalid_argument);
}

TEST_CASE("event log csv round-trip") {
  EventLog log = generate_events(traffic(0.4, 300, 8), 9);
  std::stringstream buf;
  write_events_csv(buf, log);
  EventLog back = read_events_csv(buf, 300, 8);
  CHECK(back.flags.size() == log.flags.size());
  for (size_t i = 0; i < log.flags.size(); ++i) {
    CHECK(back.flags[i].time == log.flags[i].time);
    CHECK(back.flags[i].sensor == log.flags[i].sensor);
    CHECK(back.flags[i].offset == 0.0);  // offsets are not persisted
  }
}

TEST_CASE("malformed event csv is rejected") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_events_csv(in, 100, 4);
  };
  CHECK_THROWS(parse(""));
  CHECK_THROWS(parse("bogus\n1,2\n"));
  CHECK_THROWS(parse("n,sensor_id\n100,0\n"));  // time out of range
  CHECK_THROWS(parse("n,sensor_id\n5,4\n"));    // sensor out of range
  CHECK_THROWS(parse("n,sensor_id\n5,-1\n"));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(generate_events(traffic(-0.1, 10, 4), 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_events(traffic(0.1, -1, 4), 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_events(traffic(0.1, 10, 0), 1), std::invalid_argument);
}
