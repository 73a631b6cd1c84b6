// Times the sliding-window decoder: parallel kernel vs the serial reference,
// and checks they produce identical output while at it.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "sfc/codebook.hpp"
#include "sfc/protocol.hpp"
#include "sfc/rng.hpp"
#include "sfc/traffic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
  int64_t horizon = 400000;
  int repeats = 3;
  if (argc > 1) horizon = std::atoll(argv[1]);
  if (argc > 2) repeats = std::atoi(argv[2]);

  sfc::FrameParams frame;
  frame.num_sensors = 64;
  frame.codeword_len = 6;
  frame.num_slots = 11;
  sfc::TrafficParams traffic;
  traffic.lambda = 0.32;
  traffic.horizon = horizon;
  traffic.num_sensors = frame.num_sensors;

  const sfc::Codebook book = sfc::generate_codebook(frame, 99);
  const sfc::EventLog events = sfc::generate_events(traffic, 7);
  const sfc::EnergyGrid grid = sfc::sfc_transmit(events, book);

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif
  std::printf("horizon: %lld intervals, %zu transmissions\n",
              static_cast<long long>(horizon), events.flags.size());

  double best_serial = 1e300, best_parallel = 1e300;
  size_t reported = 0;
  for (int i = 0; i < repeats; ++i) {
    auto t0 = Clock::now();
    sfc::EventLog serial = sfc::sfc_decode_serial(grid, book);
    double ts = seconds_since(t0);

    t0 = Clock::now();
    sfc::EventLog parallel = sfc::sfc_decode(grid, book);
    double tp = seconds_since(t0);

    if (serial.flags.size() != parallel.flags.size()) {
      std::printf("MISMATCH: serial %zu flags, parallel %zu flags\n", serial.flags.size(),
                  parallel.flags.size());
      return 1;
    }
    for (size_t j = 0; j < serial.flags.size(); ++j)
      if (serial.flags[j].time != parallel.flags[j].time ||
          serial.flags[j].sensor != parallel.flags[j].sensor) {
        std::printf("MISMATCH at flag %zu\n", j);
        return 1;
      }
    reported = serial.flags.size();
    best_serial = std::min(best_serial, ts);
    best_parallel = std::min(best_parallel, tp);
  }

  const double rate_s = static_cast<double>(horizon) / best_serial / 1e6;
  const double rate_p = static_cast<double>(horizon) / best_parallel / 1e6;
  std::printf("decoded flags: %zu (outputs identical)\n", reported);
  std::printf("serial:   %.3f s  (%.2f Moffsets/s)\n", best_serial, rate_s);
  std::printf("parallel: %.3f s  (%.2f Moffsets/s)\n", best_parallel, rate_p);
  std::printf("speedup:  %.2fx\n", best_serial / best_parallel);
  return 0;
}
