#pragma once
#include <cstdint>

#include "sfc/channel.hpp"
#include "sfc/codebook.hpp"
#include "sfc/traffic.hpp"

namespace sfc {

// Superimpose every flagged sensor's codeword onto the channel grid.
EnergyGrid sfc_transmit(const EventLog& events, const Codebook& book);

// Slide a k-interval window over every start offset n in [0, horizon-k] and
// report (n, sensor) for every registered map fully contained in the
// binarized window. Collisions only ever add energy, so a transmitted
// codeword is always reported (no misses); extra reports are the error mode.
// The two variants return identical logs; the default one parallelizes over
// window offsets.
EventLog sfc_decode(const EnergyGrid& grid, const Codebook& book);
EventLog sfc_decode_serial(const EnergyGrid& grid, const Codebook& book);

// Truth/estimate comparison over the valid offset range [warmup, horizon-k].
// Offsets past horizon-k carry clipped codewords and are excluded from both
// sides; warmup (normally k-1) trims the start-of-run offsets whose windows
// reach into the unmodelled pre-run quiet.
struct ScoreReport {
  int64_t valid_offsets = 0;
  int64_t truth_count = 0;      // truth flags in range
  int64_t estimate_count = 0;   // estimate flags in range
  int64_t true_positive = 0;    // flags present in both logs
  int64_t missed = 0;           // truth only
  int64_t false_positive = 0;   // estimate only
  int64_t offset_errors = 0;    // offsets whose truth/estimate sensor sets differ
  int64_t quiet_total = 0;      // (offset,sensor) pairs with no truth flag
  int64_t quiet_correct = 0;    // of those, pairs the estimate also left quiet

  double p_detect = 0.0;        // true_positive / truth_count (1 when no truth flags)
  double p_quiet = 0.0;         // quiet_correct / quiet_total
  double efficiency = 0.0;      // p_detect * p_quiet
  double overall_error = 0.0;   // offset_errors / valid_offsets
  double single_event_error = 0.0;  // (missed + false_positive) / (valid_offsets * N)
};

ScoreReport score(const EventLog& truth, const EventLog& estimate, int codeword_len, int warmup);

}  // namespace sfc
