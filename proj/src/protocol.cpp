#include "sfc/protocol.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sfc {

EnergyGrid sfc_transmit(const EventLog& events, const Codebook& book) {
  if (events.num_sensors != book.frame.num_sensors)
    throw std::invalid_argument("event log / codebook sensor count mismatch");
  EnergyGrid grid = make_grid(events.horizon, book.frame.num_slots);
  for (const Flag& f : events.flags) inject(grid, book.maps[f.sensor], f.time);
  return grid;
}

namespace {

// Workhorse shared by the serial and parallel decoders. Matching reads the
// count grid directly: cell > 0 is the binarized observation.
inline void decode_range(const EnergyGrid& grid, const Codebook& book, int64_t begin, int64_t end,
                         const std::vector<uint8_t>& interval_active, std::vector<Flag>& out) {
  const int k = book.frame.codeword_len;
  const int R = book.frame.num_slots;
  const uint16_t* counts = grid.counts.data();
  for (int64_t n = begin; n < end; ++n) {
    // a map needs one energized slot in every interval of the window, so a
    // fully silent interval anywhere in the window rules out every map
    bool viable = true;
    for (int i = 0; i < k; ++i)
      if (!interval_active[static_cast<size_t>(n + i)]) {
        viable = false;
        break;
      }
    if (!viable) continue;
    for (int32_t id = 0; id < book.frame.num_sensors; ++id) {
      const TransmissionMap& map = book.maps[id];
      bool hit = true;
      for (int i = 0; i < k; ++i)
        if (!counts[static_cast<size_t>(n + i) * R + map[i]]) {
          hit = false;
          break;
        }
      if (hit) out.push_back({n, id, 0.0});
    }
  }
}

std::vector<uint8_t> active_intervals(const EnergyGrid& grid) {
  std::vector<uint8_t> active(static_cast<size_t>(grid.horizon), 0);
  for (int64_t n = 0; n < grid.horizon; ++n) {
    const uint16_t* row = grid.counts.data() + static_cast<size_t>(n) * grid.num_slots;
    for (int s = 0; s < grid.num_slots; ++s)
      if (row[s]) {
        active[static_cast<size_t>(n)] = 1;
        break;
      }
  }
  return active;
}

}  // namespace

EventLog sfc_decode_serial(const EnergyGrid& grid, const Codebook& book) {
  EventLog est;
  est.horizon = grid.horizon;
  est.num_sensors = book.frame.num_sensors;
  const int64_t last = grid.horizon - book.frame.codeword_len;
  if (last < 0) return est;
  std::vector<uint8_t> active = active_intervals(grid);
  decode_range(grid, book, 0, last + 1, active, est.flags);
  return est;
}

EventLog sfc_decode(const EnergyGrid& grid, const Codebook& book) {
  EventLog est;
  est.horizon = grid.horizon;
  est.num_sensors = book.frame.num_sensors;
  const int64_t last = grid.horizon - book.frame.codeword_len;
  if (last < 0) return est;
  std::vector<uint8_t> active = active_intervals(grid);

#ifdef _OPENMP
  // fixed block count so the flag order (block-major, offset order inside a
  // block) does not depend on how many threads happen to run
  const int64_t total = last + 1;
  const int64_t nblocks = std::min<int64_t>(total, 256);
  std::vector<std::vector<Flag>> per_block(static_cast<size_t>(nblocks));
#pragma omp parallel for schedule(dynamic)
  for (int64_t b = 0; b < nblocks; ++b) {
    int64_t begin = total * b / nblocks;
    int64_t end = total * (b + 1) / nblocks;
    decode_range(grid, book, begin, end, active, per_block[static_cast<size_t>(b)]);
  }
  for (auto& chunk : per_block) {
    est.flags.insert(est.flags.end(), chunk.begin(), chunk.end());
    chunk.clear();
  }
#else
  decode_range(grid, book, 0, last + 1, active, est.flags);
#endif
  return est;
}

ScoreReport score(const EventLog& truth, const EventLog& estimate, int codeword_len, int warmup) {
  if (truth.horizon != estimate.horizon || truth.num_sensors != estimate.num_sensors)
    throw std::invalid_argument("score: log shape mismatch");
  ScoreReport rep;
  const int64_t last = truth.horizon - codeword_len;  // last fully observable offset
  const int64_t first = warmup;
  if (last < first) return rep;
  rep.valid_offsets = last - first + 1;

  auto in_range = [&](const Flag& f) { return f.time >= first && f.time <= last; };

  // both logs are sorted by (time, sensor); walk them like a merge
  size_t i = 0, j = 0;
  const auto& tf = truth.flags;
  const auto& ef = estimate.flags;
  int64_t mismatch_offset = -1;
  auto note_mismatch = [&](int64_t n) {
    if (n != mismatch_offset) {
      ++rep.offset_errors;
      mismatch_offset = n;
    }
  };
  while (i < tf.size() || j < ef.size()) {
    bool ti = i < tf.size() && in_range(tf[i]);
    bool ej = j < ef.size() && in_range(ef[j]);
    if (i < tf.size() && !in_range(tf[i])) {
      ++i;
      continue;
    }
    if (j < ef.size() && !in_range(ef[j])) {
      ++j;
      continue;
    }
    if (!ti && !ej) break;
    if (ti && (!ej || tf[i].time < ef[j].time ||
               (tf[i].time == ef[j].time && tf[i].sensor < ef[j].sensor))) {
      ++rep.truth_count;
      ++rep.missed;
      note_mismatch(tf[i].time);
      ++i;
    } else if (ej && (!ti || ef[j].time < tf[i].time ||
                      (ef[j].time == tf[i].time && ef[j].sensor < tf[i].sensor))) {
      ++rep.estimate_count;
      ++rep.false_positive;
      note_mismatch(ef[j].time);
      ++j;
    } else {
      ++rep.truth_count;
      ++rep.estimate_count;
      ++rep.true_positive;
      ++i;
      ++j;
    }
  }

  rep.quiet_total = rep.valid_offsets * truth.num_sensors - rep.truth_count;
  rep.quiet_correct = rep.quiet_total - rep.false_positive;
  rep.p_detect = rep.truth_count ? static_cast<double>(rep.true_positive) / rep.truth_count : 1.0;
  rep.p_quiet = rep.quiet_total ? static_cast<double>(rep.quiet_correct) / rep.quiet_total : 1.0;
  rep.efficiency = rep.p_detect * rep.p_quiet;
  rep.overall_error = static_cast<double>(rep.offset_errors) / rep.valid_offsets;
  rep.single_event_error = static_cast<double>(rep.missed + rep.false_positive) /
                           (static_cast<double>(rep.valid_offsets) * truth.num_sensors);
  return rep;
}

}  // namespace sfc
