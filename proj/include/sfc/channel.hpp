#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sfc/frame.hpp"

namespace sfc {

// Slot occupancy counts over the whole run: counts[n*num_slots + s] is how
// many transmissions energize slot s during interval n. Collisions add up;
// the sink later sees only count > 0.
struct EnergyGrid {
  int64_t horizon = 0;
  int num_slots = 0;
  std::vector<uint16_t> counts;

  uint16_t at(int64_t n, int slot) const { return counts[static_cast<size_t>(n) * num_slots + slot]; }
};

EnergyGrid make_grid(int64_t horizon, int num_slots);

// Add one codeword starting at interval `start`; subsymbols that fall past
// the horizon are clipped (a transmission begun near the end is truncated).
void inject(EnergyGrid& grid, const TransmissionMap& map, int64_t start);

// Binarize the k consecutive intervals beginning at `start` (start+k-1 must
// be inside the horizon).
ObservedWindow observe(const EnergyGrid& grid, int64_t start, int codeword_len);

// number of distinct energized slots in interval n
int occupancy_count(const EnergyGrid& grid, int64_t n);

// CSV dump, schema: header "n,slot,count", zero cells omitted.
void write_grid_csv(std::ostream& out, const EnergyGrid& grid);
void write_grid_file(const std::string& path, const EnergyGrid& grid);

}  // namespace sfc
