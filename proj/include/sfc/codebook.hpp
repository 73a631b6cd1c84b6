#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>

#include "sfc/frame.hpp"

namespace sfc {

// Registered transmission maps for all sensors, plus the frame geometry and
// the seed they were drawn with.
struct Codebook {
  FrameParams frame;
  uint64_t seed = 0;
  std::vector<TransmissionMap> maps;  // maps[sensor_id], each of length k
};

// Draw N distinct maps uniformly from the R^k possibilities (rejection on
// duplicates). Deterministic for a given (frame, seed).
Codebook generate_codebook(const FrameParams& frame, uint64_t seed);

// True iff every energized cell of the map is energized in the window
// (the window may have extra energy from other transmissions).
bool map_matches(const TransmissionMap& map, const ObservedWindow& window);

// Text round-trip. Format:
//   N,k,R,seed
//   id,slot_0,...,slot_{k-1}   (one line per sensor)
void write_codebook(std::ostream& out, const Codebook& book);
Codebook read_codebook(std::istream& in);
void write_codebook_file(const std::string& path, const Codebook& book);
Codebook read_codebook_file(const std::string& path);

}  // namespace sfc
