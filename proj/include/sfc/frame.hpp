#pragma once
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sfc {

// Shared frame geometry: N sensors, codewords of k subsymbols, R slots each.
struct FrameParams {
  int num_sensors = 0;   // N
  int codeword_len = 0;  // k
  int num_slots = 0;     // R

  // number of distinct transmission maps, R^k, as a double (can exceed 2^63)
  double pattern_space() const { return std::pow(static_cast<double>(num_slots), codeword_len); }

  void validate() const {
    if (num_sensors < 1) throw std::invalid_argument("num_sensors must be >= 1");
    if (codeword_len < 1) throw std::invalid_argument("codeword_len must be >= 1");
    if (num_slots < 1) throw std::invalid_argument("num_slots must be >= 1");
    if (static_cast<double>(num_sensors) > pattern_space())
      throw std::invalid_argument("need num_sensors <= num_slots^codeword_len distinct maps");
  }
};

// One codeword: the energized slot index for each of the k subsymbols.
using TransmissionMap = std::vector<uint16_t>;

// Binarized k x R window as the sink sees it after energy detection.
struct ObservedWindow {
  int codeword_len = 0;
  int num_slots = 0;
  std::vector<uint8_t> cells;  // row-major, cells[i*num_slots + s]

  uint8_t at(int subsym, int slot) const { return cells[static_cast<size_t>(subsym) * num_slots + slot]; }
};

}  // namespace sfc
