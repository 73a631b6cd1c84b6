#include "sfc/channel.hpp"

#include <fstream>
#include <stdexcept>

namespace sfc {

EnergyGrid make_grid(int64_t horizon, int num_slots) {
  if (horizon < 0 || num_slots < 1) throw std::invalid_argument("bad grid shape");
  EnergyGrid g;
  g.horizon = horizon;
  g.num_slots = num_slots;
  g.counts.assign(static_cast<size_t>(horizon) * num_slots, 0);
  return g;
}

void inject(EnergyGrid& grid, const TransmissionMap& map, int64_t start) {
  for (int i = 0; i < static_cast<int>(map.size()); ++i) {
    int64_t n = start + i;
    if (n < 0 || n >= grid.horizon) continue;
    uint16_t& cell = grid.counts[static_cast<size_t>(n) * grid.num_slots + map[i]];
    if (cell != UINT16_MAX) ++cell;  // saturate; binarization only needs >0
  }
}

ObservedWindow observe(const EnergyGrid& grid, int64_t start, int codeword_len) {
  if (start < 0 || start + codeword_len > grid.horizon)
    throw std::out_of_range("observe: window leaves the horizon");
  ObservedWindow w;
  w.codeword_len = codeword_len;
  w.num_slots = grid.num_slots;
  w.cells.resize(static_cast<size_t>(codeword_len) * grid.num_slots);
  const uint16_t* src = grid.counts.data() + static_cast<size_t>(start) * grid.num_slots;
  for (size_t i = 0; i < w.cells.size(); ++i) w.cells[i] = src[i] > 0 ? 1 : 0;
  return w;
}

int occupancy_count(const EnergyGrid& grid, int64_t n) {
  if (n < 0 || n >= grid.horizon) throw std::out_of_range("occupancy_count: bad interval");
  int u = 0;
  const uint16_t* row = grid.counts.data() + static_cast<size_t>(n) * grid.num_slots;
  for (int s = 0; s < grid.num_slots; ++s) u += row[s] > 0;
  return u;
}

void write_grid_csv(std::ostream& out, const EnergyGrid& grid) {
  out << "n,slot,count\n";
  for (int64_t n = 0; n < grid.horizon; ++n) {
    const uint16_t* row = grid.counts.data() + static_cast<size_t>(n) * grid.num_slots;
    for (int s = 0; s < grid.num_slots; ++s)
      if (row[s]) out << n << ',' << s << ',' << row[s] << '\n';
  }
}

void write_grid_file(const std::string& path, const EnergyGrid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  write_grid_csv(out, grid);
}

}  // namespace sfc
