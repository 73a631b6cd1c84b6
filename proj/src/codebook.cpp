#include "sfc/codebook.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "sfc/rng.hpp"

namespace sfc {

Codebook generate_codebook(const FrameParams& frame, uint64_t seed) {
  frame.validate();
  Codebook book;
  book.frame = frame;
  book.seed = seed;
  book.maps.reserve(frame.num_sensors);

  Rng rng(derive_seed(seed, 0xC0DEB00CULL));
  std::unordered_set<std::string> taken;
  std::string key(frame.codeword_len * 2, '\0');
  while (static_cast<int>(book.maps.size()) < frame.num_sensors) {
    TransmissionMap map(frame.codeword_len);
    for (int i = 0; i < frame.codeword_len; ++i) {
      map[i] = static_cast<uint16_t>(rng.next_below(static_cast<uint32_t>(frame.num_slots)));
      key[2 * i] = static_cast<char>(map[i] & 0xFF);
      key[2 * i + 1] = static_cast<char>(map[i] >> 8);
    }
    if (taken.insert(key).second) book.maps.push_back(std::move(map));
    // duplicates are simply redrawn; distinctness is required for decoding
  }
  return book;
}

bool map_matches(const TransmissionMap& map, const ObservedWindow& window) {
  for (int i = 0; i < static_cast<int>(map.size()); ++i)
    if (!window.at(i, map[i])) return false;
  return true;
}

void write_codebook(std::ostream& out, const Codebook& book) {
  out << book.frame.num_sensors << ',' << book.frame.codeword_len << ',' << book.frame.num_slots
      << ',' << book.seed << '\n';
  for (size_t id = 0; id < book.maps.size(); ++id) {
    out << id;
    for (uint16_t s : book.maps[id]) out << ',' << s;
    out << '\n';
  }
}

Codebook read_codebook(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("codebook: empty input");
  Codebook book;
  {
    std::istringstream hs(line);
    char comma;
    if (!(hs >> book.frame.num_sensors >> comma >> book.frame.codeword_len >> comma >>
          book.frame.num_slots >> comma >> book.seed))
      throw std::runtime_error("codebook: bad header line");
  }
  book.frame.validate();
  book.maps.assign(book.frame.num_sensors, {});
  int seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long id;
    char comma;
    if (!(ls >> id)) throw std::runtime_error("codebook: bad row");
    if (id < 0 || id >= book.frame.num_sensors) throw std::runtime_error("codebook: id out of range");
    TransmissionMap map(book.frame.codeword_len);
    for (int i = 0; i < book.frame.codeword_len; ++i) {
      long long slot;
      if (!(ls >> comma >> slot) || slot < 0 || slot >= book.frame.num_slots)
        throw std::runtime_error("codebook: slot out of range");
      map[i] = static_cast<uint16_t>(slot);
    }
    if (!book.maps[id].empty()) throw std::runtime_error("codebook: duplicate id");
    book.maps[id] = std::move(map);
    ++seen;
  }
  if (seen != book.frame.num_sensors) throw std::runtime_error("codebook: missing rows");
  return book;
}

void write_codebook_file(const std::string& path, const Codebook& book) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  write_codebook(out, book);
}

Codebook read_codebook_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for read: " + path);
  return read_codebook(in);
}

}  // namespace sfc
