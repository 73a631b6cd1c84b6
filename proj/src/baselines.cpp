#include "sfc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace sfc {

TdmaConfig make_tdma_config(const FrameParams& frame) {
  frame.validate();
  TdmaConfig cfg;
  cfg.frame = frame;
  cfg.slot_of.resize(frame.num_sensors);
  for (int s = 0; s < frame.num_sensors; ++s) cfg.slot_of[s] = s % frame.num_slots;
  return cfg;
}

EventLog simulate_tdma(const EventLog& events, const TdmaConfig& config) {
  if (events.num_sensors != config.frame.num_sensors)
    throw std::invalid_argument("event log / tdma config sensor count mismatch");
  EventLog delivered;
  delivered.horizon = events.horizon;
  delivered.num_sensors = events.num_sensors;

  const int k = config.frame.codeword_len;
  const int R = config.frame.num_slots;

  // bucket flags by reserved slot; within a slot, overlap is purely a
  // question of start-interval distance
  std::vector<std::vector<const Flag*>> by_slot(static_cast<size_t>(R));
  for (const Flag& f : events.flags) by_slot[static_cast<size_t>(config.slot_of[f.sensor])].push_back(&f);

  for (auto& bucket : by_slot) {
    // events.flags is time-sorted, so each bucket is too
    for (size_t i = 0; i < bucket.size(); ++i) {
      bool hit = false;
      if (i > 0 && bucket[i]->time - bucket[i - 1]->time <= k - 1) hit = true;
      if (!hit && i + 1 < bucket.size() && bucket[i + 1]->time - bucket[i]->time <= k - 1) hit = true;
      if (!hit) delivered.flags.push_back(*bucket[i]);
    }
  }
  std::sort(delivered.flags.begin(), delivered.flags.end(), [](const Flag& a, const Flag& b) {
    return a.time != b.time ? a.time < b.time : a.sensor < b.sensor;
  });
  return delivered;
}

EventLog simulate_saloha(const EventLog& events, const AlohaConfig& config) {
  if (events.num_sensors != config.frame.num_sensors)
    throw std::invalid_argument("event log / aloha config sensor count mismatch");
  EventLog delivered;
  delivered.horizon = events.horizon;
  delivered.num_sensors = events.num_sensors;

  const double slots_per_interval = static_cast<double>(config.frame.num_slots) / config.frame.codeword_len;

  // map each flag's continuous trigger time to a shared-channel slot index,
  // then drop every flag whose slot holds more than one packet
  std::vector<int64_t> slot_of_flag(events.flags.size());
  std::unordered_map<int64_t, int> load;
  load.reserve(events.flags.size() * 2);
  for (size_t i = 0; i < events.flags.size(); ++i) {
    const Flag& f = events.flags[i];
    double t = static_cast<double>(f.time) + f.offset;
    int64_t slot = static_cast<int64_t>(std::floor(t * slots_per_interval));
    slot_of_flag[i] = slot;
    ++load[slot];
  }
  for (size_t i = 0; i < events.flags.size(); ++i)
    if (load[slot_of_flag[i]] == 1) delivered.flags.push_back(events.flags[i]);
  return delivered;
}

}  // namespace sfc
