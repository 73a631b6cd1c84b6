#pragma once
#include <cstdint>
#include <vector>

#include "sfc/frame.hpp"
#include "sfc/traffic.hpp"

namespace sfc {

// Orthogonal scheduling baseline: the k-subsymbol payload is sent in the
// sensor's reserved slot, one slot per interval, so a transmission spans k
// consecutive intervals in that slot. Two same-slot transmissions destroy
// each other when their spans overlap, i.e. start intervals differ by at
// most k-1.
struct TdmaConfig {
  FrameParams frame;
  std::vector<int> slot_of;  // sensor -> reserved slot
};

// round-robin assignment, sensor s -> slot s % R (balanced partition)
TdmaConfig make_tdma_config(const FrameParams& frame);

// Returns the delivered flags (collision survivors), timestamped by their
// original start interval.
EventLog simulate_tdma(const EventLog& events, const TdmaConfig& config);

// Random-access baseline: the payload goes out as one packet in a shared
// slotted channel whose slots last k/R of an interval (same airtime budget
// as the frame schemes). A packet occupies the slot its trigger time falls
// into; two or more packets in one slot are all lost.
struct AlohaConfig {
  FrameParams frame;
};

EventLog simulate_saloha(const EventLog& events, const AlohaConfig& config);

}  // namespace sfc
