#pragma once
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sfc/frame.hpp"

namespace sfc {

// Raised when a requested truncation-error budget cannot be honored (for
// example, the exact-series state space does not fit the solver). Maps to
// exit code 2 at the CLI.
struct CertificateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AnalyticParams {
  FrameParams frame;
  double lambda = 0.0;   // aggregate start rate per interval
  double epsilon = 1e-9; // truncation budget for series evaluations
};

struct BoundsPair {
  double lower = 0.0;
  double upper = 0.0;
};

struct CertifiedValue {
  double value = 0.0;
  double certificate = 0.0;  // guaranteed bound on |value - exact|
};

// --- conditional window quantities -----------------------------------------
// All of these condition on a window holding Q fully energized patterns of
// which T belong to codewords genuinely transmitted at the window offset.
// Unregistered sensors' maps are uniform over the other R^k - T patterns.

// P[exactly `covered` of the N-T idle sensors' maps are fully energized]
double hypergeom_pmf(int64_t covered, double q, int t, const AnalyticParams& p);

// P[at least one idle sensor's map is fully energized] (a false start report)
double error_prob_exact(double q, int t, const AnalyticParams& p);

// closed-form envelope of error_prob_exact, cheap to evaluate
BoundsPair error_prob_bounds(double q, int t, const AnalyticParams& p);

// probability that one tagged idle sensor is falsely reported, including the
// prior probability exp(-lambda/N) that the sensor is idle at all
double single_event_error(double q, int t, const AnalyticParams& p);
BoundsPair single_event_error_bounds(double q, int t, const AnalyticParams& p);

// --- slot occupancy ---------------------------------------------------------
// `arrivals` uniform independent throws into `num_slots` slots.

// P[exactly u distinct slots hit]
double occupancy_pmf(int u, int arrivals, int num_slots);
// full distribution over u = 0..num_slots
std::vector<double> occupancy_dist(int arrivals, int num_slots);
double expected_occupancy(int arrivals, int num_slots);

// --- unconditional (traffic-averaged) quantities ----------------------------

// P[a fixed pattern with one cell per interval of a k-interval window is
// fully energized by Poisson(lambda)-per-interval uniform codeword starts]
double pattern_cover_prob(double lambda, int codeword_len, int num_slots);

// E[# fully energized patterns per window] = R^k * pattern_cover_prob
double expected_energized_patterns(const AnalyticParams& p);

// Exact windowed-decoder error probability per offset (any false sensor
// report), averaged over traffic, with a truncation certificate obeying
// p.epsilon. Cost grows quickly with codeword_len; intended for desk-scale
// frames.
CertifiedValue sfc_error_prob(const AnalyticParams& p);

// per-offset error probabilities of the baselines
double tdma_error_prob(const AnalyticParams& p);
double saloha_error_prob(const AnalyticParams& p);

// --- efficiency -------------------------------------------------------------
// Efficiency = P[report | event] * P[no report | no event] for one sensor in
// steady state. The frame scheme never misses, so its efficiency is bracketed
// through the false-report side alone.
struct EfficiencyReport {
  double tdma = 0.0;
  double saloha = 0.0;
  BoundsPair sfc;              // bracket on the frame scheme's efficiency
  BoundsPair false_flag_rate;  // bracket on P[false report] per sensor-offset
  double expected_energized = 0.0;
};

EfficiencyReport efficiency_closed_forms(const AnalyticParams& p);

}  // namespace sfc
