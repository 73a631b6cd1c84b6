#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sfc/analytics.hpp"
#include "sfc/frame.hpp"
#include "sfc/traffic.hpp"

namespace sfc {

enum class Scheme { SFC, TDMA, SALOHA };

const char* scheme_name(Scheme s);          // "sfc" / "tdma" / "saloha"
Scheme parse_scheme(const std::string& s);  // case-insensitive, throws on junk

struct ExperimentConfig {
  FrameParams frame;
  TrafficParams traffic;  // traffic.num_sensors must equal frame.num_sensors
  Scheme scheme = Scheme::SFC;
  int replications = 1;
  uint64_t base_seed = 1;
  int warmup = -1;            // scored offsets start here; -1 -> codeword_len - 1
  double epsilon = 1e-9;      // certificate budget for attached analytics
  bool with_analytics = true; // attach closed-form companions
  bool with_error_curve = true;  // also run the certified per-offset error
                                 // sweep (the one analytic piece that costs
                                 // real compute); efficiency-only sweeps skip it
  void validate() const;
};

struct MetricValue {
  double value = 0.0;
  double ci_lo = 0.0;  // 95% Wilson interval
  double ci_hi = 0.0;
};

struct MetricsReport {
  Scheme scheme = Scheme::SFC;
  FrameParams frame;
  double lambda = 0.0;
  int replications = 0;
  uint64_t base_seed = 0;
  int64_t symbols = 0;  // scored window offsets pooled over replications

  // pooled raw counts
  int64_t truth_count = 0;
  int64_t true_positive = 0;
  int64_t missed = 0;
  int64_t false_positive = 0;
  int64_t offset_errors = 0;
  int64_t quiet_total = 0;
  int64_t quiet_correct = 0;

  MetricValue overall_error;        // offsets with any wrong sensor report
  MetricValue p_detect;             // P[report | transmitted]
  MetricValue p_quiet;              // P[no report | idle]
  MetricValue efficiency;           // p_detect * p_quiet (CI = product of endpoint brackets)
  MetricValue single_event_error;   // per sensor-offset false/missed report rate

  // analytic companions (closed forms for the same configuration)
  double analytic_error = 0.0;             // per-offset error probability
  double analytic_error_certificate = 0.0; // truncation certificate where applicable
  BoundsPair analytic_efficiency;          // degenerate (lower == upper) for the baselines
  // frame-scheme false-report side: empirical rate scaled by exp(lambda/N)
  // against its closed-form bracket
  double single_event_scaled = 0.0;
  BoundsPair single_event_bracket;
};

// Deterministic for a given config: replication r draws its codebook from
// derive_seed(base_seed, r, 1) and its traffic from derive_seed(base_seed, r, 2),
// replications merge in index order.
MetricsReport run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
  std::string axis_name;
  double axis_value = 0.0;
  MetricsReport report;
};

// Runs each point; axis bookkeeping is carried through to the CSV.
std::vector<SweepRow> run_sweep(const std::string& axis_name,
                                const std::vector<double>& axis_values,
                                const std::vector<ExperimentConfig>& configs);

// Exact column set, one row per sweep point:
// scheme,axis_name,axis_value,lambda,k,R,N,replications,symbols,
// overall_error,overall_error_ci_lo,overall_error_ci_hi,p_detect,p_quiet,
// efficiency,efficiency_ci_lo,efficiency_ci_hi,analytic_value,analytic_lower,
// analytic_upper,seed
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// canonical shortest round-trip text for doubles (CSV reproducibility)
std::string format_double(double v);

}  // namespace sfc
