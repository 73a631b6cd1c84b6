#include "sfc/montecarlo.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "sfc/baselines.hpp"
#include "sfc/codebook.hpp"
#include "sfc/protocol.hpp"
#include "sfc/rng.hpp"
#include "sfc/stats.hpp"

namespace sfc {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::SFC: return "sfc";
    case Scheme::TDMA: return "tdma";
    case Scheme::SALOHA: return "saloha";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "sfc") return Scheme::SFC;
  if (t == "tdma") return Scheme::TDMA;
  if (t == "saloha" || t == "aloha") return Scheme::SALOHA;
  throw std::invalid_argument("unknown scheme: " + s + " (want sfc|tdma|saloha)");
}

void ExperimentConfig::validate() const {
  frame.validate();
  if (traffic.num_sensors != frame.num_sensors)
    throw std::invalid_argument("traffic and frame disagree on the sensor count");
  if (traffic.lambda < 0) throw std::invalid_argument("lambda must be >= 0");
  if (traffic.horizon < frame.codeword_len)
    throw std::invalid_argument("horizon shorter than one codeword");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be > 0");
}

namespace {

ScoreReport run_one(const ExperimentConfig& cfg, int rep) {
  const uint64_t book_seed = derive_seed(cfg.base_seed, static_cast<uint64_t>(rep), 1);
  const uint64_t traffic_seed = derive_seed(cfg.base_seed, static_cast<uint64_t>(rep), 2);
  const int warmup = cfg.warmup < 0 ? cfg.frame.codeword_len - 1 : cfg.warmup;

  EventLog events = generate_events(cfg.traffic, traffic_seed);
  EventLog estimate;
  switch (cfg.scheme) {
    case Scheme::SFC: {
      Codebook book = generate_codebook(cfg.frame, book_seed);
      EnergyGrid grid = sfc_transmit(events, book);
      estimate = sfc_decode(grid, book);
      break;
    }
    case Scheme::TDMA:
      estimate = simulate_tdma(events, make_tdma_config(cfg.frame));
      break;
    case Scheme::SALOHA:
      estimate = simulate_saloha(events, AlohaConfig{cfg.frame});
      break;
  }
  return score(events, estimate, cfg.frame.codeword_len, warmup);
}

MetricValue proportion(int64_t hits, int64_t trials, double fallback = 1.0) {
  if (trials <= 0) return {fallback, 0.0, 1.0};
  Interval ci = wilson_interval(static_cast<double>(hits), static_cast<double>(trials));
  return {static_cast<double>(hits) / static_cast<double>(trials), ci.lower, ci.upper};
}

}  // namespace

MetricsReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  std::vector<ScoreReport> per_rep(static_cast<size_t>(cfg.replications));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (cfg.replications > 1)
#endif
  for (int r = 0; r < cfg.replications; ++r) per_rep[static_cast<size_t>(r)] = run_one(cfg, r);

  MetricsReport rep;
  rep.scheme = cfg.scheme;
  rep.frame = cfg.frame;
  rep.lambda = cfg.traffic.lambda;
  rep.replications = cfg.replications;
  rep.base_seed = cfg.base_seed;
  for (const ScoreReport& s : per_rep) {
    rep.symbols += s.valid_offsets;
    rep.truth_count += s.truth_count;
    rep.true_positive += s.true_positive;
    rep.missed += s.missed;
    rep.false_positive += s.false_positive;
    rep.offset_errors += s.offset_errors;
    rep.quiet_total += s.quiet_total;
    rep.quiet_correct += s.quiet_correct;
  }

  rep.overall_error = proportion(rep.offset_errors, rep.symbols, 0.0);
  rep.p_detect = proportion(rep.true_positive, rep.truth_count);
  rep.p_quiet = proportion(rep.quiet_correct, rep.quiet_total);
  rep.efficiency = {rep.p_detect.value * rep.p_quiet.value, rep.p_detect.ci_lo * rep.p_quiet.ci_lo,
                    rep.p_detect.ci_hi * rep.p_quiet.ci_hi};
  const int64_t pair_trials = rep.symbols * cfg.frame.num_sensors;
  rep.single_event_error = proportion(rep.missed + rep.false_positive, pair_trials, 0.0);

  if (cfg.with_analytics) {
    AnalyticParams ap;
    ap.frame = cfg.frame;
    ap.lambda = cfg.traffic.lambda;
    ap.epsilon = cfg.epsilon;
    EfficiencyReport eff = efficiency_closed_forms(ap);
    switch (cfg.scheme) {
      case Scheme::SFC: {
        if (cfg.with_error_curve) {
          CertifiedValue cv = sfc_error_prob(ap);
          rep.analytic_error = cv.value;
          rep.analytic_error_certificate = cv.certificate;
        }
        rep.analytic_efficiency = eff.sfc;
        const double idle_prior = std::exp(-ap.lambda / cfg.frame.num_sensors);
        rep.single_event_scaled =
            (pair_trials > 0 ? static_cast<double>(rep.false_positive) / pair_trials : 0.0) /
            idle_prior;
        rep.single_event_bracket = {eff.false_flag_rate.lower / idle_prior,
                                    eff.false_flag_rate.upper / idle_prior};
        break;
      }
      case Scheme::TDMA:
        rep.analytic_error = tdma_error_prob(ap);
        rep.analytic_efficiency = {eff.tdma, eff.tdma};
        break;
      case Scheme::SALOHA:
        rep.analytic_error = saloha_error_prob(ap);
        rep.analytic_efficiency = {eff.saloha, eff.saloha};
        break;
    }
  }
  return rep;
}

std::vector<SweepRow> run_sweep(const std::string& axis_name,
                                const std::vector<double>& axis_values,
                                const std::vector<ExperimentConfig>& configs) {
  if (axis_values.size() != configs.size())
    throw std::invalid_argument("run_sweep: axis/config length mismatch");
  for (size_t i = 1; i < axis_values.size(); ++i)
    if (!(std::isfinite(axis_values[i]) && std::isfinite(axis_values[i - 1])))
      throw std::invalid_argument("run_sweep: axis values must be finite");
  std::vector<SweepRow> rows;
  rows.reserve(configs.size());
  for (size_t i = 0; i < configs.size(); ++i) {
    SweepRow row;
    row.axis_name = axis_name;
    row.axis_value = axis_values[i];
    row.report = run_experiment(configs[i]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "scheme,axis_name,axis_value,lambda,k,R,N,replications,symbols,"
         "overall_error,overall_error_ci_lo,overall_error_ci_hi,p_detect,p_quiet,"
         "efficiency,efficiency_ci_lo,efficiency_ci_hi,"
         "analytic_value,analytic_lower,analytic_upper,seed\n";
  for (const SweepRow& row : rows) {
    const MetricsReport& m = row.report;
    out << scheme_name(m.scheme) << ',' << row.axis_name << ',' << format_double(row.axis_value)
        << ',' << format_double(m.lambda) << ',' << m.frame.codeword_len << ','
        << m.frame.num_slots << ',' << m.frame.num_sensors << ',' << m.replications << ','
        << m.symbols << ',' << format_double(m.overall_error.value) << ','
        << format_double(m.overall_error.ci_lo) << ',' << format_double(m.overall_error.ci_hi)
        << ',' << format_double(m.p_detect.value) << ',' << format_double(m.p_quiet.value) << ','
        << format_double(m.efficiency.value) << ',' << format_double(m.efficiency.ci_lo) << ','
        << format_double(m.efficiency.ci_hi) << ',' << format_double(m.analytic_error) << ','
        << format_double(m.analytic_efficiency.lower) << ','
        << format_double(m.analytic_efficiency.upper) << ',' << m.base_seed << '\n';
  }
}

}  // namespace sfc
