#include "sfc/cli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "sfc/analytics.hpp"
#include "sfc/baselines.hpp"
#include "sfc/channel.hpp"
#include "sfc/codebook.hpp"
#include "sfc/montecarlo.hpp"
#include "sfc/protocol.hpp"
#include "sfc/rng.hpp"

namespace sfc {
namespace {

// Output is buffered until the run succeeded, so failures never leave a
// partial file behind.
struct Sink {
  std::string path;  // empty -> stdout
  std::ostringstream body;
  void commit() const {
    if (path.empty()) {
      std::cout << body.str();
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << body.str();
  }
};

struct CommonOpts {
  int n = 64;
  int k = 6;
  int r = 11;
  double lambda = 0.2;
  uint64_t seed = 1;
  double epsilon = 1e-9;
  int64_t symbols = 100000;
  int replications = 1;
  int warmup = -1;
  std::string out;
  std::string config;
};

// Subcommand callbacks run after command-line options are bound, so feeding
// the file through the subcommand's own parser here lets explicit flags win:
// the stream parse only fills options that are still empty.  parse_from_stream
// fires the subcommand callback again once the file is merged; the caller's
// guard must make that inner invocation return immediately.
void apply_config(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  cmd->parse_from_stream(in);
}

FrameParams frame_of(const CommonOpts& o) {
  FrameParams f;
  f.num_sensors = o.n;
  f.codeword_len = o.k;
  f.num_slots = o.r;
  return f;
}

ExperimentConfig config_of(const CommonOpts& o, Scheme scheme, double lambda) {
  ExperimentConfig cfg;
  cfg.frame = frame_of(o);
  cfg.traffic.lambda = lambda;
  cfg.traffic.num_sensors = o.n;
  // horizon sized so the count of scored window offsets equals `symbols`
  const int wu = o.warmup < 0 ? o.k - 1 : o.warmup;
  if (o.symbols < 1) throw std::invalid_argument("--symbols must be >= 1");
  cfg.traffic.horizon = o.symbols + wu + o.k - 1;
  cfg.scheme = scheme;
  cfg.replications = o.replications;
  cfg.base_seed = o.seed;
  cfg.warmup = o.warmup;
  cfg.epsilon = o.epsilon;
  return cfg;
}

void add_frame_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--n", o.n, "sensor count");
  cmd->add_option("--k", o.k, "codeword length in subsymbols");
  cmd->add_option("--r", o.r, "slots per subsymbol");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--config", o.config, "key=value file; explicit flags win");
}

void add_run_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--lambda", o.lambda, "aggregate event rate per interval");
  cmd->add_option("--symbols", o.symbols, "scored window offsets per replication");
  cmd->add_option("--replications", o.replications, "independent replications");
  cmd->add_option("--epsilon", o.epsilon, "certificate budget for analytics");
  cmd->add_option("--warmup", o.warmup, "scored offsets start here (default k-1)");
  cmd->add_option("--out", o.out, "output file (default stdout)");
}

// --- analyze ----------------------------------------------------------------

void analyze_row(std::ostream& out, const char* scheme, const char* metric, double lambda,
                 const FrameParams& f, double value, double lo, double hi, double cert) {
  out << scheme << ',' << metric << ',' << format_double(lambda) << ',' << f.codeword_len << ','
      << f.num_slots << ',' << f.num_sensors << ',' << format_double(value) << ','
      << format_double(lo) << ',' << format_double(hi) << ',' << format_double(cert) << '\n';
}

void run_analyze(const CommonOpts& o, const std::vector<double>& lambdas, Sink& sink) {
  sink.body << "scheme,metric,lambda,k,R,N,value,lower,upper,certificate\n";
  for (double lam : lambdas) {
    AnalyticParams ap;
    ap.frame = frame_of(o);
    ap.lambda = lam;
    ap.epsilon = o.epsilon;
    ap.frame.validate();
    if (lam < 0) throw std::invalid_argument("--lambda must be >= 0");

    const EfficiencyReport eff = efficiency_closed_forms(ap);
    const CertifiedValue err = sfc_error_prob(ap);
    const double tdma_err = tdma_error_prob(ap);
    const double sal_err = saloha_error_prob(ap);

    // bracketed quantities report their lower bound as the headline value
    // (the bracket is tight; plots draw the lower curve)
    analyze_row(sink.body, "sfc", "efficiency", lam, ap.frame, eff.sfc.lower, eff.sfc.lower,
                eff.sfc.upper, 0.0);
    analyze_row(sink.body, "sfc", "overall_error", lam, ap.frame, err.value,
                std::max(0.0, err.value - err.certificate),
                std::min(1.0, err.value + err.certificate), err.certificate);
    analyze_row(sink.body, "sfc", "single_event_rate", lam, ap.frame, eff.false_flag_rate.lower,
                eff.false_flag_rate.lower, eff.false_flag_rate.upper, 0.0);
    analyze_row(sink.body, "sfc", "expected_energized", lam, ap.frame, eff.expected_energized,
                eff.expected_energized, eff.expected_energized, 0.0);
    analyze_row(sink.body, "tdma", "efficiency", lam, ap.frame, eff.tdma, eff.tdma, eff.tdma, 0.0);
    analyze_row(sink.body, "tdma", "overall_error", lam, ap.frame, tdma_err, tdma_err, tdma_err, 0.0);
    analyze_row(sink.body, "saloha", "efficiency", lam, ap.frame, eff.saloha, eff.saloha,
                eff.saloha, 0.0);
    analyze_row(sink.body, "saloha", "overall_error", lam, ap.frame, sal_err, sal_err, sal_err, 0.0);
  }
}

// --- simulate ---------------------------------------------------------------

void run_simulate(const CommonOpts& o, const std::string& scheme_str, const std::string& dump_grid,
                  const std::string& dump_events, Sink& sink) {
  const Scheme scheme = parse_scheme(scheme_str);
  if (!dump_grid.empty() && scheme != Scheme::SFC)
    throw std::invalid_argument("--dump-grid only applies to the sfc scheme");
  const ExperimentConfig cfg = config_of(o, scheme, o.lambda);
  const MetricsReport rep = run_experiment(cfg);
  const std::vector<SweepRow> rows{{"point", 0.0, rep}};
  write_sweep_csv(sink.body, rows);
  // side dumps replay replication 0 deterministically
  if (!dump_events.empty() || !dump_grid.empty()) {
    EventLog events = generate_events(cfg.traffic, derive_seed(cfg.base_seed, 0, 2));
    if (!dump_events.empty()) write_events_file(dump_events, events);
    if (!dump_grid.empty()) {
      Codebook book = generate_codebook(cfg.frame, derive_seed(cfg.base_seed, 0, 1));
      write_grid_file(dump_grid, sfc_transmit(events, book));
    }
  }
}

// --- sweep ------------------------------------------------------------------

std::vector<Scheme> parse_schemes(const std::vector<std::string>& names) {
  std::vector<Scheme> schemes;
  if (names.empty() || (names.size() == 1 && names[0] == "all"))
    return {Scheme::SFC, Scheme::TDMA, Scheme::SALOHA};
  for (const auto& s : names) schemes.push_back(parse_scheme(s));
  return schemes;
}

void run_sweep_cmd(const CommonOpts& o, const std::string& axis, const std::vector<double>& values,
                   const std::vector<std::string>& scheme_names, Sink& sink) {
  if (values.empty()) throw std::invalid_argument("sweep: need --values");
  for (size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1]))
      throw std::invalid_argument("sweep: axis values must be strictly increasing");

  std::vector<SweepRow> all;
  for (Scheme sch : parse_schemes(scheme_names)) {
    std::vector<ExperimentConfig> cfgs;
    for (double v : values) {
      CommonOpts oo = o;
      if (axis == "r" || axis == "n") {
        if (v < 1 || v != std::floor(v))
          throw std::invalid_argument("sweep: " + axis + " values must be positive integers");
        (axis == "r" ? oo.r : oo.n) = static_cast<int>(v);
      } else if (axis != "lambda") {
        throw std::invalid_argument("sweep: unknown axis " + axis + " (want r|n|lambda)");
      }
      cfgs.push_back(config_of(oo, sch, axis == "lambda" ? v : oo.lambda));
    }
    std::vector<SweepRow> rows = run_sweep(axis, values, cfgs);
    all.insert(all.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  write_sweep_csv(sink.body, all);
}

// --- figures ----------------------------------------------------------------

struct FigureSpec {
  std::string file;
  std::string title;
  std::string x_label;
  std::string y_label;        // "efficiency" or "overall error"
  std::string marker_column;  // simulated values
  std::string line_column;    // analytic values
  std::vector<SweepRow> rows;
};

constexpr Scheme kAllSchemes[] = {Scheme::SFC, Scheme::TDMA, Scheme::SALOHA};

void run_figures(const CommonOpts& base, const std::string& out_dir) {
  std::vector<FigureSpec> figs;

  // the efficiency presets plot the closed-form efficiency bracket; only the
  // error preset needs the certified per-offset error sweep attached
  auto efficiency_only = [](std::vector<ExperimentConfig>& cfgs) {
    for (ExperimentConfig& c : cfgs) c.with_error_curve = false;
  };

  // 1) efficiency against the slot count at two loads
  {
    FigureSpec fig{"efficiency_vs_slots.csv", "Efficiency vs slot count",
                   "slots per interval (R)", "efficiency", "efficiency", "analytic_lower", {}};
    for (double lam : {0.1, 0.32})
      for (Scheme sch : kAllSchemes) {
        std::vector<double> values;
        std::vector<ExperimentConfig> cfgs;
        for (int r = 7; r <= 17; ++r) {
          CommonOpts o = base;
          o.r = r;
          values.push_back(r);
          cfgs.push_back(config_of(o, sch, lam));
        }
        efficiency_only(cfgs);
        auto rows = run_sweep("r", values, cfgs);
        fig.rows.insert(fig.rows.end(), rows.begin(), rows.end());
      }
    figs.push_back(std::move(fig));
  }

  // 2) efficiency against the load
  {
    FigureSpec fig{"efficiency_vs_load.csv", "Efficiency vs event rate",
                   "event rate per interval (lambda)", "efficiency", "efficiency",
                   "analytic_lower", {}};
    const std::vector<double> lambdas{0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.32, 0.4, 0.5};
    for (Scheme sch : kAllSchemes) {
      std::vector<ExperimentConfig> cfgs;
      for (double lam : lambdas) cfgs.push_back(config_of(base, sch, lam));
      efficiency_only(cfgs);
      auto rows = run_sweep("lambda", lambdas, cfgs);
      fig.rows.insert(fig.rows.end(), rows.begin(), rows.end());
    }
    figs.push_back(std::move(fig));
  }

  // 3) efficiency when users and slots scale together (N = 6R, codeword
  //    length tracking ceil(log2 N), load proportional to the population)
  {
    FigureSpec fig{"efficiency_vs_scale.csv", "Efficiency vs jointly scaled slots and sensors",
                   "slots per interval (R), with N = 6R", "efficiency", "efficiency",
                   "analytic_lower", {}};
    const std::vector<int> rs{7, 9, 11, 13, 15, 17};
    for (Scheme sch : kAllSchemes) {
      std::vector<double> values;
      std::vector<ExperimentConfig> cfgs;
      for (int r : rs) {
        CommonOpts o = base;
        o.r = r;
        o.n = 6 * r;
        o.k = static_cast<int>(std::bit_width(static_cast<unsigned>(o.n - 1)));
        values.push_back(r);
        cfgs.push_back(config_of(o, sch, o.n / 200.0));
      }
      efficiency_only(cfgs);
      auto rows = run_sweep("r", values, cfgs);
      fig.rows.insert(fig.rows.end(), rows.begin(), rows.end());
    }
    figs.push_back(std::move(fig));
  }

  // 4) efficiency against the sensor/slot ratio at two loads
  {
    FigureSpec fig{"efficiency_vs_density.csv", "Efficiency vs sensor-to-slot ratio",
                   "sensors per slot (N/R)", "efficiency", "efficiency", "analytic_lower", {}};
    const std::vector<int> ns{11, 22, 33, 44, 55, 64};
    for (double lam : {0.02, 0.08})
      for (Scheme sch : kAllSchemes) {
        std::vector<double> values;
        std::vector<ExperimentConfig> cfgs;
        for (int n : ns) {
          CommonOpts o = base;
          o.n = n;
          values.push_back(static_cast<double>(n) / o.r);
          cfgs.push_back(config_of(o, sch, lam));
        }
        efficiency_only(cfgs);
        auto rows = run_sweep("n_over_r", values, cfgs);
        fig.rows.insert(fig.rows.end(), rows.begin(), rows.end());
      }
    figs.push_back(std::move(fig));
  }

  // 5) per-offset error probability against the slot count
  {
    FigureSpec fig{"error_vs_slots.csv", "Overall error vs slot count", "slots per interval (R)",
                   "overall error", "overall_error", "analytic_value", {}};
    for (Scheme sch : kAllSchemes) {
      std::vector<double> values;
      std::vector<ExperimentConfig> cfgs;
      for (int r = 7; r <= 17; ++r) {
        CommonOpts o = base;
        o.r = r;
        values.push_back(r);
        cfgs.push_back(config_of(o, sch, 0.2));
      }
      auto rows = run_sweep("r", values, cfgs);
      fig.rows.insert(fig.rows.end(), rows.begin(), rows.end());
    }
    figs.push_back(std::move(fig));
  }

  // all compute done; only now touch the filesystem
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  nlohmann::json desc;
  desc["figures"] = nlohmann::json::array();
  for (const FigureSpec& fig : figs) {
    std::ostringstream csv;
    write_sweep_csv(csv, fig.rows);
    std::ofstream out(fs::path(out_dir) / fig.file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + fig.file);
    out << csv.str();

    nlohmann::json j;
    j["file"] = fig.file;
    j["title"] = fig.title;
    j["x"] = {{"column", "axis_value"}, {"label", fig.x_label}};
    j["y"] = {{"label", fig.y_label}};
    j["group_by"] = {"scheme", "lambda"};
    j["series"] = {{{"role", "marker"}, {"column", fig.marker_column}, {"label", "simulation"}},
                   {{"role", "line"}, {"column", fig.line_column}, {"label", "analysis"}}};
    desc["figures"].push_back(std::move(j));
  }
  std::ofstream jd(fs::path(out_dir) / "plots.json", std::ios::binary);
  if (!jd) throw std::runtime_error("cannot open for write: plots.json");
  jd << desc.dump(2) << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"codebook-superposition alarm transmission toolkit"};
  app.require_subcommand(1);

  CommonOpts maps_o, analyze_o, sim_o, sweep_o, fig_o;
  bool merging_config = false;  // see apply_config: the merge re-fires the callback

  auto* maps = app.add_subcommand("maps", "generate a codebook of transmission maps");
  add_frame_flags(maps, maps_o);
  maps->add_option("--out", maps_o.out, "output file (default stdout)");
  maps->callback([&] {
    if (merging_config) return;
    merging_config = true;
    apply_config(maps, maps_o.config);
    merging_config = false;
    Sink sink{maps_o.out, {}};
    Codebook book = generate_codebook(frame_of(maps_o), maps_o.seed);
    write_codebook(sink.body, book);
    sink.commit();
  });

  auto* analyze = app.add_subcommand("analyze", "evaluate the closed-form performance curves");
  std::vector<double> analyze_lambdas;
  add_frame_flags(analyze, analyze_o);
  analyze->add_option("--lambda", analyze_lambdas, "event rate(s) per interval")
      ->expected(-1)
      ->delimiter(',');
  analyze->add_option("--epsilon", analyze_o.epsilon, "certificate budget");
  analyze->add_option("--out", analyze_o.out, "output file (default stdout)");
  analyze->callback([&] {
    if (merging_config) return;
    merging_config = true;
    apply_config(analyze, analyze_o.config);
    merging_config = false;
    if (analyze_lambdas.empty()) analyze_lambdas.push_back(analyze_o.lambda);
    Sink sink{analyze_o.out, {}};
    run_analyze(analyze_o, analyze_lambdas, sink);
    sink.commit();
  });

  auto* sim = app.add_subcommand("simulate", "run one replicated experiment");
  std::string sim_scheme = "sfc", sim_dump_grid, sim_dump_events;
  add_frame_flags(sim, sim_o);
  add_run_flags(sim, sim_o);
  sim->add_option("--scheme", sim_scheme, "sfc|tdma|saloha");
  sim->add_option("--dump-grid", sim_dump_grid, "write the replication-0 channel grid CSV here");
  sim->add_option("--dump-events", sim_dump_events, "write the replication-0 event log CSV here");
  sim->callback([&] {
    if (merging_config) return;
    merging_config = true;
    apply_config(sim, sim_o.config);
    merging_config = false;
    Sink sink{sim_o.out, {}};
    run_simulate(sim_o, sim_scheme, sim_dump_grid, sim_dump_events, sink);
    sink.commit();
  });

  auto* sweep = app.add_subcommand("sweep", "sweep one axis across schemes");
  std::string sweep_axis = "r";
  std::vector<double> sweep_values;
  std::vector<std::string> sweep_schemes;
  add_frame_flags(sweep, sweep_o);
  add_run_flags(sweep, sweep_o);
  sweep->add_option("--axis", sweep_axis, "r|n|lambda");
  sweep->add_option("--values", sweep_values, "axis values, increasing")->expected(-1)->delimiter(',');
  sweep->add_option("--scheme", sweep_schemes, "schemes to run (default all)")
      ->expected(-1)
      ->delimiter(',');
  sweep->callback([&] {
    if (merging_config) return;
    merging_config = true;
    apply_config(sweep, sweep_o.config);
    merging_config = false;
    Sink sink{sweep_o.out, {}};
    run_sweep_cmd(sweep_o, sweep_axis, sweep_values, sweep_schemes, sink);
    sink.commit();
  });

  auto* figures = app.add_subcommand("figures", "run the preset study sweeps");
  std::string fig_dir = "results";
  fig_o.epsilon = 1e-6;  // the presets trade certificate width for turnaround
  add_frame_flags(figures, fig_o);
  figures->add_option("--symbols", fig_o.symbols, "scored window offsets per point");
  figures->add_option("--replications", fig_o.replications, "replications per point");
  figures->add_option("--epsilon", fig_o.epsilon, "certificate budget (default 1e-6 here)");
  figures->add_option("--out", fig_dir, "output directory");
  figures->callback([&] {
    if (merging_config) return;
    merging_config = true;
    apply_config(figures, fig_o.config);
    merging_config = false;
    run_figures(fig_o, fig_dir);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const CertificateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sfc
