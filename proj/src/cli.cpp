#include "tightclass/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "tightclass/analysis.hpp"
#include "tightclass/error.hpp"
#include "tightclass/frames.hpp"
#include "tightclass/matrix_io.hpp"
#include "tightclass/montecarlo.hpp"
#include "tightclass/rng.hpp"
#include "tightclass/signals.hpp"

namespace tightclass::cli {
namespace {

/// Thrown for bad flags or config values; maps to kParse.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double value, int digits = 10) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, value);
  return buffer;
}

void print_certificate(std::ostream& out, std::string_view label, const FrameCertificate& cert) {
  out << label << ": is_tight=" << (cert.is_tight ? "true" : "false") << " frame_constant_c="
      << (cert.frame_constant_c ? fmt(*cert.frame_constant_c, 17) : "-")
      << " is_equinorm=" << (cert.is_equinorm ? "true" : "false")
      << " column_norm_psi=" << (cert.column_norm_psi ? fmt(*cert.column_norm_psi, 17) : "-")
      << " tightness_residual=" << fmt(cert.tightness_residual, 6) << '\n';
}

MeasurementMatrix load_matrix(const std::string& path) {
  return MeasurementMatrix(read_matrix(std::filesystem::path(path)));
}

// ---------------------------------------------------------------------------
// tighten / certify

struct TightenArgs {
  std::string input;
  std::string output;
  double c = 1.0;
  bool energy_preserving = false;
};

int cmd_tighten(const TightenArgs& args, std::ostream& out) {
  const MeasurementMatrix phi = load_matrix(args.input);
  print_certificate(out, "input", certify(phi));
  const MeasurementMatrix tightened =
      args.energy_preserving ? tighten_energy_preserving(phi) : tighten(phi, args.c);
  write_matrix(std::filesystem::path(args.output), tightened.entries());
  print_certificate(out, "output", certify(tightened));
  return kOk;
}

int cmd_certify(const std::string& input, std::ostream& out) {
  print_certificate(out, "certificate", certify(load_matrix(input)));
  return kOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string matrix;
  std::vector<std::string> signal_files;
  std::optional<double> sigma;
  std::optional<double> snr_db;
  int true_index = 1;
  std::string csv;
};

HypothesisSet load_hypotheses(const std::vector<std::string>& files) {
  std::vector<Eigen::VectorXd> rows;
  for (const auto& file : files) {
    const Eigen::MatrixXd block = read_matrix(std::filesystem::path(file));
    for (Eigen::Index i = 0; i < block.rows(); ++i) rows.emplace_back(block.row(i).transpose());
  }
  int k = 1;
  for (const auto& r : rows) k = std::max(k, static_cast<int>((r.array() != 0.0).count()));
  std::vector<SparseSignal> signals;
  for (auto& r : rows) signals.emplace_back(std::move(r), k);
  return HypothesisSet(std::move(signals));
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out) {
  const MeasurementMatrix phi = load_matrix(args.matrix);
  const HypothesisSet hypotheses = load_hypotheses(args.signal_files);
  const double sigma =
      args.sigma ? *args.sigma : snr_to_sigma(*args.snr_db, hypotheses.common_norm());
  const auto m = static_cast<int>(hypotheses.size());
  if (args.true_index < 1 || args.true_index > m) {
    throw UsageError("--true-index must lie in [1, " + std::to_string(m) + "]");
  }
  const auto truth = static_cast<std::size_t>(args.true_index - 1);

  std::ostringstream csv;
  csv << "true_index,other_index,separation_ratio,q_argument,q_value\n";
  out << "hypotheses: " << m << "  sigma: " << fmt(sigma) << '\n';
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    if (i == truth) continue;
    const double ratio = separation_ratio(phi, hypotheses[truth], hypotheses[i]);
    const double argument = ratio / (2.0 * sigma);
    out << "pair " << truth + 1 << "," << i + 1 << ": separation_ratio=" << fmt(ratio)
        << " q_argument=" << fmt(argument) << " q_value=" << fmt(q_function(argument)) << '\n';
    csv << truth + 1 << ',' << i + 1 << ',' << fmt(ratio) << ',' << fmt(argument) << ','
        << fmt(q_function(argument)) << '\n';
  }
  if (m == 2) {
    const TheoreticalError exact = error_probability_2ary(phi, hypotheses[0], hypotheses[1], sigma);
    out << "error_probability (exact 2-ary): " << fmt(exact.probability) << '\n';
  } else {
    const TheoreticalError bound = union_bound_mary(phi, hypotheses, sigma, truth);
    out << "union_bound: " << fmt(bound.probability) << " (raw sum " << fmt(bound.raw_sum)
        << ")\n";
  }
  if (!args.csv.empty()) {
    std::ofstream file(args.csv);
    if (!file) throw UsageError("cannot write " + args.csv);
    file << csv.str();
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config_file;
  std::string output;
  std::string frame_mode = "both";
  std::string classifier = "correlation";
  std::optional<std::uint64_t> seed;
  Eigen::Index cols = 100;
  std::vector<Eigen::Index> rows{20, 40, 60, 80};
  std::vector<double> snr_db{5.0, 10.0, 15.0, 20.0};
  int k = 1;
  int m = 2;
  std::int64_t trials = 5000;
  unsigned threads = 0;
  bool redraw_per_trial = false;
};

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  std::istringstream in(text);
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw UsageError("config key " + key + ": bad value \"" + text + "\"");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) values.push_back(parse_value<T>(key, trim(item)));
  if (values.empty()) throw UsageError("config key " + key + ": empty list");
  return values;
}

/// Flat `key=value` file; `#` starts a comment. Keys mirror the long flags.
/// Values already given on the command line win.
void apply_config(const std::string& path, const CLI::App& cmd, SimulateArgs& args) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (cmd.count("--" + key) > 0) continue;
    if (key == "cols") args.cols = parse_value<Eigen::Index>(key, value);
    else if (key == "rows") args.rows = parse_list<Eigen::Index>(key, value);
    else if (key == "snr-db") args.snr_db = parse_list<double>(key, value);
    else if (key == "k") args.k = parse_value<int>(key, value);
    else if (key == "m") args.m = parse_value<int>(key, value);
    else if (key == "trials") args.trials = parse_value<std::int64_t>(key, value);
    else if (key == "seed") args.seed = parse_value<std::uint64_t>(key, value);
    else if (key == "frame-mode") args.frame_mode = value;
    else if (key == "classifier") args.classifier = value;
    else if (key == "threads") args.threads = parse_value<unsigned>(key, value);
    else if (key == "redraw-per-trial") args.redraw_per_trial = parse_value<int>(key, value) != 0;
    else if (key == "output") args.output = value;
    else throw UsageError(path + ":" + std::to_string(line_no) + ": unknown key " + key);
  }
}

ExperimentConfig to_experiment(const SimulateArgs& args) {
  if (!args.seed) throw UsageError("--seed is required");
  ExperimentConfig config;
  config.N = args.cols;
  config.k = args.k;
  config.m = args.m;
  config.n_values = args.rows;
  config.snr_db_values = args.snr_db;
  config.trials = args.trials;
  config.seed = *args.seed;
  config.threads = args.threads;
  config.redraw_per_trial = args.redraw_per_trial;
  try {
    config.classifier_kind = parse_classifier_kind(args.classifier);
    if (args.frame_mode == "both") {
      config.frame_modes = {FrameMode::NonTight, FrameMode::Tightened};
    } else {
      config.frame_modes = {parse_frame_mode(args.frame_mode)};
    }
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return config;
}

void print_ordering_summary(std::ostream& out, const SweepResult& result) {
  std::map<std::pair<Eigen::Index, double>, const SweepRow*> non_tight;
  std::map<std::pair<Eigen::Index, double>, const SweepRow*> tightened;
  for (const auto& row : result.rows) {
    auto& slot = row.frame_mode == FrameMode::NonTight ? non_tight : tightened;
    slot[{row.n, row.snr_db}] = &row;
  }
  int points = 0;
  int ordered = 0;
  int within_ci = 0;
  for (const auto& [key, loose] : non_tight) {
    const auto it = tightened.find(key);
    if (it == tightened.end()) continue;
    ++points;
    const double tight_rate = it->second->estimate.rate;
    ordered += tight_rate <= loose->estimate.rate;
    within_ci += tight_rate <= loose->estimate.rate + loose->estimate.half_width();
  }
  if (points == 0) {
    out << "summary: " << result.rows.size() << " rows (single frame mode, no ordering check)\n";
    return;
  }
  out << "summary: tightened <= non-tight at " << ordered << "/" << points << " points ("
      << within_ci << "/" << points << " within the non-tight CI half-width)\n";
}

int cmd_simulate(SimulateArgs args, const CLI::App& cmd, std::ostream& out) {
  if (!args.config_file.empty()) apply_config(args.config_file, cmd, args);
  const ExperimentConfig config = to_experiment(args);

  const SweepResult result = run_sweep(config);
  if (args.output.empty()) {
    write_csv(out, result);
  } else {
    std::ofstream file(args.output);
    if (!file) throw UsageError("cannot write " + args.output);
    write_csv(file, result);
  }
  print_ordering_summary(out, result);
  return kOk;
}

// ---------------------------------------------------------------------------
// check

struct CheckArgs {
  std::int64_t instances = 1000;
  std::optional<std::uint64_t> seed;
  Eigen::Index cols = 100;
  bool tight = false;
};

constexpr double kGapSlack = 1e-10;

int cmd_check(const CheckArgs& args, std::ostream& out) {
  if (!args.seed) throw UsageError("--seed is required");
  const Eigen::Index N = args.cols;
  if (N < 20) throw UsageError("--cols must be at least 20");
  const std::array<int, 3> sparsities{1, 5, 10};

  double worst_gap = std::numeric_limits<double>::infinity();
  double largest_abs_gap = 0.0;
  std::int64_t violations = 0;
  for (std::int64_t i = 0; i < args.instances; ++i) {
    const std::uint64_t seed = derive_seed(*args.seed, {static_cast<std::uint64_t>(i)});
    Rng rng(seed);
    const auto n = static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>(N - 1)));
    const int k = std::min<int>(sparsities[rng.below(sparsities.size())], static_cast<int>(N / 2));
    MeasurementMatrix phi = generate_gaussian(n, N, derive_seed(seed, {1}));
    if (args.tight) phi = tighten(phi, 1.0);
    const HypothesisSet pair = generate_hypotheses(N, k, 2, 1.0, derive_seed(seed, {2}));
    const RatioGap gap = theorem2_gap(phi, pair[0], pair[1]);
    const double relative = gap.relative_gap();
    worst_gap = std::min(worst_gap, relative);
    largest_abs_gap = std::max(largest_abs_gap, std::abs(relative));
    const bool violated = relative < -kGapSlack || (args.tight && std::abs(relative) > kGapSlack);
    if (violated) {
      ++violations;
      out << "violation: instance " << i << " n=" << n << " k=" << k
          << " ratio_before=" << fmt(gap.ratio_before, 17)
          << " ratio_after=" << fmt(gap.ratio_after, 17) << '\n';
    }
  }
  out << "instances: " << args.instances << '\n';
  if (args.instances > 0) {
    out << "worst relative gap (ratio_after - ratio_before) / ratio_after: " << fmt(worst_gap)
        << '\n';
    out << "largest |relative gap|: " << fmt(largest_abs_gap) << '\n';
  }
  out << "violations: " << violations << '\n';
  return violations == 0 ? kOk : kPropertyViolation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compressive classification with tightened measurement matrices"};
  app.require_subcommand(1);

  TightenArgs tighten_args;
  auto* tighten_cmd = app.add_subcommand("tighten", "Row-orthogonalize a measurement matrix");
  tighten_cmd->add_option("--input", tighten_args.input, "Matrix file")->required();
  tighten_cmd->add_option("--output", tighten_args.output, "Where to write the result")->required();
  auto* c_opt = tighten_cmd->add_option("--c", tighten_args.c, "Frame constant (default 1)");
  tighten_cmd
      ->add_flag("--energy-preserving", tighten_args.energy_preserving,
                 "Use c = (N/n) psi^2 with psi the mean column norm")
      ->excludes(c_opt);

  std::string certify_input;
  auto* certify_cmd = app.add_subcommand("certify", "Report the frame certificate of a matrix");
  certify_cmd->add_option("--input", certify_input, "Matrix file")->required();

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Closed-form error probability or union bound");
  analyze_cmd->add_option("--matrix", analyze_args.matrix, "Matrix file")->required();
  analyze_cmd
      ->add_option("--signals", analyze_args.signal_files,
                   "Signal files; every row of every file is one hypothesis")
      ->required();
  auto* sigma_opt = analyze_cmd->add_option("--sigma", analyze_args.sigma, "Noise sigma");
  auto* snr_opt = analyze_cmd->add_option("--snr-db", analyze_args.snr_db, "SNR ||s||^2/sigma^2 in dB");
  sigma_opt->excludes(snr_opt);
  analyze_cmd->add_option("--true-index", analyze_args.true_index,
                          "One-based true hypothesis for the union bound");
  analyze_cmd->add_option("--csv", analyze_args.csv, "Also write pairwise terms as CSV");

  SimulateArgs sim_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo sweep of error rates");
  simulate_cmd->add_option("--config", sim_args.config_file, "key=value config file");
  simulate_cmd->add_option("--output", sim_args.output, "CSV output (default stdout)");
  simulate_cmd->add_option("--cols", sim_args.cols, "Signal dimension N");
  simulate_cmd->add_option("--rows", sim_args.rows, "Measurement counts n")->delimiter(',');
  simulate_cmd->add_option("--snr-db", sim_args.snr_db, "SNR values in dB")->delimiter(',');
  simulate_cmd->add_option("--k", sim_args.k, "Sparsity");
  simulate_cmd->add_option("--m", sim_args.m, "Number of hypotheses");
  simulate_cmd->add_option("--trials", sim_args.trials, "Trials per grid point");
  simulate_cmd->add_option("--seed", sim_args.seed, "Experiment seed (required)");
  simulate_cmd->add_option("--frame-mode", sim_args.frame_mode, "non_tight|tightened|both");
  simulate_cmd->add_option("--classifier", sim_args.classifier, "correlation|matched_filter");
  simulate_cmd->add_option("--threads", sim_args.threads, "Worker threads (0 = all cores)");
  simulate_cmd->add_flag("--redraw-per-trial", sim_args.redraw_per_trial,
                         "Draw a fresh matrix for every trial");

  CheckArgs check_args;
  auto* check_cmd = app.add_subcommand("check", "Check the tightening inequality on random instances");
  check_cmd->add_option("--instances", check_args.instances, "Number of instances")
      ->check(CLI::NonNegativeNumber);
  check_cmd->add_option("--seed", check_args.seed, "Seed (required)");
  check_cmd->add_option("--cols", check_args.cols, "Signal dimension N");
  check_cmd->add_flag("--tight", check_args.tight, "Tighten every matrix first (equality case)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*tighten_cmd) return cmd_tighten(tighten_args, out);
    if (*certify_cmd) return cmd_certify(certify_input, out);
    if (*analyze_cmd) {
      if (!analyze_args.sigma && !analyze_args.snr_db) throw UsageError("give --sigma or --snr-db");
      return cmd_analyze(analyze_args, out);
    }
    if (*check_cmd) return cmd_check(check_args, out);
    if (*simulate_cmd) {
      try {
        return cmd_simulate(sim_args, *simulate_cmd, out);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Parse) throw;
        err << "error: sweep aborted: " << e.what() << '\n';
        return kSweepAbort;
      }
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Parse ? kParse : kNumerical;
  }
  return kParse;
}

}  // namespace tightclass::cli
