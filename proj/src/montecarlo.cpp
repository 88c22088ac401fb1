#include "tightclass/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "tightclass/error.hpp"
#include "tightclass/rng.hpp"

namespace tightclass {
namespace {

// Stream tags for derive_seed; distinct so the noise, matrix and signal
// streams never collide.
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kMatrixStream = 2;
constexpr std::uint64_t kSignalStream = 3;

constexpr double kZ95 = 1.959963984540054;

unsigned resolve_threads(unsigned requested, std::int64_t trials) {
  unsigned threads = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::int64_t>(threads, trials));
}

MeasurementMatrix frame_for(const MeasurementMatrix& gaussian, FrameMode mode) {
  return mode == FrameMode::Tightened ? tighten(gaussian, 1.0) : gaussian;
}

// Splits [0, trials) into contiguous blocks, one per worker. Each trial's
// outcome depends only on its index, so the integer total is the same for
// any split.
template <typename CountBlock>
std::int64_t count_in_parallel(std::int64_t trials, unsigned threads, CountBlock count_block) {
  if (threads <= 1) return count_block(0, trials);
  std::vector<std::int64_t> partial(threads, 0);
  std::vector<std::exception_ptr> failures(threads);
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      const std::int64_t begin = trials * w / threads;
      const std::int64_t end = trials * (w + 1) / threads;
      workers.emplace_back([&, w, begin, end] {
        try {
          partial[w] = count_block(begin, end);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  std::int64_t total = 0;
  for (std::int64_t p : partial) total += p;
  return total;
}

ErrorEstimate estimate_fixed(const MeasurementMatrix& phi, const ExperimentConfig& config,
                             const HypothesisSet& hypotheses, double sigma) {
  const Classifier classifier(phi, hypotheses, config.classifier_kind);
  const auto m = static_cast<std::int64_t>(hypotheses.size());
  const std::int64_t errors = count_in_parallel(
      config.trials, resolve_threads(config.threads, config.trials),
      [&](std::int64_t begin, std::int64_t end) {
        std::int64_t count = 0;
        for (std::int64_t t = begin; t < end; ++t) {
          count += run_trial(phi, classifier, hypotheses, sigma, static_cast<std::size_t>(t % m),
                             trial_noise_seed(config.seed, t));
        }
        return count;
      });
  return wilson_estimate(errors, config.trials);
}

ErrorEstimate estimate_redrawn(const ExperimentConfig& config, const GridPoint& point,
                               const HypothesisSet& hypotheses, double sigma) {
  const auto m = static_cast<std::int64_t>(hypotheses.size());
  const std::int64_t errors = count_in_parallel(
      config.trials, resolve_threads(config.threads, config.trials),
      [&](std::int64_t begin, std::int64_t end) {
        std::int64_t count = 0;
        for (std::int64_t t = begin; t < end; ++t) {
          const MeasurementMatrix phi = frame_for(
              generate_gaussian(point.n, config.N, matrix_seed(config.seed, point.n, t)),
              point.frame_mode);
          const Classifier classifier(phi, hypotheses, config.classifier_kind);
          count += run_trial(phi, classifier, hypotheses, sigma, static_cast<std::size_t>(t % m),
                             trial_noise_seed(config.seed, t));
        }
        return count;
      });
  return wilson_estimate(errors, config.trials);
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.10g", value);
  return buffer;
}

}  // namespace

std::string_view to_string(FrameMode mode) noexcept {
  return mode == FrameMode::NonTight ? "non_tight" : "tightened";
}

FrameMode parse_frame_mode(std::string_view text) {
  if (text == "non_tight") return FrameMode::NonTight;
  if (text == "tightened") return FrameMode::Tightened;
  throw Error(ErrorKind::InvalidArgument,
              "unknown frame mode \"" + std::string(text) + "\" (non_tight|tightened)");
}

void ExperimentConfig::validate() const {
  if (N <= 1) throw Error(ErrorKind::InvalidArgument, "N must be at least 2");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  if (m < 2) throw Error(ErrorKind::InvalidArgument, "m must be at least 2");
  if (static_cast<Eigen::Index>(m) * k > N) {
    throw Error(ErrorKind::Infeasible, "m*k = " + std::to_string(m * k) + " exceeds N = " +
                                           std::to_string(N));
  }
  if (n_values.empty()) throw Error(ErrorKind::InvalidArgument, "no n values");
  for (Eigen::Index n : n_values) {
    if (n <= 0 || n >= N) {
      throw Error(ErrorKind::BadDimensions,
                  "n = " + std::to_string(n) + " outside (0, " + std::to_string(N) + ")");
    }
  }
  if (snr_db_values.empty()) throw Error(ErrorKind::InvalidArgument, "no SNR values");
  for (double snr : snr_db_values) {
    if (!std::isfinite(snr)) throw Error(ErrorKind::InvalidArgument, "SNR must be finite");
  }
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be at least 1");
  if (frame_modes.empty()) throw Error(ErrorKind::InvalidArgument, "no frame modes");
}

ErrorEstimate wilson_estimate(std::int64_t errors, std::int64_t trials) {
  if (trials < 1 || errors < 0 || errors > trials) {
    throw Error(ErrorKind::InvalidArgument, "need 0 <= errors <= trials and trials >= 1");
  }
  ErrorEstimate out;
  out.errors = errors;
  out.trials = trials;
  const auto t = static_cast<double>(trials);
  out.rate = static_cast<double>(errors) / t;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / t;
  const double center = (out.rate + z2 / (2.0 * t)) / denom;
  const double half =
      kZ95 / denom * std::sqrt(out.rate * (1.0 - out.rate) / t + z2 / (4.0 * t * t));
  out.ci_low = errors == 0 ? 0.0 : std::min(out.rate, std::max(0.0, center - half));
  out.ci_high = errors == trials ? 1.0 : std::max(out.rate, std::min(1.0, center + half));
  return out;
}

std::uint64_t trial_noise_seed(std::uint64_t seed, std::int64_t trial) {
  return derive_seed(seed, {kNoiseStream, static_cast<std::uint64_t>(trial)});
}

std::uint64_t matrix_seed(std::uint64_t seed, Eigen::Index n) {
  return derive_seed(seed, {kMatrixStream, static_cast<std::uint64_t>(n)});
}

std::uint64_t matrix_seed(std::uint64_t seed, Eigen::Index n, std::int64_t trial) {
  return derive_seed(seed, {kMatrixStream, static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(trial)});
}

std::uint64_t hypotheses_seed(std::uint64_t seed) {
  return derive_seed(seed, {kSignalStream});
}

bool run_trial(const MeasurementMatrix& phi, const Classifier& classifier,
               const HypothesisSet& hypotheses, double sigma, std::size_t true_index,
               std::uint64_t trial_seed) {
  if (true_index >= hypotheses.size()) {
    throw Error(ErrorKind::InvalidArgument, "true index out of range");
  }
  Eigen::VectorXd x(phi.cols());
  standard_normal_vector(trial_seed, x);
  x = hypotheses[true_index].values() + sigma * x;
  const Eigen::VectorXd y = phi.entries() * x;
  return classifier.classify(y) != static_cast<Eigen::Index>(true_index);
}

bool run_trial(const MeasurementMatrix& phi, const HypothesisSet& hypotheses, double sigma,
               std::size_t true_index, std::uint64_t trial_seed, ClassifierKind kind) {
  return run_trial(phi, Classifier(phi, hypotheses, kind), hypotheses, sigma, true_index,
                   trial_seed);
}

ErrorEstimate estimate_error_rate(const ExperimentConfig& config, const GridPoint& point,
                                  const HypothesisSet& hypotheses) {
  config.validate();
  const double sigma = snr_to_sigma(point.snr_db, hypotheses.common_norm());
  if (config.redraw_per_trial) return estimate_redrawn(config, point, hypotheses, sigma);
  const MeasurementMatrix phi = frame_for(
      generate_gaussian(point.n, config.N, matrix_seed(config.seed, point.n)), point.frame_mode);
  return estimate_fixed(phi, config, hypotheses, sigma);
}

TheoreticalError theoretical_error(const MeasurementMatrix& phi, const HypothesisSet& hypotheses,
                                   double sigma) {
  if (hypotheses.size() == 2) {
    return error_probability_2ary(phi, hypotheses[0], hypotheses[1], sigma);
  }
  // Uniform priors: average the per-hypothesis bounds. Each clamped term is
  // still a valid bound on its conditional error, so the mean bounds the
  // overall rate.
  TheoreticalError out;
  out.kind = BoundKind::UnionBoundMary;
  out.argument = std::numeric_limits<double>::infinity();
  const auto m = static_cast<double>(hypotheses.size());
  for (std::size_t t = 0; t < hypotheses.size(); ++t) {
    const TheoreticalError bound = union_bound_mary(phi, hypotheses, sigma, t);
    out.probability += bound.probability / m;
    out.raw_sum += bound.raw_sum / m;
    out.argument = std::min(out.argument, bound.argument);
  }
  return out;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const HypothesisSet hypotheses =
      generate_hypotheses(config.N, config.k, config.m, 1.0, hypotheses_seed(config.seed));

  SweepResult result;
  result.rows.reserve(config.n_values.size() * config.snr_db_values.size() *
                      config.frame_modes.size());
  for (Eigen::Index n : config.n_values) {
    const MeasurementMatrix gaussian = generate_gaussian(n, config.N, matrix_seed(config.seed, n));
    const MeasurementMatrix tightened = tighten(gaussian, 1.0);
    for (double snr_db : config.snr_db_values) {
      const double sigma = snr_to_sigma(snr_db, hypotheses.common_norm());
      for (FrameMode mode : config.frame_modes) {
        const MeasurementMatrix& phi = mode == FrameMode::Tightened ? tightened : gaussian;
        SweepRow row;
        row.n = n;
        row.snr_db = snr_db;
        row.k = config.k;
        row.m = config.m;
        row.frame_mode = mode;
        if (config.redraw_per_trial) {
          row.estimate = estimate_redrawn(config, GridPoint{n, snr_db, mode}, hypotheses, sigma);
        } else {
          row.estimate = estimate_fixed(phi, config, hypotheses, sigma);
          row.theoretical = theoretical_error(phi, hypotheses, sigma);
        }
        result.rows.push_back(row);
      }
    }
  }
  return result;
}

void write_csv(std::ostream& out, const SweepResult& result) {
  out << "n,snr_db,k,m,frame_mode,trials,errors,error_rate,ci_low,ci_high,theoretical\n";
  for (const SweepRow& row : result.rows) {
    out << row.n << ',' << format_double(row.snr_db) << ',' << row.k << ',' << row.m << ','
        << to_string(row.frame_mode) << ',' << row.estimate.trials << ',' << row.estimate.errors
        << ',' << format_double(row.estimate.rate) << ',' << format_double(row.estimate.ci_low)
        << ',' << format_double(row.estimate.ci_high) << ',';
    if (row.theoretical) out << format_double(row.theoretical->probability);
    out << '\n';
  }
}

SweepResult read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "n,snr_db,k,m,frame_mode,trials,errors,error_rate,ci_low,ci_high,theoretical") {
    throw Error(ErrorKind::Parse, "line 1: unexpected CSV header");
  }
  SweepResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream stream(line);
    std::string field;
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 11) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected 11 fields");
    }
    try {
      SweepRow row;
      row.n = std::stoll(fields[0]);
      row.snr_db = std::stod(fields[1]);
      row.k = std::stoi(fields[2]);
      row.m = std::stoi(fields[3]);
      row.frame_mode = parse_frame_mode(fields[4]);
      row.estimate.trials = std::stoll(fields[5]);
      row.estimate.errors = std::stoll(fields[6]);
      row.estimate.rate = std::stod(fields[7]);
      row.estimate.ci_low = std::stod(fields[8]);
      row.estimate.ci_high = std::stod(fields[9]);
      if (!fields[10].empty()) {
        TheoreticalError theory;
        theory.kind = row.m == 2 ? BoundKind::Exact2ary : BoundKind::UnionBoundMary;
        theory.probability = std::stod(fields[10]);
        theory.raw_sum = theory.probability;
        row.theoretical = theory;
      }
      result.rows.push_back(row);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return result;
}

}  // namespace tightclass
