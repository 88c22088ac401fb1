#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "tightclass/analysis.hpp"
#include "tightclass/classifier.hpp"
#include "tightclass/frames.hpp"
#include "tightclass/signals.hpp"

namespace tightclass {

enum class FrameMode { NonTight, Tightened };

std::string_view to_string(FrameMode mode) noexcept;
FrameMode parse_frame_mode(std::string_view text);

struct ExperimentConfig {
  Eigen::Index N = 100;
  int k = 1;
  int m = 2;
  std::vector<Eigen::Index> n_values{20, 40, 60, 80};
  std::vector<double> snr_db_values{5.0, 10.0, 15.0, 20.0};
  std::int64_t trials = 5000;
  std::uint64_t seed = 0;
  ClassifierKind classifier_kind = ClassifierKind::Correlation;
  std::vector<FrameMode> frame_modes{FrameMode::NonTight, FrameMode::Tightened};
  /// Draw a fresh Phi for every trial instead of one per grid point.
  bool redraw_per_trial = false;
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned threads = 1;

  /// Throws InvalidArgument/Infeasible when the config cannot be run.
  void validate() const;
};

struct ErrorEstimate {
  std::int64_t errors = 0;
  std::int64_t trials = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  double ci_width() const noexcept { return ci_high - ci_low; }
  double half_width() const noexcept { return 0.5 * (ci_high - ci_low); }
  bool contains(double p) const noexcept { return ci_low <= p && p <= ci_high; }
};

/// 95% Wilson score interval for errors out of trials.
ErrorEstimate wilson_estimate(std::int64_t errors, std::int64_t trials);

/// Signal-space noise stream seed for one trial. Independent of n, SNR, frame
/// mode and thread assignment, so every grid point sees the same noise draws.
std::uint64_t trial_noise_seed(std::uint64_t seed, std::int64_t trial);

/// Seed of the Gaussian matrix used for the grid points with n rows (or, when
/// redrawing, for one trial).
std::uint64_t matrix_seed(std::uint64_t seed, Eigen::Index n);
std::uint64_t matrix_seed(std::uint64_t seed, Eigen::Index n, std::int64_t trial);
std::uint64_t hypotheses_seed(std::uint64_t seed);

/// One classification: draws x = s_T + w with w from trial_seed, measures
/// y = Phi x, and returns whether the decision differs from true_index.
bool run_trial(const MeasurementMatrix& phi, const Classifier& classifier,
               const HypothesisSet& hypotheses, double sigma, std::size_t true_index,
               std::uint64_t trial_seed);

/// Convenience overload building the classifier on the fly.
bool run_trial(const MeasurementMatrix& phi, const HypothesisSet& hypotheses,
               double sigma, std::size_t true_index, std::uint64_t trial_seed,
               ClassifierKind kind = ClassifierKind::Correlation);

struct GridPoint {
  Eigen::Index n = 0;
  double snr_db = 0.0;
  FrameMode frame_mode = FrameMode::NonTight;
};

/// Error rate at one grid point. Trial t uses true hypothesis t mod m and
/// noise seed trial_noise_seed(config.seed, t).
ErrorEstimate estimate_error_rate(const ExperimentConfig& config, const GridPoint& point,
                                  const HypothesisSet& hypotheses);

struct SweepRow {
  Eigen::Index n = 0;
  double snr_db = 0.0;
  int k = 0;
  int m = 0;
  FrameMode frame_mode = FrameMode::NonTight;
  ErrorEstimate estimate;
  /// Closed-form prediction: exact 2-ary probability for m = 2, the union
  /// bound averaged over the true hypothesis for m > 2. Absent when Phi is
  /// redrawn per trial.
  std::optional<TheoreticalError> theoretical;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Rows are ordered by n, then SNR, then frame mode, following the order of
/// the config lists.
SweepResult run_sweep(const ExperimentConfig& config);

/// Theoretical value for one fixed (Phi, H, sigma) with uniform priors.
TheoreticalError theoretical_error(const MeasurementMatrix& phi,
                                   const HypothesisSet& hypotheses, double sigma);

/// CSV with header
///   n,snr_db,k,m,frame_mode,trials,errors,error_rate,ci_low,ci_high,theoretical
/// and floats printed with 10 significant digits.
void write_csv(std::ostream& out, const SweepResult& result);
SweepResult read_csv(std::istream& in);

}  // namespace tightclass
