// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and thresholds are fixed here.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "tightclass/analysis.hpp"
#include "tightclass/classifier.hpp"
#include "tightclass/frames.hpp"
#include "tightclass/montecarlo.hpp"
#include "tightclass/rng.hpp"
#include "tightclass/signals.hpp"

using namespace tightclass;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* pattern, auto... values) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, pattern, values...);
  return buffer;
}

// 1. Tightening certificate.
Outcome tightening_certificate() {
  constexpr double kTolerance = 1e-10;
  double worst = 0.0;
  int count = 0;
  for (auto [n, N] : {std::pair<Eigen::Index, Eigen::Index>{20, 100}, {40, 100}, {80, 100}}) {
    for (int i = 0; i < 200; ++i, ++count) {
      const MeasurementMatrix phi =
          generate_gaussian(n, N, derive_seed(1001, {std::uint64_t(n), std::uint64_t(i)}));
      const Eigen::MatrixXd r = tighten(phi, 1.0).entries();
      const double residual = (r * r.transpose() - Eigen::MatrixXd::Identity(n, n)).norm() /
                              std::sqrt(static_cast<double>(n));
      worst = std::max(worst, residual);
    }
  }
  return {worst <= kTolerance,
          format("%d matrices, worst ||RR^T - I||_F/sqrt(n) = %.3g (tol %.0e)", count, worst, kTolerance)};
}

// 2. Tightening never lowers the separation ratio; equality on tight input.
Outcome theorem2_property() {
  constexpr double kSlack = 1e-10;
  const std::array<int, 3> sparsities{1, 5, 10};
  constexpr Eigen::Index N = 100;
  double worst_gap = std::numeric_limits<double>::infinity();
  double worst_equality = 0.0;
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t seed = derive_seed(2002, {std::uint64_t(i)});
    Rng rng(seed);
    const auto n = static_cast<Eigen::Index>(2 + rng.below(N - 2));
    const int k = sparsities[static_cast<std::size_t>(i % 3)];
    const MeasurementMatrix phi = generate_gaussian(n, N, derive_seed(seed, {1}));
    const HypothesisSet pair = generate_hypotheses(N, k, 2, 1.0, derive_seed(seed, {2}));

    const RatioGap gap = theorem2_gap(phi, pair[0], pair[1]);
    worst_gap = std::min(worst_gap, gap.relative_gap());
    violations += gap.ratio_before > gap.ratio_after * (1.0 + kSlack);

    const RatioGap tight = theorem2_gap(tighten(phi, 1.0), pair[0], pair[1]);
    const double equality = std::abs(tight.ratio_before - tight.ratio_after) / tight.ratio_after;
    worst_equality = std::max(worst_equality, equality);
  }
  return {violations == 0 && worst_equality <= kSlack,
          format("1000 instances, %d violations, worst relative gap %.3g, "
                 "worst pre-tightened mismatch %.3g (tol %.0e)",
                 violations, worst_gap, worst_equality, kSlack)};
}

// 3. Frame constant of equi-norm tight frames.
Outcome corollary3() {
  constexpr double kTolerance = 1e-10;
  int certified = 0;
  double worst = 0.0;
  double worst_unit = 0.0;
  for (Eigen::Index N : {3, 10, 64, 100, 500}) {
    for (Eigen::Index n = 1; n < N; n += std::max<Eigen::Index>(1, N / 9)) {
      const MeasurementMatrix unit = harmonic_frame(n, N);
      for (double scale : {1.0, 0.2, 5.0}) {
        const MeasurementMatrix phi(scale * unit.entries());
        const FrameCertificate cert = certify(phi);
        if (!(cert.is_tight && cert.is_equinorm)) return {false, format("harmonic frame %ldx%ld did not certify", long(n), long(N))};
        ++certified;
        const double c = *cert.frame_constant_c;
        const double psi = *cert.column_norm_psi;
        worst = std::max(worst, std::abs(c - double(N) / double(n) * psi * psi) / c);
        if (scale == 1.0) {
          // psi = sqrt(n/N) by construction.
          worst_unit = std::max(worst_unit, std::abs(c - 1.0));
        }
      }
    }
  }
  // Tightening an equi-norm tight frame with the energy-preserving constant
  // must land on c = (N/n) psi^2 as well.
  const MeasurementMatrix rotated(harmonic_frame(30, 90).entries() * 1.7);
  const FrameCertificate again = certify(tighten_energy_preserving(rotated));
  if (again.is_tight && again.is_equinorm) {
    ++certified;
    worst = std::max(worst, std::abs(*again.frame_constant_c - 3.0 * *again.column_norm_psi *
                                                                     *again.column_norm_psi) /
                                *again.frame_constant_c);
  }
  return {worst <= kTolerance && worst_unit <= kTolerance,
          format("%d tight+equi-norm matrices, worst |c - (N/n)psi^2|/c = %.3g, "
                 "worst |c - 1| at psi = sqrt(n/N): %.3g (tol %.0e)",
                 certified, worst, worst_unit, kTolerance)};
}

// 4. Correlation statistics of the tightened matrix are c times the matched
// filter statistics of the original one.
Outcome matched_filter_equivalence() {
  constexpr double kTolerance = 1e-9;
  constexpr Eigen::Index N = 100;
  double worst = 0.0;
  int disagreements = 0;
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t seed = derive_seed(4004, {std::uint64_t(i)});
    Rng rng(seed);
    const auto n = static_cast<Eigen::Index>(10 + rng.below(80));
    const int k = 1 + static_cast<int>(rng.below(10));
    const int m = 2 + static_cast<int>(rng.below(9));
    const double c = 0.1 + 5.0 * rng.uniform();
    const double sigma = snr_to_sigma(5.0 + 15.0 * rng.uniform(), 1.0);

    const MeasurementMatrix phi = generate_gaussian(n, N, derive_seed(seed, {1}));
    const MeasurementMatrix tightened = tighten(phi, c);
    const HypothesisSet h = generate_hypotheses(N, k, m, 1.0, derive_seed(seed, {2}));

    // One noise realization x = s_T + w feeds both measurement paths.
    Eigen::VectorXd x(N);
    standard_normal_vector(derive_seed(seed, {3}), x);
    x = h[static_cast<std::size_t>(i % m)].values() + sigma * x;

    const auto corr = correlation_statistics(tightened.entries() * x, tightened, h);
    const auto mf = matched_filter_statistics(phi.entries() * x, phi, h);
    const Eigen::VectorXd scaled = c * mf.values;
    const double rel = (corr.values - scaled).cwiseAbs().maxCoeff() / scaled.cwiseAbs().maxCoeff();
    worst = std::max(worst, rel);
    disagreements += corr.decided_index != mf.decided_index;
  }
  return {worst <= kTolerance && disagreements == 0,
          format("500 instances, worst relative mismatch %.3g (tol %.0e), %d decision disagreements",
                 worst, kTolerance, disagreements)};
}

// 5. Empirical 2-ary error against the closed form.
Outcome theorem1_reproduction() {
  int seeds_passing = 0;
  int points_inside = 0;
  int center_inside = 0;
  constexpr int kSeeds = 20;
  std::string misses;
  for (int s = 0; s < kSeeds; ++s) {
    ExperimentConfig config;
    config.N = 100;
    config.k = 1;
    config.m = 2;
    config.n_values = {40};
    config.snr_db_values = {5.0, 10.0, 15.0};
    config.trials = 20000;
    config.seed = derive_seed(5005, {std::uint64_t(s)});
    config.frame_modes = {FrameMode::Tightened};
    config.threads = 0;
    const SweepResult result = run_sweep(config);
    int inside = 0;
    for (const SweepRow& row : result.rows) {
      const bool ok = row.estimate.contains(row.theoretical->probability);
      inside += ok;
      if (row.snr_db == 10.0) center_inside += ok;
      if (!ok) {
        misses += format(" [seed %d, %g dB: %.5f vs %.5f]", s, row.snr_db, row.estimate.rate,
                         row.theoretical->probability);
      }
    }
    points_inside += inside;
    seeds_passing += inside >= 2;
  }
  const bool pass = seeds_passing * 10 >= kSeeds * 9;
  return {pass, format("%d/%d seeds with >= 2 of 3 points inside the Wilson interval; "
                       "%d/%d points inside; 10 dB: %d/%d;",
                       seeds_passing, kSeeds, points_inside, 3 * kSeeds, center_inside, kSeeds) +
                    misses};
}

// Shared by criteria 6, 7 and 9.
struct Fig1to4Config {
  int k;
  int m;
};
constexpr std::array<Fig1to4Config, 4> kFigureConfigs{{{1, 2}, {5, 2}, {1, 10}, {5, 10}}};

ExperimentConfig figure_config(const Fig1to4Config& f, unsigned threads) {
  ExperimentConfig config;
  config.N = 100;
  config.k = f.k;
  config.m = f.m;
  config.n_values = {20, 40, 60, 80};
  config.snr_db_values = {5.0, 10.0, 15.0, 20.0};
  config.trials = 5000;
  config.seed = 6006;
  config.threads = threads;
  return config;
}

struct FigureRuns {
  std::vector<SweepResult> results;
  std::vector<std::string> csv;
};

FigureRuns run_figures(unsigned threads) {
  FigureRuns runs;
  for (const auto& f : kFigureConfigs) {
    runs.results.push_back(run_sweep(figure_config(f, threads)));
    std::ostringstream out;
    write_csv(out, runs.results.back());
    runs.csv.push_back(out.str());
  }
  return runs;
}

// 6. Tightened never worse (within the non-tight half-width); rates
// non-increasing in n and SNR within one CI width.
Outcome figure_replication(const FigureRuns& runs) {
  int points = 0;
  int ordered = 0;
  int monotone_violations = 0;
  std::string detail;
  for (std::size_t c = 0; c < runs.results.size(); ++c) {
    using Key = std::tuple<FrameMode, Eigen::Index, double>;
    std::map<Key, ErrorEstimate> grid;
    for (const SweepRow& row : runs.results[c].rows) grid[{row.frame_mode, row.n, row.snr_db}] = row.estimate;
    const auto config = figure_config(kFigureConfigs[c], 1);
    int curve_violations = 0;
    for (Eigen::Index n : config.n_values) {
      for (double snr : config.snr_db_values) {
        const ErrorEstimate& loose = grid.at({FrameMode::NonTight, n, snr});
        const ErrorEstimate& tight = grid.at({FrameMode::Tightened, n, snr});
        ++points;
        if (tight.rate <= loose.rate + loose.half_width()) {
          ++ordered;
        } else {
          detail += format(" [k=%d m=%d n=%ld %g dB: tight %.4f > non-tight %.4f]",
                           kFigureConfigs[c].k, kFigureConfigs[c].m, long(n), snr, tight.rate, loose.rate);
        }
      }
    }
    for (FrameMode mode : {FrameMode::NonTight, FrameMode::Tightened}) {
      // Curves over n at fixed SNR.
      for (double snr : config.snr_db_values) {
        for (std::size_t j = 1; j < config.n_values.size(); ++j) {
          const ErrorEstimate& prev = grid.at({mode, config.n_values[j - 1], snr});
          const ErrorEstimate& next = grid.at({mode, config.n_values[j], snr});
          curve_violations += next.rate > prev.rate + prev.ci_width();
        }
      }
      // Curves over SNR at fixed n.
      for (Eigen::Index n : config.n_values) {
        for (std::size_t j = 1; j < config.snr_db_values.size(); ++j) {
          const ErrorEstimate& prev = grid.at({mode, n, config.snr_db_values[j - 1]});
          const ErrorEstimate& next = grid.at({mode, n, config.snr_db_values[j]});
          curve_violations += next.rate > prev.rate + prev.ci_width();
        }
      }
    }
    if (curve_violations > 0) {
      detail += format(" [k=%d m=%d: %d monotonicity violations]", kFigureConfigs[c].k,
                       kFigureConfigs[c].m, curve_violations);
    }
    monotone_violations += curve_violations;
  }
  return {ordered == points && monotone_violations == 0,
          format("tightened <= non-tight + half-width at %d/%d points; %d monotonicity violations",
                 ordered, points, monotone_violations) +
              detail};
}

// 7. m-ary empirical rates below the union bound.
Outcome union_bound(const FigureRuns& runs) {
  int checked = 0;
  int below = 0;
  int significant = 0;
  std::string detail;
  for (std::size_t c = 0; c < runs.results.size(); ++c) {
    if (kFigureConfigs[c].m <= 2) continue;
    for (const SweepRow& row : runs.results[c].rows) {
      if (!(row.theoretical->probability < 1.0)) continue;
      ++checked;
      if (row.estimate.rate <= row.theoretical->probability) {
        ++below;
      } else {
        // Diagnostic only: is the bound outside the Wilson interval as well?
        significant += row.theoretical->probability < row.estimate.ci_low;
        detail += format(" [k=%d n=%ld %g dB %s: %.5f > %.5f]", row.k, long(row.n), row.snr_db,
                         std::string(to_string(row.frame_mode)).c_str(), row.estimate.rate,
                         row.theoretical->probability);
      }
    }
  }
  return {checked > 0 && below == checked,
          format("empirical <= union bound at %d/%d m=10 points with bound < 1 "
                 "(%d exceedances with the bound below the Wilson interval)",
                 below, checked, significant) +
              detail};
}

// 8. Q-function against quadrature.
Outcome q_accuracy() {
  constexpr double kTolerance = 1e-12;
  double worst = 0.0;
  for (double x : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    worst = std::max(worst, testing::relative_error(q_function(x), testing::q_quadrature(x)));
  }
  return {worst <= kTolerance, format("worst relative error %.3g (tol %.0e)", worst, kTolerance)};
}

// 9. Single- and multi-threaded sweeps give byte-identical CSV.
Outcome determinism(const FigureRuns& single) {
  const FigureRuns multi = run_figures(4);
  std::size_t identical = 0;
  for (std::size_t c = 0; c < single.csv.size(); ++c) identical += single.csv[c] == multi.csv[c];
  return {identical == single.csv.size(),
          format("%zu/%zu sweeps byte-identical between 1 and 4 threads", identical, single.csv.size())};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& criterion) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome outcome = criterion();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !outcome.pass;
    std::printf("[%s] %d. %s (%.1f s): %s\n", outcome.pass ? "PASS" : "FAIL", id, name, seconds,
                outcome.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "tightening certificate", tightening_certificate);
  report(2, "tightening never lowers the separation ratio", theorem2_property);
  report(3, "equi-norm tight frame constant", corollary3);
  report(4, "tightened correlation equals scaled matched filter", matched_filter_equivalence);
  report(5, "2-ary closed form reproduced by simulation", theorem1_reproduction);

  FigureRuns single;
  report(6, "desk-scale sweep ordering and monotonicity", [&] {
    single = run_figures(1);
    return figure_replication(single);
  });
  report(7, "m-ary union bound", [&] { return union_bound(single); });
  report(8, "Q-function accuracy", q_accuracy);
  report(9, "thread-count determinism", [&] { return determinism(single); });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
