#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "tightclass/frames.hpp"

namespace tightclass {

/// A length-N vector with at most k nonzero entries, all inside `support`.
class SparseSignal {
 public:
  SparseSignal(Eigen::VectorXd values, int sparsity_k);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  int sparsity() const noexcept { return sparsity_k_; }
  /// Sorted indices of the nonzero entries.
  const std::vector<Eigen::Index>& support() const noexcept { return support_; }
  Eigen::Index size() const noexcept { return values_.size(); }

 private:
  Eigen::VectorXd values_;
  int sparsity_k_;
  std::vector<Eigen::Index> support_;
};

/// m >= 2 pairwise-orthogonal signals sharing a common norm.
class HypothesisSet {
 public:
  /// Validates orthogonality and equal norms to 1e-12 relative; throws
  /// InvalidArgument otherwise. common_norm is taken from the first signal.
  explicit HypothesisSet(std::vector<SparseSignal> signals);

  const std::vector<SparseSignal>& signals() const noexcept { return signals_; }
  const SparseSignal& operator[](std::size_t i) const { return signals_[i]; }
  std::size_t size() const noexcept { return signals_.size(); }
  Eigen::Index dimension() const noexcept { return signals_.front().size(); }
  double common_norm() const noexcept { return common_norm_; }

  /// Signals as the columns of an N x m matrix.
  Eigen::MatrixXd as_columns() const;

 private:
  std::vector<SparseSignal> signals_;
  double common_norm_;
};

struct NoiseModel {
  NoiseModel(double sigma, Eigen::Index dimension);

  double sigma;
  Eigen::Index dimension;
};

/// Disjoint random supports of size k with Gaussian nonzeros rescaled to
/// `norm`. Throws Infeasible when m * k > N.
HypothesisSet generate_hypotheses(Eigen::Index N, int k, int m, double norm,
                                  std::uint64_t seed);

/// Phi (s + w) with w ~ N(0, sigma^2 I_N) drawn from `seed`.
Eigen::VectorXd sample_noisy_measurement(const MeasurementMatrix& phi,
                                         const SparseSignal& s,
                                         const NoiseModel& noise,
                                         std::uint64_t seed);

/// Fills `out` with N(0, 1) draws from `seed`. Shared by every sampler that
/// needs the signal-space noise stream.
void standard_normal_vector(std::uint64_t seed, Eigen::Ref<Eigen::VectorXd> out);

/// sigma such that ||s||^2 / sigma^2 = 10^(snr_db / 10).
double snr_to_sigma(double snr_db, double signal_norm);

double sigma_to_snr_db(double sigma, double signal_norm);

}  // namespace tightclass
