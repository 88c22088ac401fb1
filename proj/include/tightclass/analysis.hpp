#pragma once

#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

#include "tightclass/frames.hpp"
#include "tightclass/signals.hpp"

namespace tightclass {

enum class BoundKind { Exact2ary, UnionBoundMary };

std::string_view to_string(BoundKind kind) noexcept;

struct TheoreticalError {
  /// In [0, 1]. For UnionBoundMary this is raw_sum clamped to 1.
  double probability = 0.0;
  /// Q-function argument. For UnionBoundMary, the smallest pairwise argument
  /// (the dominant term of the sum).
  double argument = 0.0;
  /// Unclamped value; may exceed 1 for the union bound at low SNR.
  double raw_sum = 0.0;
  BoundKind kind = BoundKind::Exact2ary;
};

/// Gaussian upper tail, Q(x) = P(Z > x) for Z ~ N(0, 1).
double q_function(double x);

/// ||Phi d||^2 / ||Phi^T Phi d|| with d = s1 - s2. Throws
/// DegenerateDifference when Phi d = 0.
double separation_ratio(const MeasurementMatrix& phi,
                        const Eigen::Ref<const Eigen::VectorXd>& s1,
                        const Eigen::Ref<const Eigen::VectorXd>& s2);
double separation_ratio(const MeasurementMatrix& phi, const SparseSignal& s1,
                        const SparseSignal& s2);

/// The same ratio in singular-value form, sum(sigma^2 u^2) / sqrt(sum(sigma^4 u^2))
/// with u = V^T d restricted to its first n coordinates.
double separation_ratio_spectral(const SvdFactors& factors,
                                 const Eigen::Ref<const Eigen::VectorXd>& difference);

/// Q(ratio / (2 sigma)): exact error probability of the correlation
/// classifier for two equiprobable hypotheses.
TheoreticalError error_probability_2ary(const MeasurementMatrix& phi,
                                        const SparseSignal& s1, const SparseSignal& s2,
                                        double sigma);

struct RatioGap {
  double ratio_before = 0.0;
  double ratio_after = 0.0;

  /// ratio_after - ratio_before, relative to ratio_after.
  double relative_gap() const noexcept { return (ratio_after - ratio_before) / ratio_after; }
};

/// Separation ratio of phi and of tighten(phi, 1) for the same pair.
RatioGap theorem2_gap(const MeasurementMatrix& phi, const SparseSignal& s1,
                      const SparseSignal& s2);

/// Sum over i != true_index of the pairwise Q terms. true_index is zero-based.
TheoreticalError union_bound_mary(const MeasurementMatrix& phi,
                                  const HypothesisSet& hypotheses, double sigma,
                                  std::size_t true_index);

}  // namespace tightclass
