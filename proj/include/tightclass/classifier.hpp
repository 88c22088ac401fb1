#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "tightclass/frames.hpp"
#include "tightclass/signals.hpp"

namespace tightclass {

enum class ClassifierKind { Correlation, MatchedFilter };

std::string_view to_string(ClassifierKind kind) noexcept;
ClassifierKind parse_classifier_kind(std::string_view text);

struct ClassifierStatistics {
  Eigen::VectorXd values;
  /// Zero-based index of the first maximum of `values`.
  Eigen::Index decided_index = 0;
  ClassifierKind kind = ClassifierKind::Correlation;
};

/// Argmax with ties resolved to the lowest index.
Eigen::Index first_argmax(const Eigen::Ref<const Eigen::VectorXd>& values);

/// Precomputed statistics for one (Phi, H) pair. Every statistic has the form
///   t_i = <y, g_i> - offset_i,
/// so evaluating a measurement costs one m x n product.
///
///   Correlation:    g_i = Phi s_i,                     offset_i = ||Phi s_i||^2 / 2
///   MatchedFilter:  g_i = (Phi Phi^T)^{-1} Phi s_i,    offset_i = ||P s_i||^2 / 2
///
/// where P is the projector onto the row space of Phi. The matched filter
/// solves with a Cholesky factorization of Phi Phi^T.
class Classifier {
 public:
  Classifier(const MeasurementMatrix& phi, const HypothesisSet& hypotheses,
             ClassifierKind kind);

  ClassifierStatistics statistics(const Eigen::Ref<const Eigen::VectorXd>& y) const;
  Eigen::Index classify(const Eigen::Ref<const Eigen::VectorXd>& y) const;

  ClassifierKind kind() const noexcept { return kind_; }
  Eigen::Index measurement_size() const noexcept { return templates_.rows(); }
  Eigen::Index hypothesis_count() const noexcept { return templates_.cols(); }

 private:
  ClassifierKind kind_;
  Eigen::MatrixXd templates_;  // n x m, columns g_i
  Eigen::VectorXd offsets_;
};

ClassifierStatistics correlation_statistics(const Eigen::Ref<const Eigen::VectorXd>& y,
                                            const MeasurementMatrix& phi,
                                            const HypothesisSet& hypotheses);

ClassifierStatistics matched_filter_statistics(const Eigen::Ref<const Eigen::VectorXd>& y,
                                               const MeasurementMatrix& phi,
                                               const HypothesisSet& hypotheses);

Eigen::Index classify(const Eigen::Ref<const Eigen::VectorXd>& y,
                      const MeasurementMatrix& phi, const HypothesisSet& hypotheses,
                      ClassifierKind kind);

}  // namespace tightclass
