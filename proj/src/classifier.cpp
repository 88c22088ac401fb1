#include "tightclass/classifier.hpp"

#include <string>

#include "tightclass/error.hpp"

namespace tightclass {

std::string_view to_string(ClassifierKind kind) noexcept {
  return kind == ClassifierKind::Correlation ? "correlation" : "matched_filter";
}

ClassifierKind parse_classifier_kind(std::string_view text) {
  if (text == "correlation") return ClassifierKind::Correlation;
  if (text == "matched_filter") return ClassifierKind::MatchedFilter;
  throw Error(ErrorKind::InvalidArgument,
              "unknown classifier \"" + std::string(text) + "\" (correlation|matched_filter)");
}

Eigen::Index first_argmax(const Eigen::Ref<const Eigen::VectorXd>& values) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = i;
  }
  return best;
}

Classifier::Classifier(const MeasurementMatrix& phi, const HypothesisSet& hypotheses,
                       ClassifierKind kind)
    : kind_(kind) {
  if (hypotheses.dimension() != phi.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "hypotheses have length " + std::to_string(hypotheses.dimension()) +
                    " but the matrix has " + std::to_string(phi.cols()) + " columns");
  }
  const Eigen::MatrixXd measured = phi.entries() * hypotheses.as_columns();  // Phi s_i
  if (kind == ClassifierKind::Correlation) {
    templates_ = measured;
    offsets_ = 0.5 * measured.colwise().squaredNorm().transpose();
    return;
  }
  require_full_row_rank(phi);
  const Eigen::LLT<Eigen::MatrixXd> gram(phi.entries() * phi.entries().transpose());
  templates_ = gram.solve(measured);
  // ||P s_i||^2 = (Phi s_i)^T (Phi Phi^T)^{-1} (Phi s_i)
  offsets_ = 0.5 * measured.cwiseProduct(templates_).colwise().sum().transpose();
}

ClassifierStatistics Classifier::statistics(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (y.size() != templates_.rows()) {
    throw Error(ErrorKind::DimensionMismatch,
                "measurement has length " + std::to_string(y.size()) + ", expected " +
                    std::to_string(templates_.rows()));
  }
  ClassifierStatistics out;
  out.kind = kind_;
  out.values = templates_.transpose() * y - offsets_;
  out.decided_index = first_argmax(out.values);
  return out;
}

Eigen::Index Classifier::classify(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  return statistics(y).decided_index;
}

ClassifierStatistics correlation_statistics(const Eigen::Ref<const Eigen::VectorXd>& y,
                                            const MeasurementMatrix& phi,
                                            const HypothesisSet& hypotheses) {
  return Classifier(phi, hypotheses, ClassifierKind::Correlation).statistics(y);
}

ClassifierStatistics matched_filter_statistics(const Eigen::Ref<const Eigen::VectorXd>& y,
                                               const MeasurementMatrix& phi,
                                               const HypothesisSet& hypotheses) {
  return Classifier(phi, hypotheses, ClassifierKind::MatchedFilter).statistics(y);
}

Eigen::Index classify(const Eigen::Ref<const Eigen::VectorXd>& y, const MeasurementMatrix& phi,
                      const HypothesisSet& hypotheses, ClassifierKind kind) {
  return Classifier(phi, hypotheses, kind).classify(y);
}

}  // namespace tightclass
