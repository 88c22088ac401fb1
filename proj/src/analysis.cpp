#include "tightclass/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tightclass/error.hpp"

namespace tightclass {
namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::InvalidArgument, "noise sigma must be positive and finite");
  }
}

[[noreturn]] void degenerate() {
  throw Error(ErrorKind::DegenerateDifference,
              "Phi (s1 - s2) = 0; the separation ratio is 0/0");
}

}  // namespace

std::string_view to_string(BoundKind kind) noexcept {
  return kind == BoundKind::Exact2ary ? "exact_2ary" : "union_bound_mary";
}

double q_function(double x) {
  // Q(x) = erfc(x / sqrt(2)) / 2; erfc keeps full relative accuracy in the
  // upper tail where 1 - Phi(x) would cancel.
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double separation_ratio(const MeasurementMatrix& phi, const Eigen::Ref<const Eigen::VectorXd>& s1,
                        const Eigen::Ref<const Eigen::VectorXd>& s2) {
  if (s1.size() != phi.cols() || s2.size() != phi.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "signals must have length " + std::to_string(phi.cols()));
  }
  const Eigen::VectorXd difference = s1 - s2;
  const Eigen::VectorXd measured = phi.entries() * difference;
  const double numerator = measured.squaredNorm();
  if (numerator == 0.0) degenerate();
  const double denominator = (phi.entries().transpose() * measured).norm();
  return numerator / denominator;
}

double separation_ratio(const MeasurementMatrix& phi, const SparseSignal& s1,
                        const SparseSignal& s2) {
  return separation_ratio(phi, s1.values(), s2.values());
}

double separation_ratio_spectral(const SvdFactors& factors,
                                 const Eigen::Ref<const Eigen::VectorXd>& difference) {
  const Eigen::Index n = factors.singular_values.size();
  if (difference.size() != factors.v.rows()) {
    throw Error(ErrorKind::DimensionMismatch,
                "difference must have length " + std::to_string(factors.v.rows()));
  }
  const Eigen::VectorXd u = factors.v.leftCols(n).transpose() * difference;
  const Eigen::ArrayXd s2 = factors.singular_values.array().square();
  const Eigen::ArrayXd u2 = u.array().square();
  const double numerator = (s2 * u2).sum();
  if (numerator == 0.0) degenerate();
  return numerator / std::sqrt((s2 * s2 * u2).sum());
}

TheoreticalError error_probability_2ary(const MeasurementMatrix& phi, const SparseSignal& s1,
                                        const SparseSignal& s2, double sigma) {
  check_sigma(sigma);
  TheoreticalError out;
  out.kind = BoundKind::Exact2ary;
  out.argument = separation_ratio(phi, s1, s2) / (2.0 * sigma);
  out.probability = q_function(out.argument);
  out.raw_sum = out.probability;
  return out;
}

RatioGap theorem2_gap(const MeasurementMatrix& phi, const SparseSignal& s1,
                      const SparseSignal& s2) {
  const MeasurementMatrix tightened = tighten(phi, 1.0);
  return RatioGap{separation_ratio(phi, s1, s2), separation_ratio(tightened, s1, s2)};
}

TheoreticalError union_bound_mary(const MeasurementMatrix& phi, const HypothesisSet& hypotheses,
                                  double sigma, std::size_t true_index) {
  check_sigma(sigma);
  if (true_index >= hypotheses.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "true index " + std::to_string(true_index) + " out of range for " +
                    std::to_string(hypotheses.size()) + " hypotheses");
  }
  TheoreticalError out;
  out.kind = BoundKind::UnionBoundMary;
  out.argument = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    if (i == true_index) continue;
    const double argument =
        separation_ratio(phi, hypotheses[true_index], hypotheses[i]) / (2.0 * sigma);
    out.raw_sum += q_function(argument);
    out.argument = std::min(out.argument, argument);
  }
  out.probability = std::min(out.raw_sum, 1.0);
  return out;
}

}  // namespace tightclass
