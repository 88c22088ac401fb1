#include "tightclass/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tightclass/error.hpp"
#include "tightclass/rng.hpp"

namespace tightclass {

SparseSignal::SparseSignal(Eigen::VectorXd values, int sparsity_k)
    : values_(std::move(values)), sparsity_k_(sparsity_k) {
  if (sparsity_k_ < 1) throw Error(ErrorKind::InvalidArgument, "sparsity must be >= 1");
  if (!values_.allFinite()) throw Error(ErrorKind::InvalidArgument, "signal has non-finite values");
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (values_(i) != 0.0) support_.push_back(i);
  }
  if (static_cast<Eigen::Index>(support_.size()) > sparsity_k_) {
    throw Error(ErrorKind::InvalidArgument,
                "signal has " + std::to_string(support_.size()) +
                    " nonzeros, more than its sparsity " + std::to_string(sparsity_k_));
  }
}

HypothesisSet::HypothesisSet(std::vector<SparseSignal> signals) : signals_(std::move(signals)) {
  if (signals_.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 hypotheses");
  const Eigen::Index N = signals_.front().size();
  for (const auto& s : signals_) {
    if (s.size() != N) throw Error(ErrorKind::DimensionMismatch, "hypotheses differ in length");
  }
  common_norm_ = signals_.front().values().norm();
  if (!(common_norm_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "hypotheses must be nonzero");

  constexpr double kTol = 1e-12;
  for (std::size_t i = 0; i < signals_.size(); ++i) {
    const Eigen::VectorXd& si = signals_[i].values();
    if (std::abs(si.norm() - common_norm_) > kTol * common_norm_) {
      throw Error(ErrorKind::InvalidArgument,
                  "hypothesis " + std::to_string(i) + " does not share the common norm");
    }
    for (std::size_t j = i + 1; j < signals_.size(); ++j) {
      if (std::abs(si.dot(signals_[j].values())) > kTol * common_norm_ * common_norm_) {
        throw Error(ErrorKind::InvalidArgument, "hypotheses " + std::to_string(i) + " and " +
                                                    std::to_string(j) + " are not orthogonal");
      }
    }
  }
}

Eigen::MatrixXd HypothesisSet::as_columns() const {
  Eigen::MatrixXd out(dimension(), static_cast<Eigen::Index>(signals_.size()));
  for (std::size_t i = 0; i < signals_.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = signals_[i].values();
  }
  return out;
}

NoiseModel::NoiseModel(double sigma_, Eigen::Index dimension_)
    : sigma(sigma_), dimension(dimension_) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::InvalidArgument, "noise sigma must be positive and finite");
  }
  if (dimension <= 0) throw Error(ErrorKind::InvalidArgument, "noise dimension must be positive");
}

HypothesisSet generate_hypotheses(Eigen::Index N, int k, int m, double norm, std::uint64_t seed) {
  if (k < 1 || m < 2) throw Error(ErrorKind::InvalidArgument, "need k >= 1 and m >= 2");
  if (!(norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "norm must be positive");
  if (static_cast<Eigen::Index>(m) * k > N) {
    throw Error(ErrorKind::Infeasible, "m*k = " + std::to_string(m * k) +
                                           " exceeds N = " + std::to_string(N) +
                                           "; disjoint supports are impossible");
  }
  Rng rng(seed);

  // Partial Fisher-Yates: the first m*k slots become the m disjoint supports.
  std::vector<Eigen::Index> indices(static_cast<std::size_t>(N));
  std::iota(indices.begin(), indices.end(), Eigen::Index{0});
  const std::size_t used = static_cast<std::size_t>(m) * static_cast<std::size_t>(k);
  for (std::size_t i = 0; i < used; ++i) {
    const auto j = i + rng.below(indices.size() - i);
    std::swap(indices[i], indices[j]);
  }

  std::vector<SparseSignal> signals;
  signals.reserve(static_cast<std::size_t>(m));
  for (int h = 0; h < m; ++h) {
    Eigen::VectorXd values = Eigen::VectorXd::Zero(N);
    double energy = 0.0;
    while (energy == 0.0) {
      for (int t = 0; t < k; ++t) {
        values(indices[static_cast<std::size_t>(h * k + t)]) = rng.normal();
      }
      energy = values.squaredNorm();
    }
    values *= norm / std::sqrt(energy);
    signals.emplace_back(std::move(values), k);
  }
  return HypothesisSet(std::move(signals));
}

void standard_normal_vector(std::uint64_t seed, Eigen::Ref<Eigen::VectorXd> out) {
  Rng rng(seed);
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = rng.normal();
}

Eigen::VectorXd sample_noisy_measurement(const MeasurementMatrix& phi, const SparseSignal& s,
                                         const NoiseModel& noise, std::uint64_t seed) {
  if (s.size() != phi.cols() || noise.dimension != phi.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "matrix has " + std::to_string(phi.cols()) + " columns, signal length " +
                    std::to_string(s.size()) + ", noise dimension " +
                    std::to_string(noise.dimension));
  }
  Eigen::VectorXd x(s.size());
  standard_normal_vector(seed, x);
  x = s.values() + noise.sigma * x;
  return phi.entries() * x;
}

double snr_to_sigma(double snr_db, double signal_norm) {
  if (!(signal_norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "signal norm must be positive");
  return signal_norm / std::pow(10.0, snr_db / 20.0);
}

double sigma_to_snr_db(double sigma, double signal_norm) {
  return 10.0 * std::log10(signal_norm * signal_norm / (sigma * sigma));
}

}  // namespace tightclass
