#include "tightclass/frames.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include "tightclass/error.hpp"
#include "tightclass/rng.hpp"

namespace tightclass {
namespace {

struct LeftFactors {
  Eigen::MatrixXd u;
  Eigen::VectorXd singular_values;
};

LeftFactors left_factors(const Eigen::MatrixXd& entries) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(entries, Eigen::ComputeThinU);
  return LeftFactors{svd.matrixU(), svd.singularValues()};
}

void check_rank(const Eigen::VectorXd& singular_values) {
  const double largest = singular_values(0);
  const double smallest = singular_values(singular_values.size() - 1);
  if (!(largest > 0.0) || smallest / largest < tol::kRank) {
    throw Error(ErrorKind::RankDeficient,
                "matrix is not full row rank (sigma_min/sigma_max = " +
                    std::to_string(largest > 0.0 ? smallest / largest : 0.0) +
                    " < " + std::to_string(tol::kRank) + ")");
  }
}

void check_constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorKind::InvalidConstant,
                "frame constant must be positive and finite, got " + std::to_string(c));
  }
}

}  // namespace

struct MeasurementMatrix::Cache {
  std::once_flag once;
  SvdFactors factors;
};

MeasurementMatrix::MeasurementMatrix(Eigen::MatrixXd entries)
    : entries_(std::move(entries)), cache_(std::make_shared<Cache>()) {
  if (entries_.rows() <= 0 || entries_.rows() >= entries_.cols()) {
    throw Error(ErrorKind::BadDimensions,
                "measurement matrix must satisfy 0 < n < N, got " +
                    std::to_string(entries_.rows()) + "x" + std::to_string(entries_.cols()));
  }
  if (!entries_.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "measurement matrix has non-finite entries");
  }
}

const SvdFactors& MeasurementMatrix::svd() const {
  // The rank check stays outside call_once so a rank-deficient matrix
  // reports the same error on every call.
  std::call_once(cache_->once, [this] {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(entries_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    cache_->factors = SvdFactors{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  });
  check_rank(cache_->factors.singular_values);
  return cache_->factors;
}

Eigen::MatrixXd MeasurementMatrix::row_space_projector() const {
  require_full_row_rank(*this);
  const Eigen::LLT<Eigen::MatrixXd> gram(entries_ * entries_.transpose());
  return entries_.transpose() * gram.solve(entries_);
}

SvdFactors decompose(const MeasurementMatrix& phi) { return phi.svd(); }

void require_full_row_rank(const MeasurementMatrix& phi) {
  check_rank(Eigen::JacobiSVD<Eigen::MatrixXd>(phi.entries()).singularValues());
}

MeasurementMatrix tighten(const MeasurementMatrix& phi, double c) {
  check_constant(c);
  // Only U and the singular values are needed; V is never formed.
  const LeftFactors left = left_factors(phi.entries());
  check_rank(left.singular_values);
  const Eigen::VectorXd inverse = left.singular_values.cwiseInverse();
  const Eigen::MatrixXd whitener = left.u * inverse.asDiagonal() * left.u.transpose();
  return MeasurementMatrix(std::sqrt(c) * whitener * phi.entries());
}

MeasurementMatrix tighten_energy_preserving(const MeasurementMatrix& phi) {
  const auto n = static_cast<double>(phi.rows());
  const auto N = static_cast<double>(phi.cols());
  const double psi = phi.entries().colwise().norm().mean();
  return tighten(phi, N / n * psi * psi);
}

MeasurementMatrix tighten_from_factors(const SvdFactors& factors, double c) {
  check_constant(c);
  check_rank(factors.singular_values);
  const Eigen::Index n = factors.u.rows();
  return MeasurementMatrix(std::sqrt(c) * factors.u * factors.v.leftCols(n).transpose());
}

FrameCertificate certify(const MeasurementMatrix& phi) {
  const Eigen::MatrixXd& entries = phi.entries();
  const auto n = static_cast<double>(phi.rows());
  FrameCertificate cert;

  const Eigen::MatrixXd gram = entries * entries.transpose();
  const double c = gram.trace() / n;
  if (c > 0.0) {
    cert.frame_constant_c = c;
    const Eigen::MatrixXd deviation =
        gram - c * Eigen::MatrixXd::Identity(phi.rows(), phi.rows());
    cert.tightness_residual = deviation.norm() / (c * std::sqrt(n));
    cert.is_tight = cert.tightness_residual <= tol::kTight;
  } else {
    cert.tightness_residual = std::numeric_limits<double>::infinity();
  }

  const Eigen::RowVectorXd norms = entries.colwise().norm();
  const double largest = norms.maxCoeff();
  const double smallest = norms.minCoeff();
  if (largest > 0.0 && largest - smallest <= tol::kNorm * largest) {
    cert.is_equinorm = true;
    cert.column_norm_psi = norms.mean();
  }
  return cert;
}

MeasurementMatrix normalize_columns(const MeasurementMatrix& phi, double psi) {
  check_constant(psi);
  Eigen::MatrixXd out = phi.entries();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm == 0.0) {
      throw Error(ErrorKind::ZeroColumn, "column " + std::to_string(j) + " is zero");
    }
    out.col(j) *= psi / norm;
  }
  return MeasurementMatrix(std::move(out));
}

MeasurementMatrix generate_gaussian(Eigen::Index n, Eigen::Index N, std::uint64_t seed) {
  if (n <= 0 || n >= N) {
    throw Error(ErrorKind::BadDimensions, "need 0 < n < N, got n=" + std::to_string(n) +
                                              " N=" + std::to_string(N));
  }
  Rng rng(seed);
  Eigen::MatrixXd entries(n, N);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) entries(i, j) = rng.normal();
  }
  return MeasurementMatrix(std::move(entries));
}

MeasurementMatrix harmonic_frame(Eigen::Index n, Eigen::Index N) {
  if (n <= 0 || n >= N) {
    throw Error(ErrorKind::BadDimensions, "need 0 < n < N, got n=" + std::to_string(n) +
                                              " N=" + std::to_string(N));
  }
  Eigen::MatrixXd entries(n, N);
  const double scale = std::sqrt(2.0 / static_cast<double>(N));
  Eigen::Index row = 0;
  // Odd n: a constant row carries the zero frequency.
  if (n % 2 == 1) {
    entries.row(row++).setConstant(1.0 / std::sqrt(static_cast<double>(N)));
  }
  for (Eigen::Index freq = 1; row < n; ++freq) {
    for (Eigen::Index j = 0; j < N; ++j) {
      // Reduce k*j mod N first so the angle stays in [0, 2 pi).
      const double angle = 2.0 * std::numbers::pi *
                           static_cast<double>((freq * j) % N) / static_cast<double>(N);
      entries(row, j) = scale * std::cos(angle);
      entries(row + 1, j) = scale * std::sin(angle);
    }
    row += 2;
  }
  return MeasurementMatrix(std::move(entries));
}

}  // namespace tightclass
