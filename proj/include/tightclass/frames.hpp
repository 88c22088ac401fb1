#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include <Eigen/Dense>

namespace tightclass {

namespace tol {
/// Smallest admissible sigma_min / sigma_max.
inline constexpr double kRank = 1e-10;
inline constexpr double kTight = 1e-8;
inline constexpr double kNorm = 1e-8;
inline constexpr double kProjection = 1e-8;
}  // namespace tol

struct SvdFactors {
  Eigen::MatrixXd u;                // n x n, left singular vectors
  Eigen::VectorXd singular_values;  // length n, descending, positive
  Eigen::MatrixXd v;                // N x N, right singular vectors
};

/// An under-determined real matrix (rows < cols). Construction enforces the
/// shape and finiteness; full row rank is checked by the operations that
/// depend on it and reported as ErrorKind::RankDeficient.
///
/// Instances are immutable. The SVD is computed on first use and shared
/// between copies; concurrent readers are safe.
class MeasurementMatrix {
 public:
  explicit MeasurementMatrix(Eigen::MatrixXd entries);

  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  Eigen::Index rows() const noexcept { return entries_.rows(); }
  Eigen::Index cols() const noexcept { return entries_.cols(); }

  /// Full SVD with U and V square; throws RankDeficient if
  /// sigma_n / sigma_1 < tol::kRank.
  const SvdFactors& svd() const;

  /// Orthogonal projector onto the row space, Phi^T (Phi Phi^T)^{-1} Phi.
  Eigen::MatrixXd row_space_projector() const;

 private:
  struct Cache;

  Eigen::MatrixXd entries_;
  std::shared_ptr<Cache> cache_;
};

struct FrameCertificate {
  bool is_tight = false;
  /// trace(Phi Phi^T) / n; absent only for the zero matrix.
  std::optional<double> frame_constant_c;
  bool is_equinorm = false;
  /// Mean column norm, present when the columns are equi-norm.
  std::optional<double> column_norm_psi;
  /// ||Phi Phi^T - c I||_F / (c sqrt(n)).
  double tightness_residual = 0.0;
};

SvdFactors decompose(const MeasurementMatrix& phi);

/// Throws RankDeficient unless sigma_n / sigma_1 >= tol::kRank. Computes
/// singular values only.
void require_full_row_rank(const MeasurementMatrix& phi);

/// Replaces every singular value of phi by sqrt(c):
/// sqrt(c) U Sigma^{-1} U^T Phi, so that the result R has R R^T = c I and the
/// same row space as phi.
MeasurementMatrix tighten(const MeasurementMatrix& phi, double c = 1.0);

/// tighten() with c = (N/n) psi^2, which keeps the total column energy of an
/// equi-norm input with column norm psi.
MeasurementMatrix tighten_energy_preserving(const MeasurementMatrix& phi);

/// The same map assembled as sqrt(c) U [I O] V^T from the full factors.
MeasurementMatrix tighten_from_factors(const SvdFactors& factors, double c = 1.0);

FrameCertificate certify(const MeasurementMatrix& phi);

MeasurementMatrix normalize_columns(const MeasurementMatrix& phi, double psi);

/// i.i.d. N(0, 1) entries, deterministic in seed.
MeasurementMatrix generate_gaussian(Eigen::Index n, Eigen::Index N, std::uint64_t seed);

/// Real harmonic frame: n/2 cosine/sine row pairs of the length-N DFT at
/// frequencies 1..n/2, scaled so that Phi Phi^T = I and every column has norm
/// sqrt(n/N). Requires even n and n < N.
MeasurementMatrix harmonic_frame(Eigen::Index n, Eigen::Index N);

}  // namespace tightclass
