#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace browkit {

/// Threshold on sigma_min / sigma_max of the design matrix.
inline constexpr double kRankTolerance = 1e-10;

struct LeastSquaresResult {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;  // NaN when rows == columns
  double residual_sum_squares = 0.0;
  /// sigma_min / sigma_max of the design matrix.
  double inverse_condition = 0.0;
};

/// Householder QR factorization of a tall matrix, kept in compact form
/// (reflectors below the diagonal, R on and above it).
class HouseholderQr {
 public:
  explicit HouseholderQr(Eigen::MatrixXd a);

  Eigen::Index rows() const { return qr_.rows(); }
  Eigen::Index cols() const { return qr_.cols(); }

  /// Q^T b.
  Eigen::VectorXd apply_qt(Eigen::VectorXd b) const;
  /// Upper triangular p x p factor.
  Eigen::MatrixXd r() const;
  /// Solves R x = rhs by back substitution.
  Eigen::VectorXd solve_r(const Eigen::VectorXd& rhs) const;

 private:
  Eigen::MatrixXd qr_;
  Eigen::VectorXd tau_;
};

/// min ||y - X b||^2 via Householder QR. `column_names` label the columns in
/// rank-deficiency errors.
LeastSquaresResult solve_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       const std::vector<std::string>& column_names);

}  // namespace browkit
