#include "browkit/least_squares.hpp"

#include "browkit/error.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace browkit {

HouseholderQr::HouseholderQr(Eigen::MatrixXd a) : qr_(std::move(a)), tau_(qr_.cols()) {
  const Eigen::Index m = qr_.rows();
  const Eigen::Index p = qr_.cols();
  if (m < p) throw InvalidArgument("QR least squares needs at least as many rows as columns");

  for (Eigen::Index k = 0; k < p; ++k) {
    const Eigen::Index len = m - k;
    const double x0 = qr_(k, k);
    const double norm = qr_.col(k).tail(len).norm();
    if (norm == 0.0) {
      tau_(k) = 0.0;
      continue;
    }
    const double beta = x0 >= 0.0 ? -norm : norm;
    tau_(k) = (beta - x0) / beta;
    qr_.col(k).tail(len - 1) /= (x0 - beta);
    qr_(k, k) = beta;

    // Apply H_k = I - tau v v^T (v = [1; tail]) to the trailing columns.
    for (Eigen::Index j = k + 1; j < p; ++j) {
      const double w = qr_(k, j) + qr_.col(k).tail(len - 1).dot(qr_.col(j).tail(len - 1));
      qr_(k, j) -= tau_(k) * w;
      qr_.col(j).tail(len - 1) -= tau_(k) * w * qr_.col(k).tail(len - 1);
    }
  }
}

Eigen::VectorXd HouseholderQr::apply_qt(Eigen::VectorXd b) const {
  const Eigen::Index m = qr_.rows();
  if (b.size() != m) throw InvalidArgument("right-hand side length does not match the design rows");
  for (Eigen::Index k = 0; k < qr_.cols(); ++k) {
    const Eigen::Index len = m - k;
    const double w = b(k) + qr_.col(k).tail(len - 1).dot(b.tail(len - 1));
    b(k) -= tau_(k) * w;
    b.tail(len - 1) -= tau_(k) * w * qr_.col(k).tail(len - 1);
  }
  return b;
}

Eigen::MatrixXd HouseholderQr::r() const {
  const Eigen::Index p = qr_.cols();
  return qr_.topRows(p).triangularView<Eigen::Upper>();
}

Eigen::VectorXd HouseholderQr::solve_r(const Eigen::VectorXd& rhs) const {
  const Eigen::Index p = qr_.cols();
  Eigen::VectorXd x(p);
  for (Eigen::Index i = p - 1; i >= 0; --i) {
    double s = rhs(i);
    for (Eigen::Index j = i + 1; j < p; ++j) s -= qr_(i, j) * x(j);
    x(i) = s / qr_(i, i);
  }
  return x;
}

LeastSquaresResult solve_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       const std::vector<std::string>& column_names) {
  const Eigen::Index m = x.rows();
  const Eigen::Index p = x.cols();
  if (y.size() != m) throw InvalidArgument("response length does not match design rows");
  if (m < p) {
    throw InvalidArgument("too few rows for least squares: " + std::to_string(m) + " rows, " +
                          std::to_string(p) + " coefficients");
  }
  if (!x.allFinite() || !y.allFinite()) throw InvalidArgument("least squares input is not finite");

  HouseholderQr qr(x);
  const Eigen::MatrixXd r = qr.r();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  const auto& sv = svd.singularValues();
  const double inv_cond = sv(0) > 0.0 ? sv(p - 1) / sv(0) : 0.0;
  if (!(inv_cond > kRankTolerance)) {
    // Blame the column whose diagonal entry lost the most of its norm.
    Eigen::Index worst = 0;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < p; ++k) {
      const double norm = x.col(k).norm();
      const double ratio = norm > 0.0 ? std::abs(r(k, k)) / norm : 0.0;
      if (ratio < worst_ratio) {
        worst_ratio = ratio;
        worst = k;
      }
    }
    const std::string name = static_cast<std::size_t>(worst) < column_names.size()
                                 ? column_names[static_cast<std::size_t>(worst)]
                                 : "column " + std::to_string(worst);
    throw IllConditionedError("design matrix is rank deficient (sigma_min/sigma_max = " +
                              std::to_string(inv_cond) + "): '" + name +
                              "' is constant or collinear with the other features");
  }

  const Eigen::VectorXd qty = qr.apply_qt(y);
  LeastSquaresResult out;
  out.coefficients = qr.solve_r(qty.head(p));
  out.residual_sum_squares = qty.tail(m - p).squaredNorm();
  out.inverse_condition = inv_cond;

  out.standard_errors = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
  if (m > p) {
    const double sigma2 = out.residual_sum_squares / static_cast<double>(m - p);
    // diag((R^T R)^-1) = squared row norms of R^-1.
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    for (Eigen::Index k = 0; k < p; ++k) {
      out.standard_errors(k) = std::sqrt(sigma2 * r_inv.row(k).squaredNorm());
    }
  }
  return out;
}

}  // namespace browkit
