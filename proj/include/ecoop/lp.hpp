#pragma once

#include <Eigen/Dense>

namespace ecoop::lp {

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  int pivots = 0;
};

/// Minimizes c'x subject to A x <= b, x >= 0 (b may have any sign).
///
/// Dense two-phase tableau simplex with Bland's rule. Intended for the handful of
/// variables that appear in transfer recovery; cost is O(rows * cols) per pivot.
Result minimize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                double tol = 1e-11);

}  // namespace ecoop::lp
