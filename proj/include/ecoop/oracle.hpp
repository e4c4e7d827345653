#pragma once

#include <Eigen/Dense>

#include "ecoop/channel.hpp"
#include "ecoop/energy.hpp"
#include "ecoop/solver.hpp"

// Brute-force and analytic cross-checks for the solver. Nothing here calls into the
// dual/ellipsoid path, so agreement is evidence rather than tautology.
namespace ecoop::oracle {

struct GridSearchResult {
  double objective = 0.0;
  Eigen::VectorXd p;
  Eigen::MatrixXd e;
  long evaluations = 0;
};

/// Exhaustive grid over (p_1..p_{K-1}, e_12, e_21) with p_K set to its largest feasible
/// value, refined `refine_rounds` times by shrinking the box 5x around the incumbent.
/// Guarded to N <= 2 and K <= 3.
GridSearchResult grid_search_p1(const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta,
                                int grid_resolution = 41, int refine_rounds = 3);

/// Maximizes sum_k w_k log2(1 + a_k p_k) subject to sum_k c_k p_k <= budget by bisection
/// on the water level, then snaps to the closed form for the final active set.
Eigen::VectorXd waterfill_sum_power(const Eigen::VectorXd& weights, const Eigen::VectorXd& a, const Eigen::VectorXd& c,
                                    double budget);

/// Max-norm of the KKT residuals (stationarity, primal and dual feasibility,
/// complementary slackness) of a solution to the joint problem.
double kkt_residual(const Solution& sol, const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta);

}  // namespace ecoop::oracle
