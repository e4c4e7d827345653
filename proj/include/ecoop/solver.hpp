#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "ecoop/channel.hpp"
#include "ecoop/energy.hpp"

namespace ecoop {

/// Prices mu_i >= 0 on the per-BS power constraints.
struct DualState {
  Eigen::VectorXd mu;
};

struct SolverOptions {
  /// Certified suboptimality target for the weighted sum-rate.
  double tol = 1e-6;
  /// Ellipsoid cut budget; 0 selects 5000 * N^2.
  int max_iter = 0;
};

struct Solution {
  Eigen::VectorXd p;             // per-MT power
  Eigen::MatrixXd e;             // transfers i -> j
  DualState mu;
  Eigen::VectorXd rates;         // bandwidth_share * log2(1 + a_k p_k)
  double objective = 0.0;        // sum_k omega_k r_k
  Eigen::VectorXd net_exchange;  // per-BS grid draw (+) or injection (-)
  double dual_value = 0.0;       // f(mu) at the returned prices
  double duality_gap = 0.0;      // dual_value - objective
  int iterations = 0;
};

/// Thrown when the ellipsoid budget runs out; carries the best feasible prices seen.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, DualState best, double gap)
      : std::runtime_error(what), best_(std::move(best)), gap_(gap) {}
  const DualState& best() const noexcept { return best_; }
  double certified_gap() const noexcept { return gap_; }

private:
  DualState best_;
  double gap_;
};

/// Per-MT maximizer of the Lagrangian at fixed prices (closed-form water-filling).
Eigen::VectorXd dual_power_alloc(const ZfGains& gains, const DualState& mu);

/// Dual function f(mu); +infinity outside the region where it is bounded.
double dual_function(const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta, const DualState& mu);

/// g_i = E_i - sum_k b_ik p_k, a subgradient of f at the prices that produced p.
Eigen::VectorXd dual_subgradient(const ZfGains& gains, const EnergyState& es, const Eigen::VectorXd& p);

struct DualResult {
  DualState mu;
  double value = 0.0;        // f(mu)
  double lower_bound = 0.0;  // certified lower bound on min f
  int iterations = 0;
};

/// Minimizes the dual function over {mu >= 0, beta_ij mu_j <= mu_i} with the ellipsoid method.
DualResult solve_dual_detailed(const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta, double tol,
                               int max_iter = 0);

DualState solve_dual(const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta, double tol,
                     int max_iter = 0);

/// Per-BS load sum_k b_ik p_k.
Eigen::VectorXd bs_loads(const ZfGains& gains, const Eigen::VectorXd& p);

/// Transfers realizing p_star; throws ConsistencyError when none exist.
/// The result is unidirectional at every BS whenever rerouting can make it so.
Eigen::MatrixXd recover_transfers(const ZfGains& gains, const Eigen::VectorXd& p_star, const EnergyState& es,
                                  const Eigen::MatrixXd& beta);

/// delta_i = sum_k b_ik p_k - E_i: positive draws from the grid, negative injects.
Eigen::VectorXd net_exchange(const ZfGains& gains, const Eigen::VectorXd& p_star, const EnergyState& es);

Solution solve_p1(const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta,
                  const SolverOptions& opts = {});

/// Result of removing a receive-and-send pattern at one BS.
struct RerouteResult {
  Eigen::MatrixXd e;
  double freed = 0.0;  // power released at the relaying BS (A)
  bool applied = false;
};

/// Replaces the relay j_in -> hub -> j_out by a direct j_in -> j_out transfer
/// (or, when j_in == j_out, cancels the back-and-forth pair). Every BS other than
/// `hub` keeps its available power, and the hub gains `freed` > 0.
///
/// With `share_freed` the hub keeps freed/N and ships freed/N to every other BS,
/// so all BSs end up with strictly more available power.
RerouteResult reroute_relay(const Eigen::MatrixXd& e, const Eigen::MatrixXd& beta, int hub, int j_in, int j_out,
                            bool share_freed);

/// Repeatedly applies reroute_relay until no BS both receives and sends more than `tol`.
Eigen::MatrixXd make_unidirectional(Eigen::MatrixXd e, const Eigen::MatrixXd& beta, double tol = 0.0);

}  // namespace ecoop
