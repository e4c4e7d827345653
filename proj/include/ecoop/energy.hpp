#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ecoop {

/// Hybrid supply of every BS in the cluster for one slot.
///
/// The transmit budget is E_i = RE_i + G - P_C; the grid draw G is shared by all BSs
/// and must cover the circuit power P_C.
class EnergyState {
public:
  EnergyState() = default;
  EnergyState(Eigen::VectorXd renewable, double grid, double circuit, double pa_eff = 1.0);

  /// Budgets given directly (G = P_C, so E_i = RE_i).
  static EnergyState from_budgets(const Eigen::VectorXd& budgets);

  const Eigen::VectorXd& renewable() const { return re_; }
  double grid() const { return grid_; }
  double circuit() const { return circuit_; }
  double pa_eff() const { return pa_eff_; }
  const Eigen::VectorXd& budget() const { return budget_; }
  int n_bs() const { return static_cast<int>(budget_.size()); }

private:
  Eigen::VectorXd re_;
  double grid_ = 0.0;
  double circuit_ = 0.0;
  double pa_eff_ = 1.0;
  Eigen::VectorXd budget_;
};

/// Checks 0 <= beta_ij <= 1 off the diagonal, and the relaying inequality
/// beta_ij > beta_il * beta_lj whenever every off-diagonal entry is strictly inside (0,1).
void validate_beta(const Eigen::MatrixXd& beta);

/// N x N efficiency matrix with every off-diagonal entry equal to `value`, zero diagonal.
Eigen::MatrixXd uniform_beta(int n_bs, double value);

bool all_interior(const Eigen::MatrixXd& beta);

struct TransferModel {
  Eigen::MatrixXd beta;  // transfer efficiency i -> j
  Eigen::MatrixXd e;     // power injected by i for j

  TransferModel() = default;
  TransferModel(Eigen::MatrixXd beta_, Eigen::MatrixXd e_);

  static TransferModel none(const Eigen::MatrixXd& beta);

  int n_bs() const { return static_cast<int>(beta.rows()); }
  /// Power BS i receives: sum_j beta_ji e_ji.
  double inflow(int i) const;
  /// Power BS i injects: sum_j e_ij.
  double outflow(int i) const;
};

double available_power(const EnergyState& es, const TransferModel& tm, int bs);

struct GridBalance {
  double injected = 0.0;
  double drawn = 0.0;
  double lost = 0.0;
};

GridBalance grid_neutrality_check(const TransferModel& tm);

/// Sampled boundary of the two-BS power region, ordered by increasing P_1 and
/// running from the P_2 axis to the P_1 axis. The corner (E_1, E_2) is always included.
std::vector<Eigen::Vector2d> power_region_boundary(const Eigen::VectorXd& budgets, const Eigen::MatrixXd& beta,
                                                   int n_samples);

struct TransferPlan {
  Eigen::MatrixXd e;          // transfers, zero on the diagonal and wherever beta_ij = 0
  Eigen::VectorXd violation;  // per-BS shortfall left after transfers (zero when feasible)
};

/// Finds transfers covering per-BS loads from the budgets.
///
/// First minimizes the total shortfall sum_i s_i over e >= 0, then, holding that
/// shortfall, picks the pattern with the least total injected power. Pairs with
/// beta_ij = 0 carry no transfer variable.
TransferPlan plan_transfers(const Eigen::VectorXd& loads, const Eigen::VectorXd& budgets, const Eigen::MatrixXd& beta);

/// Whether the per-BS powers are reachable with some nonnegative transfer pattern.
bool power_feasible(const Eigen::VectorXd& powers, const Eigen::VectorXd& budgets, const Eigen::MatrixXd& beta,
                    double tol = 1e-9);

}  // namespace ecoop
