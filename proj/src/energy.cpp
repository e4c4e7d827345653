#include "ecoop/energy.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "ecoop/errors.hpp"
#include "ecoop/lp.hpp"

namespace ecoop {

EnergyState::EnergyState(Eigen::VectorXd renewable, double grid, double circuit, double pa_eff)
    : re_(std::move(renewable)), grid_(grid), circuit_(circuit), pa_eff_(pa_eff) {
  if (re_.size() == 0) throw DomainError("at least one BS is required");
  if (re_.minCoeff() < 0.0) throw DomainError("renewable rates must be nonnegative");
  if (grid_ < 0.0 || circuit_ < 0.0) throw DomainError("grid draw and circuit power must be nonnegative");
  if (grid_ < circuit_) throw DomainError("grid draw must cover the circuit power (G >= P_C)");
  if (!(pa_eff_ > 0.0 && pa_eff_ <= 1.0)) throw DomainError("PA efficiency must lie in (0,1]");
  budget_ = re_.array() + (grid_ - circuit_);
}

EnergyState EnergyState::from_budgets(const Eigen::VectorXd& budgets) { return EnergyState(budgets, 0.0, 0.0, 1.0); }

void validate_beta(const Eigen::MatrixXd& beta) {
  const auto n = beta.rows();
  if (beta.cols() != n || n == 0) throw DomainError("beta must be a nonempty square matrix");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && !(beta(i, j) >= 0.0 && beta(i, j) <= 1.0)) {
        throw DomainError("transfer efficiencies must lie in [0,1]");
      }
  if (!all_interior(beta)) return;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index l = 0; l < n; ++l)
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i == l || l == j || i == j) continue;
        if (!(beta(i, j) > beta(i, l) * beta(l, j))) {
          throw DomainError("relaying through BS " + std::to_string(l) + " must be lossier than the direct transfer " +
                            std::to_string(i) + "->" + std::to_string(j));
        }
      }
}

Eigen::MatrixXd uniform_beta(int n_bs, double value) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Constant(n_bs, n_bs, value);
  b.diagonal().setZero();
  return b;
}

bool all_interior(const Eigen::MatrixXd& beta) {
  for (Eigen::Index i = 0; i < beta.rows(); ++i)
    for (Eigen::Index j = 0; j < beta.cols(); ++j)
      if (i != j && !(beta(i, j) > 0.0 && beta(i, j) < 1.0)) return false;
  return true;
}

TransferModel::TransferModel(Eigen::MatrixXd beta_, Eigen::MatrixXd e_) : beta(std::move(beta_)), e(std::move(e_)) {
  validate_beta(beta);
  if (e.rows() != beta.rows() || e.cols() != beta.cols()) throw DomainError("transfer matrix shape must match beta");
  if (e.minCoeff() < 0.0) throw DomainError("transfers must be nonnegative");
  if (e.diagonal().cwiseAbs().maxCoeff() != 0.0) throw DomainError("self transfers must be zero");
}

TransferModel TransferModel::none(const Eigen::MatrixXd& beta) {
  return TransferModel(beta, Eigen::MatrixXd::Zero(beta.rows(), beta.cols()));
}

double TransferModel::inflow(int i) const {
  double s = 0.0;
  for (int j = 0; j < n_bs(); ++j)
    if (j != i) s += beta(j, i) * e(j, i);
  return s;
}

double TransferModel::outflow(int i) const {
  double s = 0.0;
  for (int j = 0; j < n_bs(); ++j)
    if (j != i) s += e(i, j);
  return s;
}

double available_power(const EnergyState& es, const TransferModel& tm, int bs) {
  if (es.n_bs() != tm.n_bs()) throw DomainError("energy state and transfer model disagree on N");
  return es.pa_eff() * (es.budget()(bs) + tm.inflow(bs) - tm.outflow(bs));
}

GridBalance grid_neutrality_check(const TransferModel& tm) {
  GridBalance g;
  for (int i = 0; i < tm.n_bs(); ++i)
    for (int j = 0; j < tm.n_bs(); ++j) {
      if (i == j) continue;
      g.injected += tm.e(i, j);
      g.drawn += tm.beta(i, j) * tm.e(i, j);
      g.lost += (1.0 - tm.beta(i, j)) * tm.e(i, j);
    }
  return g;
}

std::vector<Eigen::Vector2d> power_region_boundary(const Eigen::VectorXd& budgets, const Eigen::MatrixXd& beta,
                                                   int n_samples) {
  if (budgets.size() != 2 || beta.rows() != 2) throw UnsupportedError("power region sampling supports N = 2 only");
  validate_beta(beta);
  if (budgets.minCoeff() < 0.0) throw DomainError("budgets must be nonnegative");
  if (n_samples < 2) throw DomainError("need at least two samples");

  const double e1 = budgets(0);
  const double e2 = budgets(1);
  const double b12 = beta(0, 1);
  const double b21 = beta(1, 0);
  const double p1_max = e1 + b21 * e2;

  // Largest P_2 for a given P_1: BS 1 ships its surplus, or BS 2 covers the deficit.
  auto frontier = [&](double p1) {
    if (p1 <= e1) return e2 + b12 * (e1 - p1);
    return std::max(0.0, e2 - (p1 - e1) / b21);
  };

  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(n_samples) + 2);
  for (int s = 0; s < n_samples; ++s) {
    const double p1 = p1_max * s / (n_samples - 1);
    pts.emplace_back(p1, frontier(p1));
  }
  pts.emplace_back(e1, e2);
  if (frontier(p1_max) > 0.0) pts.emplace_back(p1_max, 0.0);
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    if (a.x() != b.x()) return a.x() < b.x();
    return a.y() > b.y();
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return (a - b).norm() == 0.0; }),
            pts.end());
  return pts;
}

TransferPlan plan_transfers(const Eigen::VectorXd& loads, const Eigen::VectorXd& budgets, const Eigen::MatrixXd& beta) {
  const auto n = budgets.size();
  if (loads.size() != n || beta.rows() != n || beta.cols() != n) throw DomainError("transfer LP dimensions disagree");

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && beta(i, j) > 0.0) pairs.emplace_back(i, j);
  const auto np = static_cast<Eigen::Index>(pairs.size());

  // Row i: sum_j e_ij - sum_j beta_ji e_ji - s_i <= E_i - load_i.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, np + n);
  for (Eigen::Index v = 0; v < np; ++v) {
    const auto [i, j] = pairs[static_cast<std::size_t>(v)];
    a(i, v) += 1.0;
    a(j, v) -= beta(i, j);
  }
  a.rightCols(n) = -Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd rhs = budgets - loads;

  Eigen::VectorXd c1 = Eigen::VectorXd::Zero(np + n);
  c1.tail(n).setOnes();
  const auto shortfall = lp::minimize(c1, a, rhs);
  if (shortfall.status != lp::Status::optimal) throw ConsistencyError("shortfall LP failed");
  const Eigen::VectorXd s = shortfall.x.tail(n);

  TransferPlan plan;
  plan.violation = s;
  plan.e = Eigen::MatrixXd::Zero(n, n);
  if (np == 0) return plan;

  const auto least = lp::minimize(Eigen::VectorXd::Ones(np), a.leftCols(np), rhs + s);
  const Eigen::VectorXd x = least.status == lp::Status::optimal ? least.x : shortfall.x.head(np);
  for (Eigen::Index v = 0; v < np; ++v) {
    const auto [i, j] = pairs[static_cast<std::size_t>(v)];
    plan.e(i, j) = x(v);
  }
  // Report what the returned pattern actually leaves uncovered.
  const Eigen::VectorXd residual = a.leftCols(np) * x - rhs;
  plan.violation = residual.cwiseMax(0.0);
  return plan;
}

bool power_feasible(const Eigen::VectorXd& powers, const Eigen::VectorXd& budgets, const Eigen::MatrixXd& beta,
                    double tol) {
  validate_beta(beta);
  const auto plan = plan_transfers(powers, budgets, beta);
  return plan.violation.sum() <= tol * (1.0 + budgets.cwiseAbs().sum());
}

}  // namespace ecoop
