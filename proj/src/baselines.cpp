#include "ecoop/baselines.hpp"

#include "ecoop/errors.hpp"

namespace ecoop {

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::joint: return "joint";
    case Scheme::comm_only: return "comm_only";
    case Scheme::energy_only: return "energy_only";
    case Scheme::none: return "none";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "joint") return Scheme::joint;
  if (name == "comm_only") return Scheme::comm_only;
  if (name == "energy_only") return Scheme::energy_only;
  if (name == "none") return Scheme::none;
  throw DomainError("unknown scheme '" + std::string(name) + "'");
}

void SchemeId::validate(int n_bs, int m_ant) const {
  if (needs_association() != association.has_value()) {
    throw DomainError("association must be given exactly for the per-BS schemes");
  }
  if (!association) return;
  std::vector<int> load(static_cast<std::size_t>(n_bs), 0);
  for (int i : *association) {
    if (i < 0 || i >= n_bs) throw FeasibilityError("association refers to an unknown BS");
    if (++load[static_cast<std::size_t>(i)] > m_ant) throw FeasibilityError("association exceeds a BS's antenna count");
  }
}

Solution solve_comm_only(const ZfGains& gains, const EnergyState& es, const SolverOptions& opts) {
  return solve_p1(gains, es, Eigen::MatrixXd::Zero(gains.n_bs(), gains.n_bs()), opts);
}

Solution solve_energy_only(const ClusterChannel& ch, const std::vector<int>& association, const EnergyState& es,
                           const Eigen::MatrixXd& beta, const Eigen::VectorXd& weights, const SolverOptions& opts) {
  validate_beta(beta);
  for (Eigen::Index i = 0; i < beta.rows(); ++i)
    for (Eigen::Index j = 0; j < beta.cols(); ++j)
      if (i != j && !(beta(i, j) > 0.0)) throw DomainError("energy-only cooperation needs every beta_ij > 0");
  return solve_p1(per_bs_zf_gains(ch, association, weights), es, beta, opts);
}

Solution solve_no_coop(const ClusterChannel& ch, const std::vector<int>& association, const EnergyState& es,
                       const Eigen::VectorXd& weights, const SolverOptions& opts) {
  Solution s = solve_p1(per_bs_zf_gains(ch, association, weights), es, Eigen::MatrixXd::Zero(ch.n_bs, ch.n_bs), opts);
  s.e.setZero();
  return s;
}

}  // namespace ecoop
