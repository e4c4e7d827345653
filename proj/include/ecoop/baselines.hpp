#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecoop/channel.hpp"
#include "ecoop/energy.hpp"
#include "ecoop/solver.hpp"

namespace ecoop {

enum class Scheme { joint, comm_only, energy_only, none };

std::string_view scheme_name(Scheme s);
/// Parses "joint", "comm_only", "energy_only" or "none"; throws DomainError otherwise.
Scheme parse_scheme(std::string_view name);

/// A cooperation scheme plus the MT-BS association the per-BS schemes need.
struct SchemeId {
  Scheme variant = Scheme::joint;
  std::optional<std::vector<int>> association;

  bool needs_association() const { return variant == Scheme::energy_only || variant == Scheme::none; }
  void validate(int n_bs, int m_ant) const;
};

/// Cooperative ZF with per-BS budgets and no energy sharing.
Solution solve_comm_only(const ZfGains& gains, const EnergyState& es, const SolverOptions& opts = {});

/// Per-BS ZF on 1/N of the band, with energy sharing.
Solution solve_energy_only(const ClusterChannel& ch, const std::vector<int>& association, const EnergyState& es,
                           const Eigen::MatrixXd& beta, const Eigen::VectorXd& weights, const SolverOptions& opts = {});

/// Per-BS ZF on 1/N of the band, no energy sharing.
Solution solve_no_coop(const ClusterChannel& ch, const std::vector<int>& association, const EnergyState& es,
                       const Eigen::VectorXd& weights, const SolverOptions& opts = {});

}  // namespace ecoop
