#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecoop/baselines.hpp"

namespace ecoop::harness {

enum class ScenarioKind {
  constant,        // fixed variances and budgets
  two_cell_sweep,  // N=2, M=1, K=2; E1 swept over [0, energy_sum] with E1 + E2 = energy_sum
  snr_sweep,       // N=2, M=1, K=2; cross variances ~ U[0,1], E_i ~ U[0, E] for E on a dB grid
  hex_profile,     // three hexagonal cells, pathloss + Rayleigh, budgets from a wind/solar profile
};

std::string_view kind_name(ScenarioKind k);

/// One experiment. See docs/scenario-format.md for the file syntax.
struct Scenario {
  ScenarioKind kind = ScenarioKind::constant;
  std::string name;
  int n_bs = 2;
  int m_ant = 1;
  int n_mt = 2;

  Eigen::MatrixXd variances;  // constant: N x K
  double cross_variance = 0.5;
  double noise_var = 1.0;     // linear, all kinds but hex_profile
  double noise_dbm = -85.0;   // hex_profile
  Eigen::VectorXd weights;    // empty means all ones
  std::vector<double> betas{0.0};  // each evaluated as a uniform beta matrix
  Eigen::VectorXd budgets;    // constant

  double energy_sum = 30.0;   // two_cell_sweep
  double e1_step = 3.0;
  std::vector<double> energy_db;  // snr_sweep

  std::filesystem::path profile;  // hex_profile; empty selects the bundled profile
  std::vector<std::array<double, 2>> mix{{0.5, 0.5}, {0.1, 0.9}, {0.9, 0.1}};
  std::vector<double> ebar_dbw{10.0};
  int slot_begin = 0;
  int slot_end = -1;  // exclusive; -1 means end of profile
  int slot_stride = 1;
  int placements = 1;  // MT drops per slot
  double site_distance = 1000.0;
  int mt_per_cell = 4;
  double pathloss_c0_db = -60.0;
  double pathloss_d0 = 10.0;
  double pathloss_exp = 3.7;
  double min_distance = 10.0;

  int n_realizations = 100;
  std::uint64_t rng_seed = 1;
  std::vector<Scheme> schemes{Scheme::joint};
  double tol = 1e-6;

  /// Throws ValidationError naming the offending key.
  void validate() const;
};

/// Parses `key = value` lines; '#' starts a comment. Relative profile paths
/// resolve against `base_dir`. Errors carry the line number.
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace ecoop::harness
