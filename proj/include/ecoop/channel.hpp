#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ecoop {

using Complex = std::complex<double>;

/// Downlink channel of one CoMP cluster: N BSs with M antennas each, K single-antenna MTs.
///
/// Row k of `h` is the aggregate channel h_k = [h_1k ... h_Nk]; columns are grouped
/// by BS, so BS i owns columns [i*M, (i+1)*M).
struct ClusterChannel {
  int n_bs = 0;
  int m_ant = 0;
  int n_mt = 0;
  Eigen::MatrixXcd h;         // K x (M*N)
  Eigen::VectorXd noise_var;  // per-MT sigma_k^2

  int n_antennas() const { return n_bs * m_ant; }
  Eigen::RowVectorXcd block(int bs, int mt) const { return h.row(mt).segment(bs * m_ant, m_ant); }

  /// Throws FeasibilityError / DomainError when the invariants do not hold.
  void validate() const;
};

/// Effective scalar model produced by zero-forcing precoding.
///
/// MT k receives rate bandwidth_share * log2(1 + a_k p_k) and its precoder
/// draws b_ik * p_k from BS i.
struct ZfGains {
  Eigen::VectorXd a;        // per-MT effective gain
  Eigen::MatrixXd b;        // N x K power split
  Eigen::MatrixXcd t_dir;   // (M*N) x K, unit-norm precoder directions
  Eigen::VectorXd weights;  // omega_k
  double bandwidth_share = 1.0;

  int n_bs() const { return static_cast<int>(b.rows()); }
  int n_mt() const { return static_cast<int>(b.cols()); }

  void validate() const;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct ScenarioGeometry {
  std::vector<Point2> bs_positions;
  std::vector<Point2> mt_positions;
  double pathloss_c0_db = -60.0;
  double pathloss_d0 = 10.0;
  double pathloss_exp = 3.7;
};

/// Draws an i.i.d. Rayleigh channel; entry (i,k) block has per-antenna variance variances(i,k).
/// `noise_var` defaults to all ones when empty.
ClusterChannel generate_rayleigh(int n_bs, int m_ant, int n_mt, const Eigen::MatrixXd& variances,
                                 std::uint64_t rng_seed, const Eigen::VectorXd& noise_var = {});

double pathloss_variance(const ScenarioGeometry& geometry, int bs, int mt);

/// N x K matrix of pathloss variances for every BS/MT pair.
Eigen::MatrixXd pathloss_variances(const ScenarioGeometry& geometry);

/// Cooperative ZF across all N*M antennas.
ZfGains zf_gains(const ClusterChannel& ch, const Eigen::VectorXd& weights);

/// Per-BS ZF: BS association[k] serves MT k alone on a 1/N band.
ZfGains per_bs_zf_gains(const ClusterChannel& ch, const std::vector<int>& association,
                        const Eigen::VectorXd& weights);

/// Assigns each MT to the BS with the largest channel power in `power` (N x K),
/// visiting pairs strongest-first and skipping BSs already serving `capacity` MTs.
/// Ties go to the lower BS index.
std::vector<int> strongest_association(const Eigen::MatrixXd& power, int capacity);

/// Per-block average channel power ||h_ik||^2 / M of a realization.
Eigen::MatrixXd block_power(const ClusterChannel& ch);

}  // namespace ecoop
