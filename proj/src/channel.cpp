#include "ecoop/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <tuple>

#include "ecoop/errors.hpp"

namespace ecoop {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kGainFloor = 1e-15;

// Orthonormal basis of the null space of `rows` (r x n), or the identity when r == 0.
// Returns an empty matrix when `rows` is numerically rank deficient.
Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& rows, int n) {
  if (rows.rows() == 0) return Eigen::MatrixXcd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rows, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < sv.size(); ++j) {
    if (sv(j) > kRankTol * smax) ++rank;
  }
  if (rank < rows.rows() || smax == 0.0) return {};
  return svd.matrixV().rightCols(n - rank);
}

struct Direction {
  Eigen::VectorXcd t;  // unit norm
  double gain = 0.0;   // ||h V||^2
};

// Matched direction inside span(basis): t = V (h V)^H / ||h V||.
Direction project_direction(const Eigen::RowVectorXcd& h, const Eigen::MatrixXcd& basis) {
  const Eigen::RowVectorXcd hv = h * basis;
  const double norm = hv.norm();
  Direction d;
  d.gain = norm * norm;
  if (norm > 0.0) d.t = basis * hv.adjoint() / norm;
  return d;
}

}  // namespace

void ClusterChannel::validate() const {
  if (n_bs <= 0 || m_ant <= 0 || n_mt <= 0) throw FeasibilityError("cluster dimensions must be positive");
  if (n_mt > n_bs * m_ant) {
    throw FeasibilityError("zero-forcing needs K <= M*N (K=" + std::to_string(n_mt) +
                           ", M*N=" + std::to_string(n_bs * m_ant) + ")");
  }
  if (h.rows() != n_mt || h.cols() != n_bs * m_ant) throw FeasibilityError("channel matrix has wrong shape");
  if (noise_var.size() != n_mt) throw FeasibilityError("noise_var length must equal K");
  for (int k = 0; k < n_mt; ++k) {
    if (!(noise_var(k) > 0.0)) throw DomainError("noise variance must be positive");
    if (h.row(k).norm() == 0.0) throw DegeneracyError("MT " + std::to_string(k) + " has an all-zero channel", k);
  }
}

void ZfGains::validate() const {
  const auto k = a.size();
  if (b.cols() != k || weights.size() != k || b.rows() <= 0) throw DomainError("ZfGains dimensions disagree");
  if (!(bandwidth_share > 0.0 && bandwidth_share <= 1.0)) throw DomainError("bandwidth_share must lie in (0,1]");
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(a(j) > 0.0)) throw DomainError("effective gains a_k must be positive");
    if (!(weights(j) > 0.0)) throw DomainError("weights must be positive");
    if (b.col(j).minCoeff() < 0.0 || !(b.col(j).sum() > 0.0)) {
      throw DomainError("b_ik must be nonnegative with a positive column sum");
    }
  }
}

ClusterChannel generate_rayleigh(int n_bs, int m_ant, int n_mt, const Eigen::MatrixXd& variances,
                                 std::uint64_t rng_seed, const Eigen::VectorXd& noise_var) {
  if (n_bs <= 0 || m_ant <= 0 || n_mt <= 0) throw FeasibilityError("cluster dimensions must be positive");
  if (n_mt > n_bs * m_ant) throw FeasibilityError("zero-forcing needs K <= M*N");
  if (variances.rows() != n_bs || variances.cols() != n_mt) throw FeasibilityError("variances must be N x K");
  if (!(variances.minCoeff() > 0.0)) throw DomainError("channel variances must be strictly positive");

  ClusterChannel ch;
  ch.n_bs = n_bs;
  ch.m_ant = m_ant;
  ch.n_mt = n_mt;
  ch.noise_var = noise_var.size() == 0 ? Eigen::VectorXd::Ones(n_mt) : noise_var;
  ch.h.resize(n_mt, n_bs * m_ant);

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < n_mt; ++k) {
    for (int i = 0; i < n_bs; ++i) {
      const double sd = std::sqrt(variances(i, k) / 2.0);
      for (int m = 0; m < m_ant; ++m) {
        const double re = normal(rng);
        const double im = normal(rng);
        ch.h(k, i * m_ant + m) = Complex(sd * re, sd * im);
      }
    }
  }
  ch.validate();
  return ch;
}

double pathloss_variance(const ScenarioGeometry& geometry, int bs, int mt) {
  const auto& b = geometry.bs_positions.at(static_cast<std::size_t>(bs));
  const auto& m = geometry.mt_positions.at(static_cast<std::size_t>(mt));
  const double d = std::hypot(b.x - m.x, b.y - m.y);
  if (!(d > 0.0)) throw DomainError("pathloss evaluated at zero distance");
  if (!(geometry.pathloss_d0 > 0.0)) throw DomainError("reference distance must be positive");
  const double c0 = std::pow(10.0, geometry.pathloss_c0_db / 10.0);
  return c0 * std::pow(d / geometry.pathloss_d0, -geometry.pathloss_exp);
}

Eigen::MatrixXd pathloss_variances(const ScenarioGeometry& geometry) {
  const auto n = static_cast<int>(geometry.bs_positions.size());
  const auto k = static_cast<int>(geometry.mt_positions.size());
  Eigen::MatrixXd v(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) v(i, j) = pathloss_variance(geometry, i, j);
  return v;
}

ZfGains zf_gains(const ClusterChannel& ch, const Eigen::VectorXd& weights) {
  ch.validate();
  const int K = ch.n_mt;
  const int MN = ch.n_antennas();
  if (weights.size() != K) throw DomainError("weights length must equal K");

  ZfGains g;
  g.a.resize(K);
  g.b.resize(ch.n_bs, K);
  g.t_dir.resize(MN, K);
  g.weights = weights;

  for (int k = 0; k < K; ++k) {
    Eigen::MatrixXcd others(K - 1, MN);
    for (int l = 0, r = 0; l < K; ++l) {
      if (l != k) others.row(r++) = ch.h.row(l);
    }
    const Eigen::MatrixXcd basis = null_space(others, MN);
    if (basis.size() == 0) {
      throw DegeneracyError("channels of the MTs other than MT " + std::to_string(k) + " are rank deficient", k);
    }
    const Eigen::RowVectorXcd hk = ch.h.row(k);
    const Direction d = project_direction(hk, basis);
    if (d.gain <= kGainFloor * hk.squaredNorm() || d.gain == 0.0) {
      throw DegeneracyError("MT " + std::to_string(k) + " lies in the span of the other MTs' channels", k);
    }
    g.t_dir.col(k) = d.t;
    g.a(k) = d.gain / ch.noise_var(k);
    for (int i = 0; i < ch.n_bs; ++i) {
      const double bik = d.t.segment(i * ch.m_ant, ch.m_ant).squaredNorm();
      if (!(bik > kGainFloor)) {
        throw DegeneracyError("precoder of MT " + std::to_string(k) + " places no power on BS " + std::to_string(i), k);
      }
      g.b(i, k) = bik;
    }
  }
  return g;
}

ZfGains per_bs_zf_gains(const ClusterChannel& ch, const std::vector<int>& association,
                        const Eigen::VectorXd& weights) {
  ch.validate();
  const int K = ch.n_mt;
  const int M = ch.m_ant;
  if (static_cast<int>(association.size()) != K) throw FeasibilityError("association must assign every MT");
  if (weights.size() != K) throw DomainError("weights length must equal K");

  std::vector<std::vector<int>> served(static_cast<std::size_t>(ch.n_bs));
  for (int k = 0; k < K; ++k) {
    const int i = association[static_cast<std::size_t>(k)];
    if (i < 0 || i >= ch.n_bs) throw FeasibilityError("association refers to an unknown BS");
    served[static_cast<std::size_t>(i)].push_back(k);
  }
  for (int i = 0; i < ch.n_bs; ++i) {
    if (static_cast<int>(served[static_cast<std::size_t>(i)].size()) > M) {
      throw FeasibilityError("BS " + std::to_string(i) + " serves more MTs than it has antennas");
    }
  }

  ZfGains g;
  g.a.resize(K);
  g.b = Eigen::MatrixXd::Zero(ch.n_bs, K);
  g.t_dir = Eigen::MatrixXcd::Zero(ch.n_antennas(), K);
  g.weights = weights;
  g.bandwidth_share = 1.0 / ch.n_bs;

  for (int i = 0; i < ch.n_bs; ++i) {
    const auto& users = served[static_cast<std::size_t>(i)];
    for (int k : users) {
      Eigen::MatrixXcd others(static_cast<Eigen::Index>(users.size()) - 1, M);
      Eigen::Index r = 0;
      for (int l : users) {
        if (l != k) others.row(r++) = ch.block(i, l);
      }
      const Eigen::MatrixXcd basis = null_space(others, M);
      if (basis.size() == 0) {
        throw DegeneracyError("co-scheduled MTs at BS " + std::to_string(i) + " are rank deficient", k);
      }
      const Eigen::RowVectorXcd hik = ch.block(i, k);
      const Direction d = project_direction(hik, basis);
      if (d.gain <= kGainFloor * hik.squaredNorm() || d.gain == 0.0) {
        throw DegeneracyError("MT " + std::to_string(k) + " has no usable direction at its BS", k);
      }
      g.t_dir.col(k).segment(i * M, M) = d.t;
      g.a(k) = d.gain / ch.noise_var(k);
      g.b(i, k) = 1.0;
    }
  }
  return g;
}

std::vector<int> strongest_association(const Eigen::MatrixXd& power, int capacity) {
  const auto n = static_cast<int>(power.rows());
  const auto k = static_cast<int>(power.cols());
  if (static_cast<long>(n) * capacity < k) throw FeasibilityError("not enough BS capacity for all MTs");

  std::vector<std::tuple<double, int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n * k));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) pairs.emplace_back(power(i, j), i, j);
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
    if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) < std::get<1>(y);
    return std::get<2>(x) < std::get<2>(y);
  });

  std::vector<int> assoc(static_cast<std::size_t>(k), -1);
  std::vector<int> load(static_cast<std::size_t>(n), 0);
  for (const auto& [pw, i, j] : pairs) {
    auto& slot = assoc[static_cast<std::size_t>(j)];
    if (slot >= 0 || load[static_cast<std::size_t>(i)] >= capacity) continue;
    slot = i;
    ++load[static_cast<std::size_t>(i)];
  }
  return assoc;
}

Eigen::MatrixXd block_power(const ClusterChannel& ch) {
  Eigen::MatrixXd p(ch.n_bs, ch.n_mt);
  for (int i = 0; i < ch.n_bs; ++i)
    for (int k = 0; k < ch.n_mt; ++k) p(i, k) = ch.block(i, k).squaredNorm() / ch.m_ant;
  return p;
}

}  // namespace ecoop
