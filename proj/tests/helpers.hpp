#pragma once

#include <random>

#include <Eigen/Dense>

#include "ecoop/channel.hpp"
#include "ecoop/energy.hpp"

namespace testing {

inline Eigen::MatrixXd random_variances(std::mt19937_64& rng, int n, int k, double lo = 0.1, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd v(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) v(i, j) = u(rng);
  return v;
}

inline Eigen::VectorXd random_budgets(std::mt19937_64& rng, int n, double hi) {
  std::uniform_real_distribution<double> u(0.0, hi);
  Eigen::VectorXd e(n);
  for (int i = 0; i < n; ++i) e(i) = u(rng);
  return e;
}

// Random efficiencies strictly inside (lo, hi) that satisfy the relaying inequality.
inline Eigen::MatrixXd random_interior_beta(std::mt19937_64& rng, int n, double lo = 0.05, double hi = 0.95) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (;;) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = i == j ? 0.0 : u(rng);
    try {
      ecoop::validate_beta(b);
      return b;
    } catch (const std::exception&) {
    }
  }
}

inline ecoop::ClusterChannel random_channel(std::mt19937_64& rng, int n, int m, int k) {
  return ecoop::generate_rayleigh(n, m, k, random_variances(rng, n, k), rng());
}

// Power available at BS i under transfers e.
inline double supply(const Eigen::VectorXd& budget, const Eigen::MatrixXd& beta, const Eigen::MatrixXd& e, int i) {
  double s = budget(i);
  for (int j = 0; j < budget.size(); ++j)
    if (j != i) s += beta(j, i) * e(j, i) - e(i, j);
  return s;
}

}  // namespace testing
