#include "ecoop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "ecoop/errors.hpp"

namespace ecoop::oracle {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double objective(const ZfGains& g, const Eigen::VectorXd& p) {
  double s = 0.0;
  for (int k = 0; k < g.n_mt(); ++k) s += g.weights(k) * g.bandwidth_share * std::log2(1.0 + g.a(k) * p(k));
  return s;
}

}  // namespace

GridSearchResult grid_search_p1(const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta,
                                int grid_resolution, int refine_rounds) {
  const int n = gains.n_bs();
  const int k_mt = gains.n_mt();
  if (n > 2 || k_mt > 3) throw UnsupportedError("grid search is limited to N <= 2 and K <= 3");
  if (grid_resolution < 2 || refine_rounds < 0) throw DomainError("grid needs >= 2 points and >= 0 refinements");
  validate_beta(beta);

  const Eigen::VectorXd& budget = es.budget();
  const double eta = es.pa_eff();

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && beta(i, j) > 0.0) pairs.emplace_back(i, j);

  // Largest supply any BS could assemble: its own budget plus everything the others could ship.
  Eigen::VectorXd supply_max = budget;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) supply_max(i) += beta(j, i) * budget(j);

  const int n_free_p = k_mt - 1;
  const int dims = n_free_p + static_cast<int>(pairs.size());
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(dims);
  Eigen::VectorXd hi(dims);
  for (int k = 0; k < n_free_p; ++k) {
    double ub = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      if (gains.b(i, k) > 0.0) ub = std::min(ub, eta * supply_max(i) / gains.b(i, k));
    hi(k) = ub;
  }
  for (std::size_t v = 0; v < pairs.size(); ++v) hi(n_free_p + static_cast<int>(v)) = supply_max(pairs[v].first);
  const Eigen::VectorXd lo0 = lo;
  const Eigen::VectorXd hi0 = hi;

  GridSearchResult best;
  best.objective = -1.0;
  best.p = Eigen::VectorXd::Zero(k_mt);
  best.e = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd best_z = Eigen::VectorXd::Zero(dims);

  Eigen::VectorXd z(dims);
  Eigen::VectorXd p(k_mt);
  Eigen::MatrixXd e(n, n);
  std::vector<int> idx(static_cast<std::size_t>(dims));

  for (int round = 0; round <= refine_rounds; ++round) {
    std::fill(idx.begin(), idx.end(), 0);
    long total = 1;
    for (int d = 0; d < dims; ++d) total *= grid_resolution;
    for (long t = 0; t < total; ++t) {
      for (int d = 0; d < dims; ++d) {
        z(d) = lo(d) + (hi(d) - lo(d)) * idx[static_cast<std::size_t>(d)] / (grid_resolution - 1);
      }
      for (int d = 0; d < dims; ++d) {
        if (++idx[static_cast<std::size_t>(d)] < grid_resolution) break;
        idx[static_cast<std::size_t>(d)] = 0;
      }
      ++best.evaluations;

      e.setZero();
      for (std::size_t v = 0; v < pairs.size(); ++v) e(pairs[v].first, pairs[v].second) = z(n_free_p + static_cast<int>(v));
      p.head(n_free_p) = z.head(n_free_p);

      double last = std::numeric_limits<double>::infinity();
      bool feasible = true;
      for (int i = 0; i < n && feasible; ++i) {
        double avail = budget(i);
        for (int j = 0; j < n; ++j)
          if (j != i) avail += beta(j, i) * e(j, i) - e(i, j);
        double residual = eta * avail;
        for (int k = 0; k < n_free_p; ++k) residual -= gains.b(i, k) * p(k);
        if (residual < 0.0) {
          feasible = false;
        } else if (gains.b(i, k_mt - 1) > 0.0) {
          last = std::min(last, residual / gains.b(i, k_mt - 1));
        }
      }
      if (!feasible || !std::isfinite(last)) continue;
      p(k_mt - 1) = last;
      const double obj = objective(gains, p);
      if (obj > best.objective) {
        best.objective = obj;
        best.p = p;
        best.e = e;
        best_z = z;
      }
    }
    for (int d = 0; d < dims; ++d) {
      const double half = (hi(d) - lo(d)) / 10.0;
      lo(d) = std::max(lo0(d), best_z(d) - half);
      hi(d) = std::min(hi0(d), best_z(d) + half);
    }
  }
  if (best.objective < 0.0) throw ConsistencyError("grid search found no feasible point");
  return best;
}

Eigen::VectorXd waterfill_sum_power(const Eigen::VectorXd& weights, const Eigen::VectorXd& a, const Eigen::VectorXd& c,
                                    double budget) {
  const auto k = weights.size();
  if (a.size() != k || c.size() != k) throw DomainError("water-filling inputs disagree in length");
  if (budget < 0.0) throw DomainError("budget must be nonnegative");
  if ((a.array() <= 0.0).any() || (c.array() <= 0.0).any()) throw DomainError("a_k and c_k must be positive");

  Eigen::VectorXd p = Eigen::VectorXd::Zero(k);
  if (budget == 0.0) return p;

  auto alloc = [&](double level) {
    Eigen::VectorXd q(k);
    for (Eigen::Index j = 0; j < k; ++j) q(j) = std::max(0.0, weights(j) / (kLn2 * level * c(j)) - 1.0 / a(j));
    return q;
  };
  auto spend = [&](double level) { return c.dot(alloc(level)); };

  double hi = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) hi = std::max(hi, weights(j) * a(j) / (kLn2 * c(j)));
  double lo = hi;
  while (spend(lo) < budget) lo /= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (spend(mid) >= budget) lo = mid;
    else hi = mid;
  }
  p = alloc(lo);

  // Closed form for the active set found by bisection.
  double wsum = 0.0;
  double offset = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (p(j) > 0.0) {
      wsum += weights(j);
      offset += c(j) / a(j);
    }
  }
  if (wsum > 0.0) {
    const double level = wsum / (kLn2 * (budget + offset));
    Eigen::VectorXd q = Eigen::VectorXd::Zero(k);
    bool consistent = true;
    for (Eigen::Index j = 0; j < k; ++j) {
      const double v = weights(j) / (kLn2 * level * c(j)) - 1.0 / a(j);
      if (p(j) > 0.0) {
        q(j) = std::max(0.0, v);
        if (v < 0.0) consistent = false;
      } else if (v > 0.0) {
        consistent = false;
      }
    }
    if (consistent) p = q;
  }
  return p;
}

double kkt_residual(const Solution& sol, const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta) {
  const int n = gains.n_bs();
  const Eigen::VectorXd& mu = sol.mu.mu;
  const double eta = es.pa_eff();
  double r = 0.0;
  auto bump = [&r](double v) { r = std::max(r, std::abs(v)); };

  for (int i = 0; i < n; ++i) bump(std::min(0.0, mu(i)));

  for (int k = 0; k < gains.n_mt(); ++k) {
    const double price = gains.b.col(k).dot(mu) / eta;
    const double marginal = gains.weights(k) * gains.bandwidth_share * gains.a(k) / (kLn2 * (1.0 + gains.a(k) * sol.p(k)));
    const double reduced = price - marginal;  // multiplier of p_k >= 0
    bump(std::min(0.0, sol.p(k)));
    bump(std::min(0.0, reduced));
    bump(reduced * sol.p(k));
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double reduced = mu(i) - beta(i, j) * mu(j);  // multiplier of e_ij >= 0
      bump(std::min(0.0, sol.e(i, j)));
      bump(std::min(0.0, reduced));
      bump(reduced * sol.e(i, j));
    }

  const Eigen::VectorXd load = gains.b * sol.p / eta;
  for (int i = 0; i < n; ++i) {
    double avail = es.budget()(i);
    for (int j = 0; j < n; ++j)
      if (j != i) avail += beta(j, i) * sol.e(j, i) - sol.e(i, j);
    const double slack = avail - load(i);
    bump(std::min(0.0, slack));
    bump(mu(i) * slack);
  }
  return r;
}

}  // namespace ecoop::oracle
