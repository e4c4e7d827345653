#include "ecoop/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "ecoop/errors.hpp"
#include "ecoop/lp.hpp"

namespace ecoop {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long double kLn2l = std::numbers::ln2_v<long double>;

using Real = long double;
using RVec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using RMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

void check_inputs(const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta) {
  gains.validate();
  if (es.n_bs() != gains.n_bs()) throw DomainError("energy state and gains disagree on N");
  if (beta.rows() != gains.n_bs()) throw DomainError("beta must be N x N");
  validate_beta(beta);
}

// Per-BS power demanded from the supply side, i.e. load / eta.
Eigen::VectorXd demand(const ZfGains& gains, const EnergyState& es, const Eigen::VectorXd& p) {
  return bs_loads(gains, p) / es.pa_eff();
}

double weighted_rate_sum(const ZfGains& gains, const Eigen::VectorXd& p) {
  double s = 0.0;
  for (int k = 0; k < gains.n_mt(); ++k) s += gains.weights(k) * gains.bandwidth_share * std::log2(1.0 + gains.a(k) * p(k));
  return s;
}

// Efficiencies this close to 1 are merged as lossless. Equal prices always satisfy
// beta_ij mu_j <= mu_i, so merging only shrinks the dual domain to a feasible subset;
// the reported gap is still measured against the recovered primal.
constexpr double kLosslessSlack = 1e-8;

// Groups BSs whose prices are forced equal by lossless transfer cycles (beta = 1 both ways
// along a directed cycle). The ellipsoid runs on one coordinate per group so the feasible
// set keeps a nonempty interior.
std::vector<int> lossless_components(const Eigen::MatrixXd& beta, int& n_comp) {
  const auto n = static_cast<int>(beta.rows());
  std::vector<std::vector<bool>> reach(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  for (int i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (int j = 0; j < n; ++j)
      if (i != j && beta(i, j) >= 1.0 - kLosslessSlack) reach[i][j] = true;
  }
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][l] && reach[l][j]) reach[i][j] = true;

  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  n_comp = 0;
  for (int i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    for (int j = i; j < n; ++j)
      if (reach[i][j] && reach[j][i]) comp[j] = n_comp;
    ++n_comp;
  }
  return comp;
}

// Largest theta in [0, 1] for which theta * demand is supportable by some transfer pattern.
double supported_fraction(const Eigen::VectorXd& demand, const Eigen::VectorXd& budgets, const Eigen::MatrixXd& beta) {
  const auto n = budgets.size();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && beta(i, j) > 0.0) pairs.emplace_back(i, j);
  const auto np = static_cast<Eigen::Index>(pairs.size());

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, np + 1);
  for (Eigen::Index v = 0; v < np; ++v) {
    const auto [i, j] = pairs[static_cast<std::size_t>(v)];
    a(i, v) += 1.0;
    a(j, v) -= beta(i, j);
  }
  a.col(np).head(n) = demand;
  a(n, np) = 1.0;
  Eigen::VectorXd rhs(n + 1);
  rhs << budgets, 1.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(np + 1);
  c(np) = -1.0;
  const auto res = lp::minimize(c, a, rhs);
  if (res.status != lp::Status::optimal) throw ConsistencyError("supported-fraction LP failed");
  return std::clamp(res.x(np), 0.0, 1.0);
}

struct Cut {
  RVec g;
  Real depth = 0;  // h(x) >= 0 for a violated constraint, f(x) - f_best for an objective cut
};

class Ellipsoid {
public:
  Ellipsoid(RVec center, Real radius) : x_(std::move(center)), p_(RMat::Identity(x_.size(), x_.size()) * radius * radius) {}

  const RVec& center() const { return x_; }

  // sqrt(g' P g), the half-width of the ellipsoid along g.
  Real width(const RVec& g) const {
    const Real w = g.dot(p_ * g);
    return w > 0 ? std::sqrt(w) : Real(0);
  }

  // Keeps {y : g'(y - x) + depth <= 0}. Returns false when the remaining set is (numerically) empty.
  bool cut(const Cut& c) {
    const Real n = static_cast<Real>(x_.size());
    const Real w = width(c.g);
    if (!(w > 0)) return false;
    const Real alpha = c.depth / w;
    if (alpha >= 1) return false;
    const RVec gt = p_ * c.g / w;
    x_ -= (1 + n * alpha) / (n + 1) * gt;
    if (x_.size() == 1) {
      p_ *= (1 - alpha) * (1 - alpha) / 4;
    } else {
      const Real scale = n * n * (1 - alpha * alpha) / (n * n - 1);
      const Real shrink = 2 * (1 + n * alpha) / ((n + 1) * (1 + alpha));
      p_ = scale * (p_ - shrink * gt * gt.transpose());
      p_ = (p_ + p_.transpose()) / 2;
    }
    return true;
  }

private:
  RVec x_;
  RMat p_;
};

struct DualProblem {
  const ZfGains& gains;
  const EnergyState& es;
  const Eigen::MatrixXd& beta;
  std::vector<int> comp;
  int n_comp = 0;
  Eigen::MatrixXd b_eff;  // b / eta

  DualProblem(const ZfGains& g, const EnergyState& e, const Eigen::MatrixXd& bt) : gains(g), es(e), beta(bt) {
    comp = lossless_components(beta, n_comp);
    b_eff = gains.b / es.pa_eff();
  }

  Eigen::VectorXd expand(const RVec& x) const {
    Eigen::VectorXd mu(gains.n_bs());
    for (int i = 0; i < gains.n_bs(); ++i) mu(i) = static_cast<double>(x(comp[i]));
    return mu;
  }

  // Most violated constraint of the dual domain at x, if any.
  bool violated(const RVec& x, Cut& cut) const {
    Real worst = 0;
    bool found = false;
    auto consider = [&](Real h, RVec g) {
      if (h > worst) {
        worst = h;
        cut.g = std::move(g);
        cut.depth = h;
        found = true;
      }
    };
    for (int c = 0; c < n_comp; ++c) {
      if (x(c) < 0) {
        RVec g = RVec::Zero(n_comp);
        g(c) = -1;
        consider(-x(c), std::move(g));
      }
    }
    const int n = gains.n_bs();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j || comp[i] == comp[j] || beta(i, j) <= 0.0) continue;
        const Real h = static_cast<Real>(beta(i, j)) * x(comp[j]) - x(comp[i]);
        if (h > 0) {
          RVec g = RVec::Zero(n_comp);
          g(comp[j]) += static_cast<Real>(beta(i, j));
          g(comp[i]) -= 1;
          consider(h, std::move(g));
        }
      }
    if (found) return true;
    // Every MT needs a positive price; only reachable when x sits on a face of the orthant.
    for (int k = 0; k < gains.n_mt(); ++k) {
      Real price = 0;
      RVec g = RVec::Zero(n_comp);
      for (int i = 0; i < n; ++i) {
        price += static_cast<Real>(b_eff(i, k)) * x(comp[i]);
        g(comp[i]) -= static_cast<Real>(b_eff(i, k));
      }
      if (price <= 0) {
        cut.g = g;
        cut.depth = -price;
        return true;
      }
    }
    return false;
  }

  // f(mu) and its reduced-space subgradient at a dual-feasible x, accumulated in extended precision.
  Real evaluate(const RVec& x, RVec& grad) const {
    const int n = gains.n_bs();
    Real f = 0;
    RVec load = RVec::Zero(n);
    for (int k = 0; k < gains.n_mt(); ++k) {
      Real price = 0;
      for (int i = 0; i < n; ++i) price += static_cast<Real>(b_eff(i, k)) * x(comp[i]);
      const Real w = static_cast<Real>(gains.weights(k) * gains.bandwidth_share);
      const Real a = static_cast<Real>(gains.a(k));
      const Real pk = std::max(Real(0), w / (kLn2l * price) - 1 / a);
      f += w * std::log1p(a * pk) / kLn2l - price * pk;
      for (int i = 0; i < n; ++i) load(i) += static_cast<Real>(b_eff(i, k)) * pk;
    }
    grad = RVec::Zero(n_comp);
    for (int i = 0; i < n; ++i) {
      const Real e = static_cast<Real>(es.budget()(i));
      f += x(comp[i]) * e;
      grad(comp[i]) += e - load(i);
    }
    return f;
  }

  // Upper end of a box guaranteed to hold an optimal price vector: beyond it every MT is priced out.
  double price_ceiling() const {
    double u = 0.0;
    for (int k = 0; k < gains.n_mt(); ++k) {
      const double w = gains.weights(k) * gains.bandwidth_share;
      for (int i = 0; i < gains.n_bs(); ++i)
        if (b_eff(i, k) > 0.0) u = std::max(u, w * gains.a(k) / (kLn2 * b_eff(i, k)));
    }
    return u;
  }
};

struct EllipsoidRun {
  RVec best;
  Real best_f = std::numeric_limits<Real>::infinity();
  Real lower = -std::numeric_limits<Real>::infinity();
  int iterations = 0;
  bool converged = false;
};

EllipsoidRun run_ellipsoid(const DualProblem& dp, double tol, int max_iter) {
  const double u = dp.price_ceiling();
  const Real half = static_cast<Real>(u) / 2;
  Ellipsoid ell(RVec::Constant(dp.n_comp, half), Real(1.5) * std::sqrt(static_cast<Real>(dp.n_comp)) * half);

  EllipsoidRun run;
  Cut cut;
  RVec grad;
  for (run.iterations = 0; run.iterations < max_iter; ++run.iterations) {
    const RVec x = ell.center();
    if (dp.violated(x, cut)) {
      if (!ell.cut(cut)) break;
      continue;
    }
    const Real f = dp.evaluate(x, grad);
    if (f < run.best_f) {
      run.best_f = f;
      run.best = x;
    }
    const Real w = ell.width(grad);
    run.lower = std::max(run.lower, f - w);
    if (grad.squaredNorm() == 0 || run.best_f - run.lower <= tol) {
      run.converged = true;
      run.lower = std::min(run.lower, run.best_f);
      break;
    }
    cut.g = grad;
    cut.depth = f - run.best_f;
    if (!ell.cut(cut)) {
      // The deep cut excludes the whole ellipsoid: nothing left beats the incumbent.
      run.lower = run.best_f;
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace

Eigen::VectorXd dual_power_alloc(const ZfGains& gains, const DualState& mu) {
  if (mu.mu.size() != gains.n_bs()) throw DomainError("price vector must have N entries");
  if (mu.mu.minCoeff() < 0.0 || !(mu.mu.maxCoeff() > 0.0)) throw DomainError("prices must be nonnegative and not all zero");
  Eigen::VectorXd p(gains.n_mt());
  for (int k = 0; k < gains.n_mt(); ++k) {
    const double price = gains.b.col(k).dot(mu.mu);
    if (!(price > 0.0)) throw DomainError("MT " + std::to_string(k) + " sees a zero price");
    const double w = gains.weights(k) * gains.bandwidth_share;
    p(k) = std::max(0.0, w / (kLn2 * price) - 1.0 / gains.a(k));
  }
  return p;
}

double dual_function(const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta, const DualState& mu) {
  const auto n = gains.n_bs();
  if (mu.mu.size() != n) throw DomainError("price vector must have N entries");
  if (mu.mu.minCoeff() < 0.0) return kInf;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && beta(i, j) * mu.mu(j) - mu.mu(i) > 0.0) return kInf;
  const Eigen::MatrixXd b_eff = gains.b / es.pa_eff();
  double f = mu.mu.dot(es.budget());
  for (int k = 0; k < gains.n_mt(); ++k) {
    const double price = b_eff.col(k).dot(mu.mu);
    if (!(price > 0.0)) return kInf;
    const double w = gains.weights(k) * gains.bandwidth_share;
    const double pk = std::max(0.0, w / (kLn2 * price) - 1.0 / gains.a(k));
    f += w * std::log2(1.0 + gains.a(k) * pk) - price * pk;
  }
  return f;
}

Eigen::VectorXd dual_subgradient(const ZfGains& gains, const EnergyState& es, const Eigen::VectorXd& p) {
  return es.budget() - demand(gains, es, p);
}

DualResult solve_dual_detailed(const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta, double tol,
                               int max_iter) {
  check_inputs(gains, es, beta);
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const int n = gains.n_bs();
  if (max_iter <= 0) max_iter = 5000 * n * n;

  const DualProblem dp(gains, es, beta);
  const EllipsoidRun run = run_ellipsoid(dp, tol, max_iter);
  if (run.best.size() == 0) {
    throw ConvergenceError("ellipsoid never reached a dual-feasible point", DualState{Eigen::VectorXd::Ones(n)}, kInf);
  }
  DualResult res;
  res.mu.mu = dp.expand(run.best);
  res.value = static_cast<double>(run.best_f);
  res.lower_bound = static_cast<double>(run.lower);
  res.iterations = run.iterations;
  if (!run.converged || run.best_f - run.lower > tol) {
    throw ConvergenceError("ellipsoid method stopped before certifying the tolerance", res.mu,
                           static_cast<double>(run.best_f - run.lower));
  }
  return res;
}

DualState solve_dual(const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta, double tol,
                     int max_iter) {
  return solve_dual_detailed(gains, es, beta, tol, max_iter).mu;
}

Eigen::VectorXd bs_loads(const ZfGains& gains, const Eigen::VectorXd& p) { return gains.b * p; }

Eigen::MatrixXd recover_transfers(const ZfGains& gains, const Eigen::VectorXd& p_star, const EnergyState& es,
                                  const Eigen::MatrixXd& beta) {
  check_inputs(gains, es, beta);
  const auto plan = plan_transfers(demand(gains, es, p_star), es.budget(), beta);
  const double scale = 1.0 + es.budget().sum();
  if (plan.violation.sum() > 1e-9 * scale) {
    throw ConsistencyError("no transfer pattern supports the given powers; they are not primal optimal");
  }
  return make_unidirectional(plan.e, beta);
}

Eigen::VectorXd net_exchange(const ZfGains& gains, const Eigen::VectorXd& p_star, const EnergyState& es) {
  return demand(gains, es, p_star) - es.budget();
}

Solution solve_p1(const ZfGains& gains, const EnergyState& es, const Eigen::MatrixXd& beta, const SolverOptions& opts) {
  check_inputs(gains, es, beta);
  if (!(opts.tol > 0.0)) throw DomainError("tolerance must be positive");

  // Prices are driven far past the requested objective accuracy: the powers recovered from
  // near-optimal prices are off by roughly sqrt(dual gap), and that error shows up as slack.
  const double inner_tol = opts.tol * 1e-10;
  DualResult dual;
  try {
    dual = solve_dual_detailed(gains, es, beta, inner_tol, opts.max_iter);
  } catch (const ConvergenceError& err) {
    if (!(err.certified_gap() <= opts.tol)) throw;
    dual.mu = err.best();
    dual.value = dual_function(gains, es, beta, dual.mu);
    dual.lower_bound = dual.value - err.certified_gap();
  }

  Solution sol;
  sol.mu = dual.mu;
  sol.iterations = dual.iterations;
  sol.p = dual_power_alloc(gains, dual.mu);

  const double scale = 1.0 + es.budget().sum();
  auto plan = plan_transfers(demand(gains, es, sol.p), es.budget(), beta);
  if (plan.violation.sum() > 0.0) {
    // Approximate prices can overshoot the supply slightly; shrink p onto the feasible set.
    sol.p *= supported_fraction(demand(gains, es, sol.p), es.budget(), beta);
    plan = plan_transfers(demand(gains, es, sol.p), es.budget(), beta);
    if (plan.violation.sum() > 1e-9 * scale) throw ConsistencyError("could not restore primal feasibility");
  }
  sol.e = make_unidirectional(plan.e, beta);

  sol.rates.resize(gains.n_mt());
  for (int k = 0; k < gains.n_mt(); ++k) sol.rates(k) = gains.bandwidth_share * std::log2(1.0 + gains.a(k) * sol.p(k));
  sol.objective = weighted_rate_sum(gains, sol.p);
  sol.net_exchange = net_exchange(gains, sol.p, es);
  sol.dual_value = dual.value;
  sol.duality_gap = sol.dual_value - sol.objective;
  return sol;
}

RerouteResult reroute_relay(const Eigen::MatrixXd& e, const Eigen::MatrixXd& beta, int hub, int j_in, int j_out,
                            bool share_freed) {
  RerouteResult res;
  res.e = e;
  const double in = e(j_in, hub);
  const double out = e(hub, j_out);
  if (!(in > 0.0 && out > 0.0) || j_in == hub || j_out == hub) return res;

  double r = 0.0;  // removed from hub -> j_out
  double x = 0.0;  // moved from j_in -> hub onto the direct path (or cancelled)
  if (j_in == j_out) {
    const double b_out = beta(hub, j_out);
    r = b_out > 0.0 ? std::min(out, in / b_out) : out;
    x = b_out * r;
    res.e(hub, j_out) -= r;
    res.e(j_in, hub) -= x;
  } else {
    const double b_direct = beta(j_in, j_out);
    const double b_out = beta(hub, j_out);
    if (b_out > 0.0 && b_direct <= 0.0) return res;  // no direct path to compensate j_out
    r = b_out > 0.0 ? std::min(out, in * b_direct / b_out) : out;
    x = b_out > 0.0 ? b_out * r / b_direct : 0.0;
    res.e(hub, j_out) -= r;
    res.e(j_in, hub) -= x;
    res.e(j_in, j_out) += x;
  }
  res.e(hub, j_out) = std::max(0.0, res.e(hub, j_out));
  res.e(j_in, hub) = std::max(0.0, res.e(j_in, hub));
  res.freed = r - beta(j_in, hub) * x;
  res.applied = true;

  if (share_freed && res.freed > 0.0) {
    const auto n = static_cast<double>(e.rows());
    for (int j = 0; j < e.rows(); ++j)
      if (j != hub) res.e(hub, j) += res.freed / n;
  }
  return res;
}

Eigen::MatrixXd make_unidirectional(Eigen::MatrixXd e, const Eigen::MatrixXd& beta, double tol) {
  const auto n = static_cast<int>(e.rows());
  const int max_steps = 1000 * n * n;
  for (int step = 0; step < max_steps; ++step) {
    bool changed = false;
    for (int hub = 0; hub < n && !changed; ++hub) {
      for (int j_in = 0; j_in < n && !changed; ++j_in) {
        if (j_in == hub || !(e(j_in, hub) > tol)) continue;
        for (int j_out = 0; j_out < n && !changed; ++j_out) {
          if (j_out == hub || !(e(hub, j_out) > tol)) continue;
          auto r = reroute_relay(e, beta, hub, j_in, j_out, false);
          if (r.applied) {
            e = std::move(r.e);
            changed = true;
          }
        }
      }
    }
    if (!changed) break;
  }
  return e;
}

}  // namespace ecoop
