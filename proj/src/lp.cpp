#include "ecoop/lp.hpp"

#include <limits>
#include <vector>

#include "ecoop/errors.hpp"

namespace ecoop::lp {

namespace {

// Smallest usable pivot element. Nearly opposite transfer columns (beta close to 1 both
// ways) produce entries around 1 - beta^2; pivoting on those destroys the tableau.
constexpr double kPivotTol = 1e-9;

class Tableau {
public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double& at(Eigen::Index r, Eigen::Index c) { return t_(r, c); }
  double& rhs(Eigen::Index r) { return t_(r, cols()); }
  double cost(Eigen::Index c) const { return t_(rows(), c); }
  double objective() const { return -t_(rows(), cols()); }
  std::vector<Eigen::Index>& basis() { return basis_; }

  void set_costs(const Eigen::VectorXd& c) {
    t_.row(rows()).setZero();
    t_.row(rows()).head(c.size()) = c.transpose();
    for (Eigen::Index r = 0; r < rows(); ++r) {
      const double cb = c(basis_[static_cast<std::size_t>(r)]);
      if (cb != 0.0) t_.row(rows()) -= cb * t_.row(r);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i <= rows(); ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Runs Bland's-rule iterations over columns [0, allowed). Returns false when unbounded.
  bool optimize(Eigen::Index allowed, double tol, int& pivots) {
    const int max_pivots = 50'000;
    while (pivots < max_pivots) {
      Eigen::Index enter = -1;
      for (Eigen::Index c = 0; c < allowed; ++c) {
        if (cost(c) < -tol) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return true;

      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < rows(); ++r) {
        const double a = t_(r, enter);
        if (a <= kPivotTol) continue;
        const double ratio = t_(r, cols()) / a;
        if (leave < 0 || ratio < best - tol) {
          best = ratio;
          leave = r;
        } else if (ratio <= best + tol &&
                   basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)]) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      ++pivots;
    }
    throw ConsistencyError("simplex exceeded its pivot budget");
  }

private:
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

Result minimize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (c.size() != n || b.size() != m) throw DomainError("LP dimensions disagree");

  Eigen::Index n_art = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (b(i) < 0.0) ++n_art;

  // Columns: x (n), slacks (m), artificials (n_art).
  const Eigen::Index n_struct = n + m;
  Tableau tab(m, n_struct + n_art);
  Eigen::Index art = n_struct;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < n; ++j) tab.at(i, j) = sign * A(i, j);
    tab.at(i, n + i) = sign;
    tab.rhs(i) = sign * b(i);
    if (sign < 0.0) {
      tab.at(i, art) = 1.0;
      tab.basis()[static_cast<std::size_t>(i)] = art++;
    } else {
      tab.basis()[static_cast<std::size_t>(i)] = n + i;
    }
  }

  Result res;
  if (n_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n_struct + n_art);
    phase1.tail(n_art).setOnes();
    tab.set_costs(phase1);
    tab.optimize(n_struct + n_art, tol, res.pivots);
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    if (tab.objective() > tol * scale * 10.0) {
      res.status = Status::infeasible;
      res.objective = tab.objective();
      return res;
    }
    // Drive remaining (zero-valued) artificials out of the basis on the largest entry of
    // their row; a tiny pivot here blows the row up. Rows with nothing usable are redundant.
    for (Eigen::Index r = 0; r < m; ++r) {
      if (tab.basis()[static_cast<std::size_t>(r)] < n_struct) continue;
      Eigen::Index best = -1;
      for (Eigen::Index col = 0; col < n_struct; ++col)
        if (best < 0 || std::abs(tab.at(r, col)) > std::abs(tab.at(r, best))) best = col;
      if (best >= 0 && std::abs(tab.at(r, best)) > kPivotTol) {
        tab.pivot(r, best);
        ++res.pivots;
      }
    }
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n_struct + n_art);
  phase2.head(n) = c;
  tab.set_costs(phase2);
  if (!tab.optimize(n_struct, tol, res.pivots)) {
    res.status = Status::unbounded;
    return res;
  }

  res.status = Status::optimal;
  res.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index col = tab.basis()[static_cast<std::size_t>(r)];
    if (col < n) res.x(col) = std::max(0.0, tab.rhs(r));
  }
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace ecoop::lp
