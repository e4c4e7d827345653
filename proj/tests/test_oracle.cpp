#include "doctest.h"

#include <random>

#include "ecoop/errors.hpp"
#include "ecoop/oracle.hpp"
#include "helpers.hpp"

using namespace ecoop;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

ZfGains scalar_gains(double a) {
  ZfGains g;
  g.a = VectorXd::Constant(1, a);
  g.b = MatrixXd::Ones(1, 1);
  g.weights = VectorXd::Ones(1);
  return g;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("water-filling") {
  CHECK(oracle::waterfill_sum_power(VectorXd::Ones(2), Vector2d(1, 2), Vector2d(1, 1), 0.0).isZero());
  CHECK(oracle::waterfill_sum_power(VectorXd::Ones(1), VectorXd::Constant(1, 0.3), VectorXd::Constant(1, 2.0), 5.0)(0) ==
        doctest::Approx(2.5));
  const VectorXd p = oracle::waterfill_sum_power(VectorXd::Ones(2), Vector2d(1, 2), Vector2d(1, 1), 3.0);
  CHECK(p(0) == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(p(1) == doctest::Approx(1.75).epsilon(1e-12));
  CHECK_THROWS_AS(oracle::waterfill_sum_power(VectorXd::Ones(1), VectorXd::Ones(1), VectorXd::Ones(1), -1.0), DomainError);

  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd w(4), a(4), c(4);
    for (int k = 0; k < 4; ++k) {
      w(k) = u(rng);
      a(k) = u(rng);
      c(k) = u(rng);
    }
    const double budget = 4.0 * u(rng);
    const VectorXd q = oracle::waterfill_sum_power(w, a, c, budget);
    CHECK(c.dot(q) == doctest::Approx(budget).epsilon(1e-10));
    // Common level: marginal utility per unit cost equal on active MTs and no larger on idle ones.
    double level = -1.0;
    for (int k = 0; k < 4; ++k)
      if (q(k) > 0.0) level = w(k) * a(k) / (c(k) * (1.0 + a(k) * q(k)));
    REQUIRE(level > 0.0);
    for (int k = 0; k < 4; ++k) {
      const double m = w(k) * a(k) / (c(k) * (1.0 + a(k) * q(k)));
      if (q(k) > 0.0) CHECK(m == doctest::Approx(level).epsilon(1e-10));
      else CHECK(m <= level * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("KKT residual") {
  const auto g = scalar_gains(1.0);
  const auto es = EnergyState::from_budgets(VectorXd::Constant(1, 3.0));
  const MatrixXd beta = MatrixXd::Zero(1, 1);
  Solution exact;
  exact.p = VectorXd::Constant(1, 3.0);
  exact.e = MatrixXd::Zero(1, 1);
  exact.mu.mu = VectorXd::Constant(1, 1.0 / (4.0 * std::log(2.0)));
  CHECK(oracle::kkt_residual(exact, g, es, beta) <= 1e-10);

  Solution off = exact;
  off.p *= 1.01;
  CHECK(oracle::kkt_residual(off, g, es, beta) >= 0.01);

  const auto empty = EnergyState::from_budgets(VectorXd::Zero(1));
  const auto sol = solve_p1(g, empty, beta);
  CHECK(sol.p.isZero());
  CHECK(sol.e.isZero());
  CHECK(oracle::kkt_residual(sol, g, empty, beta) <= 1e-10);
}

TEST_CASE("grid search") {
  SUBCASE("lossless sharing reproduces water-filling") {
    ZfGains g;
    g.a = Vector2d(1.5, 1.5);
    g.b = (MatrixXd(2, 2) << 0.6, 0.4, 0.4, 0.6).finished();
    g.weights = VectorXd::Ones(2);
    const auto es = EnergyState::from_budgets(Vector2d(1.0, 1.0));
    const auto r = oracle::grid_search_p1(g, es, uniform_beta(2, 1.0));
    const VectorXd p = oracle::waterfill_sum_power(g.weights, g.a, Vector2d(1.0, 1.0), 2.0);
    const double ref = std::log2(1.0 + 1.5 * p(0)) + std::log2(1.0 + 1.5 * p(1));
    CHECK(r.objective == doctest::Approx(ref).epsilon(1e-3));
    CHECK(r.objective <= ref + 1e-12);
  }
  SUBCASE("an empty BS without sharing gives zero") {
    std::mt19937_64 rng(83);
    const auto g = zf_gains(testing::random_channel(rng, 2, 1, 2), VectorXd::Ones(2));
    CHECK(oracle::grid_search_p1(g, EnergyState::from_budgets(Vector2d(0.0, 7.0)), uniform_beta(2, 0.0)).objective == 0.0);
  }
  SUBCASE("dimension guard") {
    std::mt19937_64 rng(89);
    const auto g = zf_gains(testing::random_channel(rng, 3, 1, 3), VectorXd::Ones(3));
    CHECK_THROWS_AS(oracle::grid_search_p1(g, EnergyState::from_budgets(VectorXd::Ones(3)), uniform_beta(3, 0.5)),
                    UnsupportedError);
  }
  SUBCASE("returned point is feasible") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 5; ++trial) {
      const auto g = zf_gains(testing::random_channel(rng, 2, 1, 2), VectorXd::Ones(2));
      const VectorXd E = testing::random_budgets(rng, 2, 20.0);
      const MatrixXd beta = uniform_beta(2, 0.5);
      const auto r = oracle::grid_search_p1(g, EnergyState::from_budgets(E), beta);
      for (int i = 0; i < 2; ++i) CHECK(g.b.row(i).dot(r.p) <= testing::supply(E, beta, r.e, i) + 1e-9);
      CHECK(r.p.minCoeff() >= 0.0);
      CHECK(r.e.minCoeff() >= 0.0);
    }
  }
}

}  // TEST_SUITE
