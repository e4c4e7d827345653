#include "doctest.h"

#include <random>

#include "ecoop/energy.hpp"
#include "ecoop/errors.hpp"
#include "ecoop/lp.hpp"
#include "helpers.hpp"

using namespace ecoop;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

MatrixXd transfers2(double e12, double e21) {
  MatrixXd e = MatrixXd::Zero(2, 2);
  e(0, 1) = e12;
  e(1, 0) = e21;
  return e;
}

// Largest P_2 reachable at a given P_1 by sweeping the single useful transfer direction.
double max_p2(const Vector2d& E, double beta, double p1) {
  if (p1 <= E(0)) return E(1) + beta * (E(0) - p1);
  return E(1) - (p1 - E(0)) / beta;
}

bool region_contains(const std::vector<Vector2d>& boundary, const Vector2d& p) {
  // Boundary is a monotone frontier sampled left to right; interpolate.
  if (p(0) < -1e-12 || p(1) < -1e-12) return false;
  for (std::size_t s = 0; s + 1 < boundary.size(); ++s) {
    const Vector2d& a = boundary[s];
    const Vector2d& b = boundary[s + 1];
    if (p(0) >= a(0) - 1e-12 && p(0) <= b(0) + 1e-12) {
      const double t = b(0) > a(0) ? (p(0) - a(0)) / (b(0) - a(0)) : 0.0;
      return p(1) <= a(1) + t * (b(1) - a(1)) + 1e-9;
    }
  }
  return false;
}

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("energy state budgets") {
  const EnergyState es(VectorXd::Constant(2, 3.0), 2.0, 1.5);
  CHECK(es.budget()(0) == doctest::Approx(3.5));
  CHECK(es.pa_eff() == 1.0);
  CHECK_THROWS_AS(EnergyState(VectorXd::Ones(2), 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(EnergyState(-VectorXd::Ones(2), 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(EnergyState(VectorXd::Ones(2), 1.0, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(EnergyState(VectorXd(), 1.0, 0.0), DomainError);
  const auto direct = EnergyState::from_budgets(VectorXd::Constant(3, 7.0));
  CHECK(direct.budget() == VectorXd::Constant(3, 7.0));
}

TEST_CASE("beta validation") {
  CHECK_NOTHROW(validate_beta(uniform_beta(3, 0.5)));
  CHECK_NOTHROW(validate_beta(uniform_beta(3, 0.0)));
  CHECK_NOTHROW(validate_beta(uniform_beta(3, 1.0)));
  MatrixXd b = uniform_beta(2, 0.5);
  b(0, 1) = 1.2;
  CHECK_THROWS_AS(validate_beta(b), DomainError);
  MatrixXd relay = uniform_beta(3, 0.9);
  relay(0, 2) = 0.5;  // 0 -> 1 -> 2 delivers 0.81
  CHECK_THROWS_AS(validate_beta(relay), DomainError);
  CHECK(all_interior(uniform_beta(3, 0.5)));
  CHECK_FALSE(all_interior(uniform_beta(3, 1.0)));
}

TEST_CASE("available power") {
  const auto es = EnergyState::from_budgets(Vector2d(10.0, 0.0));
  CHECK(available_power(es, TransferModel::none(uniform_beta(2, 0.5)), 0) == 10.0);
  const TransferModel lossless(uniform_beta(2, 1.0), transfers2(10.0, 0.0));
  CHECK(available_power(es, lossless, 0) == 0.0);
  CHECK(available_power(es, lossless, 1) == 10.0);
  const TransferModel half(uniform_beta(2, 0.5), transfers2(10.0, 0.0));
  CHECK(available_power(es, half, 1) == 5.0);
  CHECK(available_power(es, half, 0) == 0.0);
  const TransferModel over(uniform_beta(2, 0.5), transfers2(12.0, 0.0));
  CHECK(available_power(es, over, 0) == -2.0);
  const EnergyState lossy(Vector2d(4.0, 2.0), 0.0, 0.0, 0.5);
  CHECK(available_power(lossy, TransferModel::none(uniform_beta(2, 0.5)), 0) == 2.0);
  CHECK_THROWS_AS(TransferModel(uniform_beta(2, 0.5), transfers2(-1.0, 0.0)), DomainError);
}

TEST_CASE("grid neutrality") {
  const auto zero = grid_neutrality_check(TransferModel::none(uniform_beta(2, 0.5)));
  CHECK(zero.injected == 0.0);
  CHECK(zero.drawn == 0.0);
  CHECK(zero.lost == 0.0);
  const auto one = grid_neutrality_check(TransferModel(uniform_beta(2, 0.75), transfers2(4.0, 0.0)));
  CHECK(one.injected == 4.0);
  CHECK(one.drawn == 3.0);
  CHECK(one.lost == 1.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 4;
    MatrixXd e = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) e(i, j) = u(rng);
    const auto g = grid_neutrality_check(TransferModel(testing::random_interior_beta(rng, n), e));
    CHECK(std::abs(g.injected - g.drawn - g.lost) <= 1e-12);
  }
}

TEST_CASE("power region: corners of the extreme cases") {
  const Vector2d E(6.0, 4.0);
  const auto rect = power_region_boundary(E, uniform_beta(2, 0.0), 11);
  REQUIRE_FALSE(rect.empty());
  for (const auto& p : rect) {
    CHECK(p(0) <= 6.0 + 1e-12);
    CHECK(p(1) <= 4.0 + 1e-12);
    CHECK((std::abs(p(0) - 6.0) < 1e-12 || std::abs(p(1) - 4.0) < 1e-12));
  }
  CHECK(region_contains(rect, E));
  CHECK_FALSE(region_contains(rect, Vector2d(6.5, 0.0)));

  const auto simplex = power_region_boundary(E, uniform_beta(2, 1.0), 21);
  for (const auto& p : simplex) CHECK(p.sum() == doctest::Approx(10.0));
  CHECK(simplex.front()(0) == doctest::Approx(0.0));
  CHECK(simplex.back()(1) == doctest::Approx(0.0));
}

TEST_CASE("power region at beta 0.5") {
  const Vector2d E(10.0, 10.0);
  const auto pts = power_region_boundary(E, uniform_beta(2, 0.5), 41);
  CHECK(region_contains(pts, Vector2d(10.0, 10.0)));
  CHECK(region_contains(pts, Vector2d(0.0, 15.0)));
  CHECK(region_contains(pts, Vector2d(15.0, 0.0)));
  CHECK_FALSE(region_contains(pts, Vector2d(0.0, 15.1)));
  CHECK_FALSE(region_contains(pts, Vector2d(10.1, 10.0)));
  CHECK(pts.front()(1) == doctest::Approx(15.0));
  CHECK(pts.back()(0) == doctest::Approx(15.0));
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    CHECK(pts[s](0) <= pts[s + 1](0) + 1e-12);
    CHECK(pts[s](1) >= pts[s + 1](1) - 1e-12);
  }
  for (const auto& p : pts) CHECK(p(1) == doctest::Approx(max_p2(E, 0.5, p(0))));
  CHECK_THROWS_AS(power_region_boundary(VectorXd::Ones(3), uniform_beta(3, 0.5), 10), UnsupportedError);
}

TEST_CASE("power region: boundary points need only one-way transfers") {
  const Vector2d E(3.0, 8.0);
  const MatrixXd beta = uniform_beta(2, 0.6);
  for (const auto& p : power_region_boundary(E, beta, 25)) {
    const auto plan = plan_transfers(p, E, beta);
    CHECK(plan.violation.sum() <= 1e-9);
    CHECK(std::min(plan.e(0, 1), plan.e(1, 0)) <= 1e-12);
  }
}

TEST_CASE("power regions nest in beta") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Vector2d E = testing::random_budgets(rng, 2, 20.0);
    const double lo = u(rng), hi = lo + (1.0 - lo) * u(rng);
    const auto inner = power_region_boundary(E, uniform_beta(2, lo), 15);
    const auto outer = power_region_boundary(E, uniform_beta(2, hi), 15);
    for (const auto& p : inner) CHECK(region_contains(outer, p));
  }
}

TEST_CASE("sampled nesting with three BSs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int hits = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const VectorXd E = testing::random_budgets(rng, 3, 10.0);
    const MatrixXd lo = testing::random_interior_beta(rng, 3);
    MatrixXd hi = lo;
    for (bool ok = false; !ok;) {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (i != j) hi(i, j) = lo(i, j) + (0.99 - lo(i, j)) * u(rng);
      try {
        validate_beta(hi);
        ok = true;
      } catch (const DomainError&) {
      }
    }
    VectorXd p(3);
    for (int i = 0; i < 3; ++i) p(i) = u(rng) * 1.5 * E.sum() / 3.0;
    const bool in_lo = power_feasible(p, E, lo);
    if (in_lo) ++hits;
    if (in_lo) CHECK(power_feasible(p, E, hi));
    CHECK(power_feasible(p, E, MatrixXd::Constant(3, 3, 1.0)) == (p.sum() <= E.sum() + 1e-9));
    if (power_feasible(p, E, uniform_beta(3, 0.0))) CHECK(in_lo);
  }
  CHECK(hits > 30);
}

TEST_CASE("transfer plans") {
  const MatrixXd beta = uniform_beta(2, 0.5);
  SUBCASE("covered loads need no transfer") {
    const auto plan = plan_transfers(Vector2d(3.0, 1.0), Vector2d(4.0, 2.0), beta);
    CHECK(plan.e.isZero());
    CHECK(plan.violation.isZero());
  }
  SUBCASE("shortfall is covered by the partner") {
    const auto plan = plan_transfers(Vector2d(12.0, 0.0), Vector2d(10.0, 4.0), beta);
    CHECK(plan.e(1, 0) == doctest::Approx(4.0));
    CHECK(plan.e(0, 1) == doctest::Approx(0.0));
    CHECK(plan.violation.sum() == doctest::Approx(0.0));
  }
  SUBCASE("infeasible loads report the residual shortfall") {
    const auto plan = plan_transfers(Vector2d(14.0, 0.0), Vector2d(10.0, 4.0), beta);
    CHECK(plan.violation.sum() == doctest::Approx(2.0));
  }
  SUBCASE("zero efficiency carries no transfer") {
    MatrixXd one_way = beta;
    one_way(1, 0) = 0.0;
    const auto plan = plan_transfers(Vector2d(12.0, 0.0), Vector2d(10.0, 4.0), one_way);
    CHECK(plan.e(1, 0) == 0.0);
    CHECK(plan.violation.sum() == doctest::Approx(2.0));
  }
}

}  // TEST_SUITE

TEST_SUITE("lp") {

TEST_CASE("textbook optimum") {
  // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
  MatrixXd A(3, 2);
  A << 1, 0, 0, 2, 3, 2;
  const auto r = lp::minimize(Eigen::Vector2d(-3, -5), A, Eigen::Vector3d(4, 12, 18));
  REQUIRE(r.status == lp::Status::optimal);
  CHECK(r.objective == doctest::Approx(-36.0));
  CHECK(r.x(0) == doctest::Approx(2.0));
  CHECK(r.x(1) == doctest::Approx(6.0));
}

TEST_CASE("negative right-hand sides go through phase one") {
  // min x + y  s.t. x + y >= 2, x - y <= 1
  MatrixXd A(2, 2);
  A << -1, -1, 1, -1;
  const auto r = lp::minimize(Eigen::Vector2d(1, 1), A, Eigen::Vector2d(-2, 1));
  REQUIRE(r.status == lp::Status::optimal);
  CHECK(r.objective == doctest::Approx(2.0));
  CHECK((A * r.x - Eigen::Vector2d(-2, 1)).maxCoeff() <= 1e-12);
}

TEST_CASE("infeasible and unbounded") {
  MatrixXd A(2, 1);
  A << 1, -1;
  CHECK(lp::minimize(VectorXd::Ones(1), A, Eigen::Vector2d(1, -2)).status == lp::Status::infeasible);
  MatrixXd B(1, 2);
  B << 1, -1;
  CHECK(lp::minimize(Eigen::Vector2d(-1, 0), B, VectorXd::Ones(1)).status == lp::Status::unbounded);
  CHECK_THROWS_AS(lp::minimize(VectorXd::Ones(3), B, VectorXd::Ones(1)), DomainError);
}

TEST_CASE("degenerate vertex does not cycle") {
  // Beale's cycling example.
  MatrixXd A(3, 4);
  A << 0.25, -60, -0.04, 9, 0.5, -90, -0.02, 3, 0, 0, 1, 0;
  Eigen::Vector4d c(-0.75, 150, -0.02, 6);
  const auto r = lp::minimize(c, A, Eigen::Vector3d(0, 0, 1));
  REQUIRE(r.status == lp::Status::optimal);
  CHECK(r.objective == doctest::Approx(-0.05));
}

TEST_CASE("random LPs satisfy weak duality against a dual solve") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + trial % 4, n = 2 + trial % 3;
    MatrixXd A(m, n);
    VectorXd b(m), c(n);
    for (int i = 0; i < m; ++i) {
      b(i) = u(rng);
      for (int j = 0; j < n; ++j) A(i, j) = u(rng);
    }
    for (int j = 0; j < n; ++j) c(j) = -u(rng);
    const auto primal = lp::minimize(c, A, b);
    // dual: max -b'y s.t. -A'y <= c, y >= 0  ==  min b'y s.t. -A'y <= c
    const auto dual = lp::minimize(b, -A.transpose(), c);
    REQUIRE(primal.status == lp::Status::optimal);
    REQUIRE(dual.status == lp::Status::optimal);
    CHECK(primal.objective == doctest::Approx(-dual.objective).epsilon(1e-9));
    CHECK((A * primal.x - b).maxCoeff() <= 1e-10);
    CHECK(primal.x.minCoeff() >= -1e-12);
  }
}

}  // TEST_SUITE
