#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <random>

#include "oracles.hpp"
#include "sigtrade/moments.hpp"
#include "sigtrade/optimize.hpp"

using namespace sigtrade;

namespace {

// synthetic well-conditioned moments of the right shape for (d, N, M)
SigMoments random_moments(std::mt19937_64& rng, std::size_t d, std::size_t N, int M) {
  SigMoments m;
  m.d = d;
  m.N = N;
  m.M = M;
  const auto dim = static_cast<Eigen::Index>(m.dim());
  std::normal_distribution<double> g;
  m.mu.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) m.mu(i) = 0.05 * g(rng);
  Eigen::MatrixXd A(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) A(i, j) = g(rng);
  m.sigma = A * A.transpose() / static_cast<double>(dim) +
            0.05 * Eigen::MatrixXd::Identity(dim, dim);
  return m;
}

}  // namespace

TEST_CASE("single-asset closed form worked through by hand") {
  SigMoments m;
  m.d = 1;
  m.N = 0;
  m.M = 0;
  m.mu = Eigen::VectorXd::Constant(1, 0.1);
  m.sigma = Eigen::MatrixXd::Constant(1, 1, 0.04);

  const auto s = solve(m, 0.04);
  CHECK(s.lambda == Catch::Approx(1.25));
  CHECK(s.ell(0) == Catch::Approx(1.0));
  CHECK_FALSE(s.degenerate);

  const auto [mean, var] = evaluate(s, m);
  CHECK(mean == Catch::Approx(0.1));
  CHECK(var == Catch::Approx(0.04));
}

TEST_CASE("solution matches an independently coded mean-variance optimum") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = random_moments(rng, 2, 0, 1);
    const double delta = 0.01 * (1 + rep % 4);
    const auto s = solve(m, delta);
    const auto want = oracles::markowitz_closed_form(m.mu, m.sigma, delta);
    CHECK(s.lambda == Catch::Approx(want.lambda).epsilon(1e-10));
    for (Eigen::Index i = 0; i < s.ell.size(); ++i)
      CHECK(s.ell(i) == Catch::Approx(want.weights(i)).margin(1e-10));
  }
}

TEST_CASE("the variance budget binds and first-order conditions hold") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t d = 1 + rep % 2;
    const std::size_t N = (rep / 2) % 2;
    const int M = rep % 3;
    const auto m = random_moments(rng, d, N, M);
    const double delta = 0.02;
    const auto s = solve(m, delta);

    const auto [mean, var] = evaluate(s, m);
    CHECK(var == Catch::Approx(delta).epsilon(1e-8));
    CHECK(mean > 0.0);
    CHECK(s.lambda > 0.0);

    // stationarity: 2 lambda sigma l = mu
    const Eigen::VectorXd foc = 2.0 * s.lambda * (m.sigma * s.ell) - m.mu;
    CHECK(foc.lpNorm<Eigen::Infinity>() <
          1e-8 * std::max(1.0, m.mu.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("optimal strategies scale with the square root of the budget") {
  std::mt19937_64 rng(29);
  const auto m = random_moments(rng, 2, 1, 1);
  const auto s1 = solve(m, 0.01);
  const auto s4 = solve(m, 0.04);
  for (Eigen::Index i = 0; i < s1.ell.size(); ++i)
    CHECK(s4.ell(i) == Catch::Approx(2.0 * s1.ell(i)).margin(1e-12));
  CHECK(s4.lambda == Catch::Approx(0.5 * s1.lambda).epsilon(1e-12));

  const auto [e1, v1] = evaluate(s1, m);
  const auto [e4, v4] = evaluate(s4, m);
  CHECK(e4 == Catch::Approx(2.0 * e1).epsilon(1e-10));
}

TEST_CASE("a flat mean produces the degenerate zero strategy") {
  std::mt19937_64 rng(5);
  auto m = random_moments(rng, 1, 0, 1);
  m.mu.setZero();
  const auto s = solve(m, 0.01);
  CHECK(s.degenerate);
  CHECK(s.lambda == 0.0);
  CHECK(s.ell.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("singular covariance fails loudly unless ridged") {
  SigMoments m;
  m.d = 2;
  m.N = 0;
  m.M = 0;
  m.mu = Eigen::Vector2d(0.1, 0.1);
  m.sigma = Eigen::Matrix2d::Zero();
  m.sigma(0, 0) = 1.0;  // second asset has no variance at all
  CHECK_THROWS_WITH(solve(m, 0.01),
                    Catch::Matchers::ContainsSubstring("singular"));
  CHECK_NOTHROW(solve(m, 0.01, 1e-6));
}

TEST_CASE("solver rejects bad budgets and shapes") {
  std::mt19937_64 rng(7);
  const auto m = random_moments(rng, 1, 0, 1);
  CHECK_THROWS_AS(solve(m, 0.0), error);
  CHECK_THROWS_AS(solve(m, -1.0), error);
  CHECK_THROWS_AS(solve(m, 0.01, -1e-3), error);

  auto bad = m;
  bad.mu = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(solve(bad, 0.01), error);
}

TEST_CASE("frontier is a square-root curve traced one budget at a time") {
  std::mt19937_64 rng(11);
  const auto m = random_moments(rng, 2, 0, 1);
  const std::vector<double> grid{0.0025, 0.01, 0.04, 0.16};
  const auto pts = frontier(m, grid);
  REQUIRE(pts.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(pts[i].delta == grid[i]);
    CHECK(pts[i].variance == Catch::Approx(grid[i]).epsilon(1e-8));
  }
  // doubling sqrt(budget) doubles the expected pnl
  CHECK(pts[1].expected_pnl == Catch::Approx(2.0 * pts[0].expected_pnl).epsilon(1e-8));
  CHECK(pts[3].expected_pnl == Catch::Approx(4.0 * pts[1].expected_pnl).epsilon(1e-8));
  CHECK_THROWS_AS(frontier(m, {}), error);
}

TEST_CASE("perturbed strategies on the same budget never beat the optimum") {
  std::mt19937_64 rng(13);
  const auto m = random_moments(rng, 2, 1, 1);
  const double delta = 0.02;
  const auto s = solve(m, delta);
  const auto [best, var] = evaluate(s, m);

  const auto cloud = perturb_cloud(s, m, 500, 0.25, 999);
  REQUIRE(cloud.size() == 500);
  for (const auto& pt : cloud) {
    CHECK(pt.expected_pnl <= best + 1e-8 * (1.0 + std::abs(best)));
    CHECK(pt.variance == Catch::Approx(delta).epsilon(1e-8));
  }

  // zero magnitude reproduces the optimum itself
  const auto same = perturb_cloud(s, m, 3, 0.0, 1);
  for (const auto& pt : same) CHECK(pt.expected_pnl == Catch::Approx(best).epsilon(1e-12));
}
