#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include "sigtrade/moments.hpp"
#include "sigtrade/simulate.hpp"

using namespace sigtrade;

namespace {

// per-sample PnL attribution vector, computed without any shuffle algebra:
// entry (m, w) is the coefficient of w with the asset's lead letter appended,
// read off the sample's lead-lag signature directly
Eigen::MatrixXd attribution_rows(const SampleSet& set, int M) {
  const auto words = enumerate_words(set.N + set.d + 1, M);
  const std::size_t dim = set.d * words.size();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(set.samples.size()),
                       static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    const auto sig = signature_of_path(lead_lag(to_sampled(set.samples[i])), M + 1);
    Eigen::Index col = 0;
    for (std::size_t m = 1; m <= set.d; ++m)
      for (const auto& w : words)
        rows(static_cast<Eigen::Index>(i), col++) = sig.coeff(pnl_word(w, set.d, set.N, m));
  }
  return rows;
}

}  // namespace

TEST_CASE("lead letters sit past the lag block") {
  CHECK(shift_letter(2, 1, 1) == 5);
  CHECK(shift_letter(2, 1, 2) == 6);
  CHECK(shift_letter(1, 0, 1) == 3);
  CHECK(shift_letter(1, 1, 1) == 4);
  CHECK_THROWS_AS(shift_letter(2, 1, 3), error);
  CHECK_THROWS_AS(shift_letter(2, 1, 0), error);
}

TEST_CASE("moment dimensions follow the word count") {
  PairsConfig cfg;
  cfg.n_steps = 6;
  const auto set = simulate_pairs(cfg, 21, 50);

  SignalMarketConfig scfg;
  scfg.n_steps = 6;
  const auto sset = simulate_signal_market(scfg, 22, 50);

  const auto E = expected_signature(sset, 6);
  CHECK(E.alphabet() == 6);  // 2 * (1 + 1 + 1) with time
  CHECK(E.sample_count == 50);

  const auto m2 = build_moments(E, 2);
  CHECK(m2.words_per_asset() == 13);  // 1 + 3 + 9 over the (t, X, f) alphabet
  CHECK(m2.dim() == 13);
  CHECK(m2.mu.size() == 13);
  CHECK(m2.sigma.rows() == 13);

  const auto E2 = expected_signature(set, 6);
  const auto m = build_moments(E2, 2);
  CHECK(m.words_per_asset() == 13);
  CHECK(m.dim() == 26);
}

TEST_CASE("order-zero moments are the plain return mean and covariance") {
  PairsConfig cfg;
  cfg.n_steps = 8;
  const auto set = simulate_pairs(cfg, 31, 120);
  const auto E = expected_signature(set, 2);
  const auto m = build_moments(E, 0);
  REQUIRE(m.dim() == 2);

  // direct estimates from terminal returns
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : set.samples) {
    mean(0) += p.at(8, 0) - p.at(0, 0);
    mean(1) += p.at(8, 1) - p.at(0, 1);
  }
  mean /= static_cast<double>(set.samples.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : set.samples) {
    Eigen::Vector2d r{p.at(8, 0) - p.at(0, 0), p.at(8, 1) - p.at(0, 1)};
    cov += (r - mean) * (r - mean).transpose();
  }
  cov /= static_cast<double>(set.samples.size());

  for (int i = 0; i < 2; ++i) {
    CHECK(m.mu(i) == Catch::Approx(mean(i)).margin(1e-12));
    for (int j = 0; j < 2; ++j)
      CHECK(m.sigma(i, j) == Catch::Approx(cov(i, j)).margin(1e-12));
  }
}

TEST_CASE("shuffle covariance equals the covariance of per-sample attributions") {
  PairsConfig cfg;
  cfg.n_steps = 5;
  const auto set = simulate_pairs(cfg, 41, 60);
  const int M = 1;
  const auto E = expected_signature(set, 2 * M + 2);
  const auto m = build_moments(E, M);

  const Eigen::MatrixXd rows = attribution_rows(set, M);
  const Eigen::VectorXd mean = rows.colwise().mean();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m.mu.size(), m.mu.size());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const Eigen::VectorXd r = rows.row(i).transpose() - mean;
    cov += r * r.transpose();
  }
  cov /= static_cast<double>(rows.rows());

  for (Eigen::Index i = 0; i < m.mu.size(); ++i) {
    CHECK(m.mu(i) == Catch::Approx(mean(i)).margin(1e-12));
    for (Eigen::Index j = 0; j < m.mu.size(); ++j)
      CHECK(m.sigma(i, j) == Catch::Approx(cov(i, j)).margin(1e-10));
  }
}

TEST_CASE("signal-market attribution covariance also matches") {
  SignalMarketConfig cfg;
  cfg.n_steps = 5;
  const auto set = simulate_signal_market(cfg, 43, 40);
  const int M = 1;
  const auto E = expected_signature(set, 2 * M + 2);
  const auto m = build_moments(E, M);

  const Eigen::MatrixXd rows = attribution_rows(set, M);
  const Eigen::VectorXd mean = rows.colwise().mean();
  for (Eigen::Index i = 0; i < m.mu.size(); ++i)
    CHECK(m.mu(i) == Catch::Approx(mean(i)).margin(1e-12));

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m.mu.size(), m.mu.size());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const Eigen::VectorXd r = rows.row(i).transpose() - mean;
    cov += r * r.transpose();
  }
  cov /= static_cast<double>(rows.rows());
  for (Eigen::Index i = 0; i < m.mu.size(); ++i)
    for (Eigen::Index j = 0; j < m.mu.size(); ++j)
      CHECK(m.sigma(i, j) == Catch::Approx(cov(i, j)).margin(1e-10));
}

TEST_CASE("covariance assembly demands twice the order plus two") {
  PairsConfig cfg;
  cfg.n_steps = 4;
  const auto set = simulate_pairs(cfg, 51, 10);
  const auto E = expected_signature(set, 5);
  CHECK_NOTHROW(build_mu_sig(E, 2));                 // needs order 3
  CHECK_NOTHROW(build_sigma_sig(E, 1));              // needs order 4
  CHECK_THROWS_WITH(build_sigma_sig(E, 2),           // needs order 6
                    Catch::Matchers::ContainsSubstring("order 6"));
  CHECK_THROWS_WITH(build_mu_sig(E, 5),
                    Catch::Matchers::ContainsSubstring("order 6"));
}

TEST_CASE("coefficient budget refuses oversized configurations") {
  PairsConfig cfg;
  cfg.n_steps = 3;
  const auto set = simulate_pairs(cfg, 61, 2);
  CHECK_THROWS_WITH(expected_signature(set, 10, 1000),
                    Catch::Matchers::ContainsSubstring("budget"));
  CHECK_NOTHROW(check_coeff_budget(6, 8));
  CHECK_THROWS_AS(check_coeff_budget(6, 8, 100), error);
}

TEST_CASE("expected signature is deterministic across calls") {
  PairsConfig cfg;
  cfg.n_steps = 5;
  const auto set = simulate_pairs(cfg, 71, 20);
  const auto a = expected_signature(set, 4);
  const auto b = expected_signature(set, 4);
  CHECK(a.mean.data() == b.mean.data());
}

TEST_CASE("moment validation flags non-covariances") {
  PairsConfig cfg;
  cfg.n_steps = 5;
  const auto set = simulate_pairs(cfg, 81, 40);
  const auto E = expected_signature(set, 4);
  auto m = build_moments(E, 1);
  CHECK_NOTHROW(validate_moments(m));

  m.sigma(0, 0) = -1.0;
  CHECK_THROWS_WITH(validate_moments(m),
                    Catch::Matchers::ContainsSubstring("positive semidefinite"));

  auto bad = build_moments(E, 1);
  bad.mu = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(validate_moments(bad), error);
}
