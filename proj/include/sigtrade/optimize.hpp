#pragma once

/*
closed-form mean-variance optimum over signature strategies: maximize
expected terminal PnL subject to a variance budget.  with moments (mu,
sigma) the unscaled solution is l~ = sigma^{-1} mu, the binding multiplier
lambda = sqrt(l~' sigma l~) / (2 sqrt(delta)), and the optimum l~ / (2
lambda), which sits exactly on the variance budget.
*/

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sigtrade/moments.hpp"
#include "sigtrade/simulate.hpp"
#include "sigtrade/words.hpp"

namespace sigtrade {

/*
a fitted strategy: one dense coefficient vector per asset over the words of
length <= M (canonical order), plus the multiplier and budget it was solved
at.  degenerate marks the all-zero strategy produced by mu = 0.
*/
struct SigStrategy {
  std::size_t d = 0;
  std::size_t N = 0;
  int M = 0;
  double lambda = 0.0;
  double delta = 0.0;
  double ridge = 0.0;
  bool degenerate = false;
  Eigen::VectorXd ell;  // flattened asset-major, d * words_per_asset entries

  std::size_t words_per_asset() const {
    return static_cast<std::size_t>(word_count(N + d + 1, M));
  }
  // coefficients of asset m (1-based)
  Eigen::VectorXd asset_coeffs(std::size_t m) const {
    const auto W = static_cast<Eigen::Index>(words_per_asset());
    return ell.segment(static_cast<Eigen::Index>(m - 1) * W, W);
  }
};

struct FrontierPoint {
  double delta = 0.0;         // variance budget
  double expected_pnl = 0.0;
  double variance = 0.0;      // realized model variance of the strategy
  double lambda = 0.0;
};

namespace detail {

// rank-revealing solve of (sigma + ridge I) x = mu; fails loudly on a
// numerically singular matrix instead of silently pseudo-inverting
inline Eigen::VectorXd solve_spd(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& mu,
                                 double ridge) {
  Eigen::MatrixXd A = sigma;
  if (ridge != 0.0) A.diagonal().array() += ridge;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  const double eps = std::numeric_limits<double>::epsilon();
  if (!(smin > smax * eps * static_cast<double>(A.rows())))
    throw error("covariance is numerically singular (condition number ~ " +
                std::to_string(smax / (smin > 0.0 ? smin : eps * smax)) +
                "); raise the ridge or the sample count");
  return svd.solve(mu);
}

}  // namespace detail

// condition number of the covariance the solver actually inverts
inline double covariance_condition(const SigMoments& m, double ridge = 0.0) {
  Eigen::MatrixXd A = m.sigma;
  if (ridge != 0.0) A.diagonal().array() += ridge;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

// expected terminal PnL and model variance of a flattened strategy vector
inline std::pair<double, double> evaluate(const Eigen::VectorXd& ell, const SigMoments& m) {
  if (ell.size() != m.mu.size()) throw error("evaluate: strategy/moments dimension mismatch");
  const double mean = ell.dot(m.mu);
  const double var = ell.dot(m.sigma * ell);
  return {mean, var};
}

inline std::pair<double, double> evaluate(const SigStrategy& s, const SigMoments& m) {
  if (s.d != m.d || s.N != m.N || s.M != m.M)
    throw error("evaluate: strategy and moments disagree on (d, N, M)");
  return evaluate(s.ell, m);
}

inline SigStrategy solve(const SigMoments& m, double delta, double ridge = 0.0) {
  if (!(delta > 0.0)) throw error("solve: variance budget must be positive");
  if (ridge < 0.0) throw error("solve: ridge must be nonnegative");
  if (m.mu.size() != m.sigma.rows() || m.sigma.rows() != m.sigma.cols())
    throw error("solve: malformed moments");

  SigStrategy out;
  out.d = m.d;
  out.N = m.N;
  out.M = m.M;
  out.delta = delta;
  out.ridge = ridge;

  const Eigen::VectorXd raw = detail::solve_spd(m.sigma, m.mu, ridge);
  const double q = raw.dot(m.sigma * raw);
  if (!(q > 0.0) || m.mu.lpNorm<Eigen::Infinity>() == 0.0) {
    out.degenerate = true;
    out.lambda = 0.0;
    out.ell = Eigen::VectorXd::Zero(m.mu.size());
    return out;
  }
  out.lambda = std::sqrt(q) / (2.0 * std::sqrt(delta));
  out.ell = raw / (2.0 * out.lambda);
  return out;
}

// one closed-form solve per budget on a shared moments object
inline std::vector<FrontierPoint> frontier(const SigMoments& m,
                                           const std::vector<double>& deltas,
                                           double ridge = 0.0) {
  if (deltas.empty()) throw error("frontier: empty budget grid");
  std::vector<FrontierPoint> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    const SigStrategy s = solve(m, delta, ridge);
    const auto [mean, var] = evaluate(s, m);
    out.push_back({delta, mean, var, s.lambda});
  }
  return out;
}

/*
random strategies at the optimum's variance budget: perturb the optimum
directionally and rescale each candidate back onto the budget.  every
resulting point must lie on or below the frontier.
*/
inline std::vector<FrontierPoint> perturb_cloud(const SigStrategy& s, const SigMoments& m,
                                                std::size_t count, double magnitude,
                                                std::uint64_t seed) {
  if (s.degenerate) throw error("perturb_cloud: degenerate strategy");
  if (magnitude < 0.0) throw error("perturb_cloud: magnitude must be nonnegative");
  const double base_norm = s.ell.norm();
  GaussianRng rng(seed);
  std::vector<FrontierPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::VectorXd g(s.ell.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = rng.normal();
    Eigen::VectorXd p = s.ell + magnitude * base_norm * g.normalized();
    const double var = p.dot(m.sigma * p);
    if (!(var > 0.0)) continue;  // perturbation fell into the covariance null space
    p *= std::sqrt(s.delta / var);
    const auto [mean, v] = evaluate(p, m);
    out.push_back({s.delta, mean, v, s.lambda});
  }
  return out;
}

}  // namespace sigtrade
