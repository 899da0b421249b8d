#pragma once

/*
running a strategy on a path: positions are pairings of the strategy
coefficients with the running signature of the time-augmented path, PnL is
the discrete trading sum, and fitting a functional to a target series is a
least-squares problem on running-signature features.
*/

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sigtrade/market.hpp"
#include "sigtrade/moments.hpp"
#include "sigtrade/optimize.hpp"
#include "sigtrade/signature.hpp"
#include "sigtrade/words.hpp"

namespace sigtrade {

/*
position at decision time t_k pairs the strategy with the signature of the
path restricted to nodes 0..k, so row k never sees data past t_k.  one row
per tradeable step: k = 0..n-1.
*/
inline Eigen::MatrixXd positions(const SigStrategy& s, const MarketFactorPath& p) {
  validate(p);
  if (p.d != s.d || p.N != s.N)
    throw error("positions: path has (d,N) = (" + std::to_string(p.d) + "," +
                std::to_string(p.N) + ") but strategy wants (" + std::to_string(s.d) + "," +
                std::to_string(s.N) + ")");
  const std::size_t n = p.segments();
  if (n == 0) throw error("positions: path has no tradeable step");
  const std::size_t W = s.words_per_asset();

  const std::vector<TruncatedSignature> sigs = prefix_signatures(to_sampled(p), s.M);
  Eigen::MatrixXd xi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s.d));
  for (std::size_t k = 0; k < n; ++k) {
    const std::vector<double>& c = sigs[k].data();
    for (std::size_t m = 0; m < s.d; ++m) {
      double acc = 0.0;
      const Eigen::VectorXd& ell = s.ell;
      const std::size_t base = m * W;
      for (std::size_t w = 0; w < W; ++w) acc += ell(static_cast<Eigen::Index>(base + w)) * c[w];
      xi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = acc;
    }
  }
  return xi;
}

struct BacktestResult {
  Eigen::MatrixXd positions;     // n x d
  std::vector<double> pnl;       // n per-step increments
  std::vector<double> cum_pnl;   // n+1 running total, starts at 0
  double terminal_pnl = 0.0;
  double mean_step = 0.0;
  double std_step = 0.0;         // population
  double sharpe = 0.0;
  double max_drawdown = 0.0;
};

inline BacktestResult backtest(const SigStrategy& s, const MarketFactorPath& p,
                               double annualization = std::sqrt(252.0)) {
  BacktestResult r;
  r.positions = positions(s, p);
  const std::size_t n = p.segments();
  r.pnl.resize(n);
  r.cum_pnl.assign(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double inc = 0.0;
    for (std::size_t m = 0; m < s.d; ++m)
      inc += r.positions(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) *
             (p.at(k + 1, m) - p.at(k, m));
    r.pnl[k] = inc;
    r.cum_pnl[k + 1] = r.cum_pnl[k] + inc;
  }
  r.terminal_pnl = r.cum_pnl[n];

  double mean = 0.0;
  for (double v : r.pnl) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : r.pnl) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  r.mean_step = mean;
  r.std_step = std::sqrt(var);
  r.sharpe = r.std_step > 0.0 ? annualization * mean / r.std_step : 0.0;

  double peak = 0.0, dd = 0.0;
  for (double v : r.cum_pnl) {
    peak = std::max(peak, v);
    dd = std::max(dd, peak - v);
  }
  r.max_drawdown = dd;
  return r;
}

struct AggregateStats {
  std::size_t n_paths = 0;
  double mean_sharpe = 0.0;
  std::vector<double> sharpe_quantiles;  // at 5, 25, 50, 75, 95 percent
  double mean_terminal = 0.0;
  double var_terminal = 0.0;  // population
};

inline AggregateStats aggregate_stats(const std::vector<BacktestResult>& results) {
  if (results.empty()) throw error("aggregate_stats: no results");
  AggregateStats a;
  a.n_paths = results.size();
  std::vector<double> sharpes;
  sharpes.reserve(results.size());
  for (const auto& r : results) {
    a.mean_sharpe += r.sharpe;
    a.mean_terminal += r.terminal_pnl;
    sharpes.push_back(r.sharpe);
  }
  const double n = static_cast<double>(results.size());
  a.mean_sharpe /= n;
  a.mean_terminal /= n;
  for (const auto& r : results)
    a.var_terminal += (r.terminal_pnl - a.mean_terminal) * (r.terminal_pnl - a.mean_terminal);
  a.var_terminal /= n;

  std::sort(sharpes.begin(), sharpes.end());
  for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    const double pos = q * (n - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sharpes.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    a.sharpe_quantiles.push_back(sharpes[lo] * (1.0 - frac) + sharpes[hi] * frac);
  }
  return a;
}

inline std::vector<BacktestResult> backtest_set(const SigStrategy& s, const SampleSet& set,
                                                double annualization = std::sqrt(252.0)) {
  validate(set);
  std::vector<BacktestResult> out;
  out.reserve(set.samples.size());
  for (const auto& p : set.samples) out.push_back(backtest(s, p, annualization));
  return out;
}

struct FitReport {
  std::size_t d = 0;
  std::size_t N = 0;
  int M = 0;
  double ridge = 0.0;
  double r2 = 0.0;
  double rmse = 0.0;
  Eigen::VectorXd coeffs;  // one per word of length <= M, canonical order
};

/*
least squares of a target series on running-signature features: row k holds
the signature coefficients of the path up to node k, for k = 0..n-1,
matching the positions convention.  ridge = 0 demands a full-rank design.
r^2 is 1 - SSR/SST about the target mean; a zero-variance target counts as
a perfect fit only when the residuals actually vanish.
*/
inline FitReport learn_functional(const MarketFactorPath& p, const std::vector<double>& target,
                                  int M, double ridge = 0.0) {
  validate(p);
  if (ridge < 0.0) throw error("learn_functional: ridge must be nonnegative");
  const std::size_t n = p.segments();
  if (target.size() != n)
    throw error("learn_functional: target has " + std::to_string(target.size()) +
                " values, path has " + std::to_string(n) + " decision times");
  const std::size_t W = static_cast<std::size_t>(word_count(p.channels() + 1, M));
  if (n < W && ridge == 0.0)
    throw error("learn_functional: " + std::to_string(n) + " rows cannot identify " +
                std::to_string(W) + " coefficients without a ridge");

  const std::vector<TruncatedSignature> sigs = prefix_signatures(to_sampled(p), M);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(W));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const std::vector<double>& c = sigs[k].data();
    for (std::size_t w = 0; w < W; ++w)
      X(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w)) = c[w];
    y(static_cast<Eigen::Index>(k)) = target[k];
  }

  FitReport rep;
  rep.d = p.d;
  rep.N = p.N;
  rep.M = M;
  rep.ridge = ridge;
  if (ridge == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < static_cast<Eigen::Index>(W))
      throw error("learn_functional: design is rank-deficient (rank " +
                  std::to_string(qr.rank()) + " of " + std::to_string(W) +
                  "); add a ridge or more data");
    rep.coeffs = qr.solve(y);
  } else {
    Eigen::MatrixXd G = X.transpose() * X;
    G.diagonal().array() += ridge;
    rep.coeffs = Eigen::LDLT<Eigen::MatrixXd>(G).solve(X.transpose() * y);
  }

  const Eigen::VectorXd resid = y - X * rep.coeffs;
  const double ssr = resid.squaredNorm();
  const double mean = y.mean();
  const double sst = (y.array() - mean).matrix().squaredNorm();
  rep.rmse = std::sqrt(ssr / static_cast<double>(n));
  if (sst > 0.0)
    rep.r2 = 1.0 - ssr / sst;
  else
    rep.r2 = ssr <= 1e-24 * static_cast<double>(n) ? 1.0 : 0.0;
  return rep;
}

}  // namespace sigtrade
