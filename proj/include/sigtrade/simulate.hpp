#pragma once

/*
synthetic market generators used for experiments, plus the macd momentum
signal.  dynamics are arithmetic (additive) and paths start at 1.  all
randomness flows through a portable gaussian sampler so runs are bit-exact
across platforms and reruns.
*/

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sigtrade/market.hpp"
#include "sigtrade/words.hpp"

namespace sigtrade {

// splitmix64 step; used to derive independent per-sample seeds
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/*
gaussian sampler: mt19937_64 (bit-exact by the standard) + box-muller.
std::normal_distribution is implementation-defined, so it is avoided; this
generator's identity ("mt19937_64/box-muller") is part of every artifact.
*/
class GaussianRng {
 public:
  static constexpr const char* name() { return "mt19937_64/box-muller"; }

  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

  // uniform on (0, 1]
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/*
cointegrated pair: X a driftless walk, Y mean-reverting toward X,
  X_{k+1} = X_k + sigma_x sqrt(dt) xi
  Y_{k+1} = Y_k + kappa (X_k - Y_k) dt + sigma_y sqrt(dt) xi'
euler stepping, so kappa*dt >= 2 would oscillate unstably and is rejected.
*/
struct PairsConfig {
  std::size_t n_steps = 100;
  double dt = 1.0 / 252.0;
  double sigma_x = 0.2;
  double sigma_y = 0.2;
  double kappa = 5.0;
  double x0 = 1.0;
  double y0 = 1.0;
};

inline MarketFactorPath simulate_pairs_path(const PairsConfig& cfg, std::uint64_t seed) {
  if (cfg.n_steps < 1) throw error("simulate_pairs: need at least one step");
  if (!(cfg.dt > 0.0)) throw error("simulate_pairs: dt must be positive");
  if (cfg.kappa < 0.0) throw error("simulate_pairs: kappa must be nonnegative");
  if (cfg.kappa * cfg.dt >= 2.0)
    throw error("simulate_pairs: kappa*dt = " + std::to_string(cfg.kappa * cfg.dt) +
                " is unstable under euler stepping (needs < 2)");

  GaussianRng rng(seed);
  const double sdt = std::sqrt(cfg.dt);
  MarketFactorPath p;
  p.d = 2;
  p.N = 0;
  p.times.resize(cfg.n_steps + 1);
  p.values.resize((cfg.n_steps + 1) * 2);
  double x = cfg.x0, y = cfg.y0;
  p.times[0] = 0.0;
  p.at(0, 0) = x;
  p.at(0, 1) = y;
  for (std::size_t k = 0; k < cfg.n_steps; ++k) {
    const double xn = x + cfg.sigma_x * sdt * rng.normal();
    const double yn = y + cfg.kappa * (x - y) * cfg.dt + cfg.sigma_y * sdt * rng.normal();
    x = xn;
    y = yn;
    p.times[k + 1] = static_cast<double>(k + 1) * cfg.dt;
    p.at(k + 1, 0) = x;
    p.at(k + 1, 1) = y;
  }
  return p;
}

inline SampleSet simulate_pairs(const PairsConfig& cfg, std::uint64_t seed,
                                std::size_t n_samples) {
  if (n_samples == 0) throw error("simulate_pairs: need at least one sample");
  SampleSet set;
  set.d = 2;
  set.N = 0;
  set.samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    set.samples.push_back(simulate_pairs_path(cfg, mix_seed(seed, i)));
  return set;
}

/*
market with an exogenous signal: the observable factor f is an OU process,
  f_{k+1} = f_k - kappa f_k dt + sigma_f sqrt(dt) xi,
and the asset drifts on a latent exponentially-faded memory of f's moves,
  Z_{k+1} = e^{-alpha dt} (Z_k + (f_{k+1} - f_k))
  X_{k+1} = X_k + Z_k dt + sigma_x sqrt(dt) xi'.
Z is never emitted: a trader only sees (X, f).  include_signal=false drops
the factor channel for the endogenous-information benchmark.
*/
struct SignalMarketConfig {
  std::size_t n_steps = 100;
  double dt = 1.0 / 252.0;
  double sigma_x = 0.2;
  double sigma_f = 0.2;
  double kappa = 5.0;   // OU reversion of f
  double alpha = 10.0;  // decay of the latent response to f's moves
  double x0 = 1.0;
  double f0 = 0.0;
  bool include_signal = true;
};

inline MarketFactorPath simulate_signal_market_path(const SignalMarketConfig& cfg,
                                                    std::uint64_t seed) {
  if (cfg.n_steps < 1) throw error("simulate_signal_market: need at least one step");
  if (!(cfg.dt > 0.0)) throw error("simulate_signal_market: dt must be positive");
  if (cfg.kappa < 0.0 || cfg.alpha < 0.0)
    throw error("simulate_signal_market: kappa and alpha must be nonnegative");
  if (cfg.kappa * cfg.dt >= 2.0)
    throw error("simulate_signal_market: kappa*dt = " + std::to_string(cfg.kappa * cfg.dt) +
                " is unstable under euler stepping (needs < 2)");

  GaussianRng rng(seed);
  const double sdt = std::sqrt(cfg.dt);
  const double fade = std::exp(-cfg.alpha * cfg.dt);
  MarketFactorPath p;
  p.d = 1;
  p.N = cfg.include_signal ? 1 : 0;
  p.times.resize(cfg.n_steps + 1);
  p.values.resize((cfg.n_steps + 1) * p.channels());
  double x = cfg.x0, f = cfg.f0, z = 0.0;
  p.times[0] = 0.0;
  p.at(0, 0) = x;
  if (cfg.include_signal) p.at(0, 1) = f;
  for (std::size_t k = 0; k < cfg.n_steps; ++k) {
    const double fn = f - cfg.kappa * f * cfg.dt + cfg.sigma_f * sdt * rng.normal();
    const double xn = x + z * cfg.dt + cfg.sigma_x * sdt * rng.normal();
    z = fade * (z + (fn - f));
    f = fn;
    x = xn;
    p.times[k + 1] = static_cast<double>(k + 1) * cfg.dt;
    p.at(k + 1, 0) = x;
    if (cfg.include_signal) p.at(k + 1, 1) = f;
  }
  return p;
}

inline SampleSet simulate_signal_market(const SignalMarketConfig& cfg, std::uint64_t seed,
                                        std::size_t n_samples) {
  if (n_samples == 0) throw error("simulate_signal_market: need at least one sample");
  SampleSet set;
  set.d = 1;
  set.N = cfg.include_signal ? 1 : 0;
  set.samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    set.samples.push_back(simulate_signal_market_path(cfg, mix_seed(seed, i)));
  return set;
}

/*
macd: difference of two exponential moving averages with spans t1 < t2,
smoothing 2/(span+1), both initialised at the first observation.
*/
inline std::vector<double> macd(const std::vector<double>& prices, std::size_t t1,
                                std::size_t t2) {
  if (prices.empty()) throw error("macd: empty price series");
  if (t1 == 0 || t2 == 0) throw error("macd: spans must be positive");
  if (t1 >= t2) throw error("macd: fast span must be shorter than slow span");
  const double a1 = 2.0 / (static_cast<double>(t1) + 1.0);
  const double a2 = 2.0 / (static_cast<double>(t2) + 1.0);
  std::vector<double> out(prices.size());
  double e1 = prices[0], e2 = prices[0];
  out[0] = 0.0;
  for (std::size_t k = 1; k < prices.size(); ++k) {
    e1 += a1 * (prices[k] - e1);
    e2 += a2 * (prices[k] - e2);
    out[k] = e1 - e2;
  }
  return out;
}

// squash macd into a position in (-1, 1): 2*sigmoid(L*macd/scale) - 1.
// scale <= 0 means "auto": the population std of the macd series (1 if
// that is zero, which only happens for a constant macd).
inline std::vector<double> momentum_positions(const std::vector<double>& prices,
                                              std::size_t t1, std::size_t t2, double L,
                                              double scale = 0.0) {
  const std::vector<double> sig = macd(prices, t1, t2);
  if (scale <= 0.0) {
    double mean = 0.0;
    for (double v : sig) mean += v;
    mean /= static_cast<double>(sig.size());
    double var = 0.0;
    for (double v : sig) var += (v - mean) * (v - mean);
    var /= static_cast<double>(sig.size());
    scale = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  std::vector<double> out(sig.size());
  for (std::size_t k = 0; k < sig.size(); ++k)
    out[k] = 2.0 / (1.0 + std::exp(-L * sig[k] / scale)) - 1.0;
  return out;
}

}  // namespace sigtrade
