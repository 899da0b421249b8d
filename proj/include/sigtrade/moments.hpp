#pragma once

/*
signature moments: the expected lead-lag signature of a sample set, and the
mean vector / covariance matrix it induces over signature strategies.  a
strategy coefficient on word w for asset m prices the PnL word w.f(m),
where f(m) is that asset's lead letter; covariances come from shuffle
products, so the expected signature must extend to twice the strategy
order plus two.
*/

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sigtrade/market.hpp"
#include "sigtrade/signature.hpp"
#include "sigtrade/words.hpp"

namespace sigtrade {

// canonical flattening tag written into every artifact
inline constexpr const char* kWordOrderTag = "graded-lex";

// default ceiling on dense signature coefficients (~400 MB of doubles)
inline constexpr std::uint64_t kDefaultCoeffBudget = 50'000'000;

// lead letter of asset m (1-based) in the lead-lag alphabet: the lag block
// occupies letters 0..N+d, the lead block starts at N+d+1, and asset m sits
// at offset m within its block (offset 0 is time)
inline Letter shift_letter(std::size_t d, std::size_t N, std::size_t m) {
  if (d == 0) throw error("shift_letter: d must be positive");
  if (m < 1 || m > d)
    throw error("shift_letter: asset index " + std::to_string(m) + " outside 1.." +
                std::to_string(d));
  return static_cast<Letter>(N + d + 1 + m);
}

/*
empirical mean of lead-lag signatures of time-augmented samples, over the
alphabet of 2(N+d+1) letters.
*/
struct ExpectedSignature {
  std::size_t d = 0;
  std::size_t N = 0;
  std::size_t sample_count = 0;
  TruncatedSignature mean{1, 0};

  std::size_t alphabet() const { return mean.alphabet(); }
  int order() const { return mean.order(); }
  double coeff_at(std::uint64_t i) const { return mean.coeff_at(i); }
  double coeff(const Word& w) const { return mean.coeff(w); }
};

// refuse configurations whose dense coefficient count exceeds the budget
inline void check_coeff_budget(std::size_t alphabet, int order,
                               std::uint64_t budget = kDefaultCoeffBudget) {
  const std::uint64_t n = word_count(alphabet, order);
  if (n > budget)
    throw error("signature of order " + std::to_string(order) + " over " +
                std::to_string(alphabet) + " letters needs " + std::to_string(n) +
                " coefficients, above the budget of " + std::to_string(budget));
}

inline ExpectedSignature expected_signature(const SampleSet& set, int order,
                                            std::uint64_t budget = kDefaultCoeffBudget) {
  validate(set);
  const std::size_t A = 2 * (set.N + set.d + 1);
  check_coeff_budget(A, order, budget);

  ExpectedSignature out;
  out.d = set.d;
  out.N = set.N;
  out.sample_count = set.samples.size();
  out.mean = TruncatedSignature(A, order);
  std::vector<double>& acc = out.mean.data();
  std::fill(acc.begin(), acc.end(), 0.0);

  for (const MarketFactorPath& sample : set.samples) {
    const TruncatedSignature s = signature_of_path(lead_lag(to_sampled(sample)), order);
    const std::vector<double>& c = s.data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c[i];
  }
  const double inv = 1.0 / static_cast<double>(set.samples.size());
  for (double& v : acc) v *= inv;
  return out;
}

/*
moments of terminal PnL over the strategy coefficient space at order M:
entries are indexed asset-major, word minor, in canonical word order, with
dimension d * (number of words of length <= M over N+d+1 letters).
*/
struct SigMoments {
  std::size_t d = 0;
  std::size_t N = 0;
  int M = 0;
  std::size_t sample_count = 0;
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;

  std::size_t words_per_asset() const {
    return static_cast<std::size_t>(word_count(N + d + 1, M));
  }
  std::size_t dim() const { return d * words_per_asset(); }
};

// words of the strategy alphabet re-read verbatim as lead-lag lag-block
// words, with the asset's lead letter appended
inline Word pnl_word(const Word& w, std::size_t d, std::size_t N, std::size_t m) {
  Word z = w;
  z.push_back(shift_letter(d, N, m));
  return z;
}

inline Eigen::VectorXd build_mu_sig(const ExpectedSignature& E, int M) {
  if (E.order() < M + 1)
    throw error("build_mu_sig: order-" + std::to_string(M) + " strategies need the expected signature at order " +
                std::to_string(M + 1) + ", have " + std::to_string(E.order()));
  const std::vector<Word> words = enumerate_words(E.N + E.d + 1, M);
  Eigen::VectorXd mu(static_cast<Eigen::Index>(E.d * words.size()));
  Eigen::Index i = 0;
  for (std::size_t m = 1; m <= E.d; ++m)
    for (const Word& w : words) mu(i++) = E.coeff(pnl_word(w, E.d, E.N, m));
  return mu;
}

inline Eigen::MatrixXd build_sigma_sig(const ExpectedSignature& E, int M) {
  if (E.order() < 2 * M + 2)
    throw error("build_sigma_sig: order-" + std::to_string(M) +
                " strategies need the expected signature at order " + std::to_string(2 * M + 2) +
                ", have " + std::to_string(E.order()));
  const Eigen::VectorXd mu = build_mu_sig(E, M);
  const std::vector<Word> words = enumerate_words(E.N + E.d + 1, M);
  const std::size_t W = words.size();
  const Eigen::Index dim = static_cast<Eigen::Index>(E.d * W);
  Eigen::MatrixXd sigma(dim, dim);

  for (Eigen::Index i = 0; i < dim; ++i) {
    const std::size_t mi = static_cast<std::size_t>(i) / W + 1;
    const Word wi = pnl_word(words[static_cast<std::size_t>(i) % W], E.d, E.N, mi);
    for (Eigen::Index j = i; j < dim; ++j) {
      const std::size_t mj = static_cast<std::size_t>(j) / W + 1;
      const Word wj = pnl_word(words[static_cast<std::size_t>(j) % W], E.d, E.N, mj);
      double second = 0.0;
      for (const auto& [z, mult] : detail::shuffle_words(wi, wj))
        second += static_cast<double>(mult) * E.coeff(z);
      const double cov = second - mu(i) * mu(j);
      sigma(i, j) = cov;
      sigma(j, i) = cov;
    }
  }
  return sigma;
}

inline SigMoments build_moments(const ExpectedSignature& E, int M) {
  SigMoments out;
  out.d = E.d;
  out.N = E.N;
  out.M = M;
  out.sample_count = E.sample_count;
  out.mu = build_mu_sig(E, M);
  out.sigma = build_sigma_sig(E, M);
  return out;
}

// smallest eigenvalue must not be materially negative for a covariance
inline void validate_moments(const SigMoments& m, double tol = 1e-10) {
  if (m.mu.size() != m.sigma.rows() || m.sigma.rows() != m.sigma.cols())
    throw error("moments have inconsistent shapes");
  if (m.dim() != static_cast<std::size_t>(m.mu.size()))
    throw error("moments dimension does not match d, N, M");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.sigma, Eigen::EigenvaluesOnly);
  const double min_ev = es.eigenvalues().minCoeff();
  const double scale = std::max(1.0, m.sigma.trace());
  if (min_ev < -tol * scale)
    throw error("covariance is not positive semidefinite (min eigenvalue " +
                std::to_string(min_ev) + ")");
}

}  // namespace sigtrade
