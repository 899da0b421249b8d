#pragma once

/*
truncated path signatures of piecewise-linear paths.  a signature is stored
densely per level (level k holds A^k coefficients in graded-lex order); a
path is folded segment by segment through chen's identity, where each linear
segment contributes the tensor exponential of its increment.
*/

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sigtrade/words.hpp"

namespace sigtrade {

/*
piecewise-linear path sampled on a strictly increasing time grid.
values are row-major: node index major, channel minor.
*/
struct SampledPath {
  std::size_t channels = 0;
  std::vector<double> times;   // n+1 node times
  std::vector<double> values;  // (n+1) * channels

  std::size_t nodes() const { return times.size(); }
  std::size_t segments() const { return times.empty() ? 0 : times.size() - 1; }
  double at(std::size_t node, std::size_t ch) const { return values[node * channels + ch]; }
  double& at(std::size_t node, std::size_t ch) { return values[node * channels + ch]; }
};

inline void validate(const SampledPath& p) {
  if (p.channels == 0) throw error("path has no channels");
  if (p.times.empty()) throw error("path has no nodes");
  if (p.values.size() != p.times.size() * p.channels)
    throw error("path value array has wrong shape");
  for (std::size_t i = 1; i < p.times.size(); ++i)
    if (!(p.times[i] > p.times[i - 1]))
      throw error("path times must be strictly increasing (node " + std::to_string(i) + ")");
  for (double v : p.values)
    if (!std::isfinite(v)) throw error("path contains a non-finite value");
  for (double t : p.times)
    if (!std::isfinite(t)) throw error("path contains a non-finite time");
}

/*
graded dense signature truncated at a fixed order.  coefficient of the
empty word is always 1.
*/
class TruncatedSignature {
 public:
  TruncatedSignature(std::size_t alphabet, int order)
      : alphabet_(alphabet), order_(order) {
    if (alphabet == 0) throw error("signature alphabet must be nonempty");
    if (order < 0) throw error("signature order must be nonnegative");
    coef_.assign(static_cast<std::size_t>(word_count(alphabet, order)), 0.0);
    coef_[0] = 1.0;
  }

  static TruncatedSignature unit(std::size_t alphabet, int order) {
    return TruncatedSignature(alphabet, order);
  }

  std::size_t alphabet() const { return alphabet_; }
  int order() const { return order_; }
  std::size_t size() const { return coef_.size(); }
  double coeff_at(std::uint64_t flat_index) const { return coef_[flat_index]; }
  double coeff(const Word& w) const {
    if (static_cast<int>(w.size()) > order_)
      throw error("coeff: word " + word_str(w) + " exceeds truncation order " +
                  std::to_string(order_));
    return coef_[word_index(w, alphabet_)];
  }

  std::vector<double>& data() { return coef_; }
  const std::vector<double>& data() const { return coef_; }

 private:
  std::size_t alphabet_;
  int order_;
  std::vector<double> coef_;
};

namespace detail {

// nonzero entries of one level of the tensor exponential of an increment:
// level k of exp(delta) has entry prod_j delta[w_j] / k! at word w, so only
// words over the support of delta survive.  entries come out in graded-lex
// order of the full level block.
struct SparseLevel {
  std::vector<std::uint64_t> index;  // position within the level block
  std::vector<double> value;
};

inline std::vector<SparseLevel> exp_levels(const std::vector<double>& delta,
                                           std::size_t alphabet, int order) {
  std::vector<std::size_t> support;
  for (std::size_t a = 0; a < alphabet; ++a)
    if (delta[a] != 0.0) support.push_back(a);

  std::vector<SparseLevel> lv(static_cast<std::size_t>(order) + 1);
  lv[0].index = {0};
  lv[0].value = {1.0};
  for (int k = 1; k <= order; ++k) {
    const SparseLevel& prev = lv[static_cast<std::size_t>(k - 1)];
    SparseLevel& cur = lv[static_cast<std::size_t>(k)];
    cur.index.reserve(prev.index.size() * support.size());
    cur.value.reserve(prev.index.size() * support.size());
    const double inv_k = 1.0 / static_cast<double>(k);
    for (std::size_t i = 0; i < prev.index.size(); ++i)
      for (std::size_t a : support) {
        cur.index.push_back(prev.index[i] * alphabet + a);
        cur.value.push_back(prev.value[i] * delta[a] * inv_k);
      }
  }
  return lv;
}

// in-place chen fold of one linear segment: S <- S (x) exp(delta).
// levels are updated top-down so each level only reads lower, untouched ones.
inline void append_segment(TruncatedSignature& sig, const std::vector<double>& delta) {
  const std::size_t A = sig.alphabet();
  const int M = sig.order();
  const auto ex = exp_levels(delta, A, M);
  std::vector<double>& c = sig.data();

  for (int k = M; k >= 1; --k) {
    double* out = c.data() + level_offset(A, k);
    std::uint64_t block = 1;  // A^j
    for (int j = 1; j <= k; ++j) {
      block *= A;
      const SparseLevel& e = ex[static_cast<std::size_t>(j)];
      if (e.index.empty()) continue;
      const double* src = c.data() + level_offset(A, k - j);
      std::uint64_t src_count = 1;
      for (int t = 0; t < k - j; ++t) src_count *= A;
      for (std::uint64_t u = 0; u < src_count; ++u) {
        const double s = src[u];
        if (s == 0.0) continue;
        double* row = out + u * block;
        for (std::size_t i = 0; i < e.index.size(); ++i) row[e.index[i]] += s * e.value[i];
      }
    }
  }
}

}  // namespace detail

// signature of a single linear segment with the given increment
inline TruncatedSignature sig_segment(const std::vector<double>& delta, int order) {
  if (delta.empty()) throw error("sig_segment: empty increment");
  for (double v : delta)
    if (!std::isfinite(v)) throw error("sig_segment: non-finite increment");
  TruncatedSignature s(delta.size(), order);
  detail::append_segment(s, delta);
  return s;
}

// chen's identity: signature of the concatenated path,
// S^w = sum over splittings w = u.v of S1^u * S2^v
inline TruncatedSignature chen_concat(const TruncatedSignature& s1,
                                      const TruncatedSignature& s2) {
  if (s1.alphabet() != s2.alphabet()) throw error("chen_concat: alphabet mismatch");
  if (s1.order() != s2.order()) throw error("chen_concat: order mismatch");
  const std::size_t A = s1.alphabet();
  const int M = s1.order();
  TruncatedSignature out(A, M);
  std::vector<double>& c = out.data();
  const std::vector<double>& a = s1.data();
  const std::vector<double>& b = s2.data();

  std::uint64_t left = 1;  // A^i
  for (int i = 0; i <= M; ++i) {
    const double* ai = a.data() + level_offset(A, i);
    std::uint64_t right = 1;  // A^j
    for (int j = 0; i + j <= M; ++j) {
      const double* bj = b.data() + level_offset(A, j);
      double* ck = c.data() + level_offset(A, i + j);
      for (std::uint64_t u = 0; u < left; ++u) {
        const double s = ai[u];
        if (s == 0.0) continue;
        double* row = ck + u * right;
        for (std::uint64_t v = 0; v < right; ++v) row[v] += s * bj[v];
      }
      right *= A;
    }
    left *= A;
  }
  // the constructor already set the unit coefficient and the i=j=0 term
  // added a0*b0 = 1 on top of it
  c[0] -= 1.0;
  return out;
}

// signature of a sampled path, folded with chen's identity
inline TruncatedSignature signature_of_path(const SampledPath& p, int order) {
  validate(p);
  TruncatedSignature s(p.channels, order);
  std::vector<double> delta(p.channels);
  for (std::size_t k = 0; k + 1 < p.nodes(); ++k) {
    for (std::size_t ch = 0; ch < p.channels; ++ch)
      delta[ch] = p.at(k + 1, ch) - p.at(k, ch);
    detail::append_segment(s, delta);
  }
  return s;
}

// running signatures: element k is the signature of the path restricted to
// nodes 0..k, so element 0 is the unit
inline std::vector<TruncatedSignature> prefix_signatures(const SampledPath& p, int order) {
  validate(p);
  std::vector<TruncatedSignature> out;
  out.reserve(p.nodes());
  TruncatedSignature s(p.channels, order);
  out.push_back(s);
  std::vector<double> delta(p.channels);
  for (std::size_t k = 0; k + 1 < p.nodes(); ++k) {
    for (std::size_t ch = 0; ch < p.channels; ++ch)
      delta[ch] = p.at(k + 1, ch) - p.at(k, ch);
    detail::append_segment(s, delta);
    out.push_back(s);
  }
  return out;
}

// prepend a time channel: channel 0 carries the node times
inline SampledPath time_augment(const SampledPath& p) {
  validate(p);
  SampledPath out;
  out.channels = p.channels + 1;
  out.times = p.times;
  out.values.resize(p.nodes() * out.channels);
  for (std::size_t k = 0; k < p.nodes(); ++k) {
    out.at(k, 0) = p.times[k];
    for (std::size_t ch = 0; ch < p.channels; ++ch) out.at(k, 1 + ch) = p.at(k, ch);
  }
  return out;
}

/*
hoff lead-lag transform.  channels [0, C) replay the input as its lag,
channels [C, 2C) as its lead; the lead moves first and the lag catches up,
so a source path with nodes P_0..P_n becomes 2n+1 nodes
  z_0      = (P_0,     P_0)
  z_{2k+1} = (P_k,     P_{k+1})
  z_{2k+2} = (P_{k+1}, P_{k+1})
on a synthetic unit-step time grid.  the tagged wrapper exists so the
transform cannot be applied twice by accident.
*/
struct LeadLagPath {
  std::size_t base_channels = 0;  // C; the transformed path has 2C channels
  SampledPath path;
};

inline LeadLagPath lead_lag(const SampledPath& p) {
  validate(p);
  if (p.segments() < 1) throw error("lead_lag: path needs at least one segment");
  const std::size_t C = p.channels;
  const std::size_t n = p.segments();
  LeadLagPath out;
  out.base_channels = C;
  out.path.channels = 2 * C;
  out.path.times.resize(2 * n + 1);
  out.path.values.resize((2 * n + 1) * 2 * C);
  for (std::size_t j = 0; j < 2 * n + 1; ++j) out.path.times[j] = static_cast<double>(j);

  auto set_node = [&](std::size_t j, std::size_t lag_node, std::size_t lead_node) {
    for (std::size_t ch = 0; ch < C; ++ch) {
      out.path.at(j, ch) = p.at(lag_node, ch);
      out.path.at(j, C + ch) = p.at(lead_node, ch);
    }
  };
  set_node(0, 0, 0);
  for (std::size_t k = 0; k < n; ++k) {
    set_node(2 * k + 1, k, k + 1);
    set_node(2 * k + 2, k + 1, k + 1);
  }
  return out;
}

inline TruncatedSignature signature_of_path(const LeadLagPath& p, int order) {
  return signature_of_path(p.path, order);
}

}  // namespace sigtrade
