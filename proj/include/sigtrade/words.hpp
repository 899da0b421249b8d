#pragma once

/*
words over a finite alphabet {0, 1, ..., A-1} and the algebra on them:
concatenation, shuffle product, and sparse linear functionals.  the
canonical enumeration everywhere is graded lexicographic: words sorted by
length first, then lexicographically within a length.  under that order a
word of length k over alphabet A sits at a computable offset, so flattened
coefficient vectors never need an explicit dictionary.
*/

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sigtrade {

// project-wide error type; thrown on any contract violation
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Letter = std::uint8_t;
using Word = std::vector<Letter>;

// graded lexicographic comparison: by length, then lexicographic
struct GradedLex {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

inline std::string word_str(const Word& w) {
  if (w.empty()) return "()";
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << ',';
    os << static_cast<int>(w[i]);
  }
  os << ')';
  return os.str();
}

inline void check_word(const Word& w, std::size_t alphabet) {
  for (Letter a : w)
    if (a >= alphabet)
      throw error("word " + word_str(w) + " uses letter outside alphabet of size " +
                  std::to_string(alphabet));
}

// number of words of length <= order, i.e. sum_{k<=order} A^k, with overflow guard
inline std::uint64_t word_count(std::size_t alphabet, int order) {
  if (alphabet == 0) throw error("alphabet must be nonempty");
  if (order < 0) throw error("order must be nonnegative");
  const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() / 2;
  std::uint64_t total = 0, level = 1;
  for (int k = 0; k <= order; ++k) {
    total += level;
    if (k < order) {
      if (level > cap / alphabet) throw error("word count overflows 64 bits");
      level *= alphabet;
    }
  }
  return total;
}

// offset of the first length-k word in the graded flattening
inline std::uint64_t level_offset(std::size_t alphabet, int k) {
  return k == 0 ? 0 : word_count(alphabet, k - 1);
}

// position of w in the graded-lex flattening over the given alphabet
inline std::uint64_t word_index(const Word& w, std::size_t alphabet) {
  check_word(w, alphabet);
  std::uint64_t v = 0;
  for (Letter a : w) v = v * alphabet + a;
  return level_offset(alphabet, static_cast<int>(w.size())) + v;
}

// inverse of word_index given the word length
inline Word word_at(std::uint64_t local_index, std::size_t alphabet, int length) {
  Word w(static_cast<std::size_t>(length));
  for (int i = length - 1; i >= 0; --i) {
    w[static_cast<std::size_t>(i)] = static_cast<Letter>(local_index % alphabet);
    local_index /= alphabet;
  }
  return w;
}

// all words of length <= order in canonical order; guarded by a hard cap
inline std::vector<Word> enumerate_words(std::size_t alphabet, int order,
                                         std::uint64_t cap = 10'000'000) {
  const std::uint64_t n = word_count(alphabet, order);
  if (n > cap)
    throw error("enumerate_words: " + std::to_string(n) + " words exceeds cap of " +
                std::to_string(cap));
  std::vector<Word> out;
  out.reserve(static_cast<std::size_t>(n));
  out.emplace_back();
  std::size_t level_begin = 0;
  for (int k = 1; k <= order; ++k) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i)
      for (std::size_t a = 0; a < alphabet; ++a) {
        Word w = out[i];
        w.push_back(static_cast<Letter>(a));
        out.push_back(std::move(w));
      }
    level_begin = level_end;
  }
  return out;
}

inline Word concat(const Word& u, const Word& v) {
  Word w = u;
  w.insert(w.end(), v.begin(), v.end());
  return w;
}

/*
sparse linear functional on the tensor algebra: finitely many words with
real coefficients over a declared alphabet.  kept sorted in graded-lex
order so iteration (and serialization) is canonical.
*/
struct LinearFunctional {
  std::size_t alphabet = 0;
  std::map<Word, double, GradedLex> terms;

  LinearFunctional() = default;
  explicit LinearFunctional(std::size_t alphabet_size) : alphabet(alphabet_size) {}

  double coeff(const Word& w) const {
    auto it = terms.find(w);
    return it == terms.end() ? 0.0 : it->second;
  }

  // largest word length present (0 for the empty functional)
  int degree() const {
    int m = 0;
    for (const auto& [w, c] : terms) m = std::max(m, static_cast<int>(w.size()));
    return m;
  }

  void add(const Word& w, double c) {
    check_word(w, alphabet);
    auto [it, inserted] = terms.emplace(w, c);
    if (!inserted) it->second += c;
  }

  LinearFunctional& operator+=(const LinearFunctional& o) {
    if (o.alphabet > alphabet) alphabet = o.alphabet;
    for (const auto& [w, c] : o.terms) add(w, c);
    return *this;
  }

  LinearFunctional& operator*=(double s) {
    for (auto& [w, c] : terms) c *= s;
    return *this;
  }
};

// right-concatenate a fixed word onto every term: sum_w c_w (w . v)
inline LinearFunctional concat(const LinearFunctional& f, const Word& v) {
  check_word(v, f.alphabet);
  LinearFunctional out(f.alphabet);
  for (const auto& [w, c] : f.terms) out.terms.emplace(concat(w, v), c);
  return out;
}

namespace detail {

using WordSum = std::map<Word, std::int64_t, GradedLex>;

// recursive shuffle on words with integer multiplicities:
//   u.a x v.b = (u x v.b).a + (u.a x v).b,  w x () = w.
// memoised on the (unordered) word pair; the product is commutative.
inline const WordSum& shuffle_words(const Word& u, const Word& v) {
  thread_local std::map<std::pair<Word, Word>, WordSum> cache;
  const bool flip = GradedLex{}(v, u);
  std::pair<Word, Word> key = flip ? std::make_pair(v, u) : std::make_pair(u, v);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  WordSum result;
  const Word& a = key.first;
  const Word& b = key.second;
  if (a.empty()) {
    result.emplace(b, 1);
  } else if (b.empty()) {
    result.emplace(a, 1);
  } else {
    Word a_head(a.begin(), a.end() - 1);
    Word b_head(b.begin(), b.end() - 1);
    for (const auto& [w, m] : shuffle_words(a_head, b)) {
      Word z = w;
      z.push_back(a.back());
      result[std::move(z)] += m;
    }
    for (const auto& [w, m] : shuffle_words(a, b_head)) {
      Word z = w;
      z.push_back(b.back());
      result[std::move(z)] += m;
    }
  }
  return cache.emplace(std::move(key), std::move(result)).first->second;
}

}  // namespace detail

// shuffle product of two words; coefficients are exact integer multiplicities
inline LinearFunctional shuffle_product(const Word& u, const Word& v, std::size_t alphabet) {
  check_word(u, alphabet);
  check_word(v, alphabet);
  LinearFunctional out(alphabet);
  for (const auto& [w, m] : detail::shuffle_words(u, v))
    out.terms.emplace(w, static_cast<double>(m));
  return out;
}

// bilinear extension of the shuffle to functionals
inline LinearFunctional shuffle_product(const LinearFunctional& f, const LinearFunctional& g) {
  if (f.alphabet != g.alphabet)
    throw error("shuffle: functionals declared over different alphabets");
  LinearFunctional out(f.alphabet);
  for (const auto& [u, cu] : f.terms)
    for (const auto& [v, cv] : g.terms)
      for (const auto& [w, m] : detail::shuffle_words(u, v))
        out.add(w, cu * cv * static_cast<double>(m));
  return out;
}

/*
anything exposing graded dense signature coefficients can be paired with a
functional: alphabet(), order(), and coefficient lookup by flat index.
*/
template <class S>
concept SignatureLike = requires(const S& s, std::uint64_t i) {
  { s.alphabet() } -> std::convertible_to<std::size_t>;
  { s.order() } -> std::convertible_to<int>;
  { s.coeff_at(i) } -> std::convertible_to<double>;
};

// <l, S> = sum_w l_w S^w; rejects words beyond the truncation order
template <SignatureLike S>
double pair(const LinearFunctional& f, const S& sig) {
  if (f.alphabet != sig.alphabet())
    throw error("pair: functional alphabet " + std::to_string(f.alphabet) +
                " != signature alphabet " + std::to_string(sig.alphabet()));
  double acc = 0.0;
  for (const auto& [w, c] : f.terms) {
    if (static_cast<int>(w.size()) > sig.order())
      throw error("pair: word " + word_str(w) + " exceeds signature order " +
                  std::to_string(sig.order()));
    acc += c * sig.coeff_at(word_index(w, sig.alphabet()));
  }
  return acc;
}

}  // namespace sigtrade
