#pragma once

/*
market factor paths: d tradeable asset channels plus N exogenous signal
channels on a shared time grid, with construction from raw columns or csv,
and slicing of one long history into fixed-horizon samples.
*/

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "sigtrade/signature.hpp"
#include "sigtrade/words.hpp"

namespace sigtrade {

/*
a path of d asset channels followed by N factor channels; time is kept
separately and rebased to start at 0.  values are node-major like
SampledPath (row k holds X_1..X_d, f_1..f_N at node k).
*/
struct MarketFactorPath {
  std::size_t d = 0;  // tradeable assets
  std::size_t N = 0;  // exogenous factors
  std::vector<double> times;
  std::vector<double> values;  // nodes * (d+N)

  std::size_t channels() const { return d + N; }
  std::size_t nodes() const { return times.size(); }
  std::size_t segments() const { return times.empty() ? 0 : times.size() - 1; }
  double at(std::size_t node, std::size_t ch) const { return values[node * channels() + ch]; }
  double& at(std::size_t node, std::size_t ch) { return values[node * channels() + ch]; }
  double asset(std::size_t node, std::size_t m) const { return at(node, m - 1); }  // m is 1-based
};

inline void validate(const MarketFactorPath& p) {
  if (p.d == 0) throw error("market path needs at least one asset channel");
  if (p.times.empty()) throw error("market path has no nodes");
  if (p.values.size() != p.nodes() * p.channels())
    throw error("market path value array has wrong shape");
  for (std::size_t i = 1; i < p.times.size(); ++i)
    if (!(p.times[i] > p.times[i - 1])) throw error("market path times must be strictly increasing");
  for (double v : p.values)
    if (!std::isfinite(v)) throw error("market path contains a non-finite value");
}

// the path the signature machinery consumes: channel 0 = time, then assets, then factors
inline SampledPath to_sampled(const MarketFactorPath& p) {
  SampledPath raw;
  raw.channels = p.channels();
  raw.times = p.times;
  raw.values = p.values;
  return time_augment(raw);
}

// sample paths sharing dimensions and grid length, e.g. windows of a history
// or independent simulations
struct SampleSet {
  std::size_t d = 0;
  std::size_t N = 0;
  std::vector<MarketFactorPath> samples;
};

inline void validate(const SampleSet& s) {
  if (s.samples.empty()) throw error("sample set is empty");
  for (const MarketFactorPath& p : s.samples) {
    validate(p);
    if (p.d != s.d || p.N != s.N) throw error("sample set mixes dimensions");
    if (p.nodes() != s.samples.front().nodes())
      throw error("sample set mixes horizon lengths");
  }
}

enum class FactorMode { raw, zscore, start_at_one };
enum class RebaseMode { divide, shift, none };

struct MarketPathOptions {
  bool normalize_assets = true;        // rebase assets to start at 1
  RebaseMode asset_rebase = RebaseMode::divide;
  FactorMode factor_mode = FactorMode::raw;
};

/*
assemble a MarketFactorPath from raw columns.  time is shifted to start at
0; assets are optionally rebased to start at 1, either multiplicatively
(prices) or additively (arithmetic models, increments preserved exactly);
factors pass through raw, z-scored, or additively rebased to 1.
*/
inline MarketFactorPath build_market_path(const std::vector<double>& times,
                                          const std::vector<std::vector<double>>& assets,
                                          const std::vector<std::vector<double>>& factors,
                                          const MarketPathOptions& opt = {}) {
  if (assets.empty()) throw error("build_market_path: need at least one asset column");
  const std::size_t n = times.size();
  if (n < 2) throw error("build_market_path: need at least two rows");
  for (const auto& col : assets)
    if (col.size() != n) throw error("build_market_path: asset column length mismatch");
  for (const auto& col : factors)
    if (col.size() != n) throw error("build_market_path: factor column length mismatch");

  MarketFactorPath out;
  out.d = assets.size();
  out.N = factors.size();
  out.times.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.times[k] = times[k] - times[0];
  out.values.resize(n * out.channels());

  for (std::size_t m = 0; m < assets.size(); ++m) {
    const auto& col = assets[m];
    double scale = 1.0, shift = 0.0;
    if (opt.normalize_assets && opt.asset_rebase == RebaseMode::divide) {
      if (col[0] == 0.0)
        throw error("build_market_path: asset " + std::to_string(m + 1) +
                    " starts at 0, cannot rebase multiplicatively");
      scale = 1.0 / col[0];
    } else if (opt.normalize_assets && opt.asset_rebase == RebaseMode::shift) {
      shift = 1.0 - col[0];
    }
    for (std::size_t k = 0; k < n; ++k) out.at(k, m) = col[k] * scale + shift;
  }

  for (std::size_t j = 0; j < factors.size(); ++j) {
    const auto& col = factors[j];
    double scale = 1.0, shift = 0.0;
    if (opt.factor_mode == FactorMode::zscore) {
      const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
      double var = 0.0;
      for (double v : col) var += (v - mean) * (v - mean);
      var /= static_cast<double>(n);
      if (var == 0.0)
        throw error("build_market_path: factor " + std::to_string(j + 1) +
                    " has zero variance, zscore would produce a degenerate channel");
      scale = 1.0 / std::sqrt(var);
      shift = -mean * scale;
    } else if (opt.factor_mode == FactorMode::start_at_one) {
      shift = 1.0 - col[0];
    }
    for (std::size_t k = 0; k < n; ++k) out.at(k, out.d + j) = col[k] * scale + shift;
  }

  validate(out);
  return out;
}

/*
slice one path into fixed-horizon windows: starts 0, stride, 2*stride, ...
while start + horizon fits.  each window is re-normalized: time rebased to
0 and assets rebased to 1 (divide for prices, shift for arithmetic models).
horizon and stride are in segments.
*/
inline SampleSet window_samples(const MarketFactorPath& p, std::size_t horizon,
                                std::size_t stride,
                                RebaseMode rebase = RebaseMode::divide) {
  validate(p);
  if (horizon < 1) throw error("window_samples: horizon must be at least 1 segment");
  if (stride < 1) throw error("window_samples: stride must be at least 1");
  if (horizon > p.segments())
    throw error("window_samples: horizon " + std::to_string(horizon) +
                " exceeds path length " + std::to_string(p.segments()));

  SampleSet set;
  set.d = p.d;
  set.N = p.N;
  for (std::size_t start = 0; start + horizon <= p.segments(); start += stride) {
    MarketFactorPath w;
    w.d = p.d;
    w.N = p.N;
    w.times.resize(horizon + 1);
    w.values.resize((horizon + 1) * p.channels());
    for (std::size_t k = 0; k <= horizon; ++k) {
      w.times[k] = p.times[start + k] - p.times[start];
      for (std::size_t ch = 0; ch < p.channels(); ++ch) w.at(k, ch) = p.at(start + k, ch);
    }
    for (std::size_t m = 0; m < p.d; ++m) {
      const double first = w.at(0, m);
      if (rebase == RebaseMode::divide) {
        if (first == 0.0) throw error("window_samples: window asset starts at 0");
        for (std::size_t k = 0; k <= horizon; ++k) w.at(k, m) /= first;
      } else if (rebase == RebaseMode::shift) {
        for (std::size_t k = 0; k <= horizon; ++k) w.at(k, m) += 1.0 - first;
      }
    }
    set.samples.push_back(std::move(w));
  }
  if (set.samples.empty()) throw error("window_samples: no complete window fits");
  return set;
}

namespace detail {

// days since 1970-01-01 for a proleptic gregorian date (howard hinnant's algorithm)
inline long long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097LL + static_cast<long long>(doe) - 719468LL;
}

// accepts plain numbers, YYYY-MM-DD, or YYYY-MM-DD[T ]HH:MM[:SS]; returns
// time in days for dates, verbatim for numbers
inline bool parse_time_field(const std::string& s, double& out) {
  if (s.size() >= 10 && s[4] == '-' && s[7] == '-') {
    int y, mo, d;
    if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &mo, &d) != 3) return false;
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return false;
    double day = static_cast<double>(days_from_civil(y, mo, d));
    if (s.size() > 10 && (s[10] == 'T' || s[10] == ' ')) {
      int h = 0, mi = 0, se = 0;
      const int got = std::sscanf(s.c_str() + 11, "%d:%d:%d", &h, &mi, &se);
      if (got < 2) return false;
      day += (h * 3600.0 + mi * 60.0 + se) / 86400.0;
    }
    out = day;
    return true;
  }
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

inline std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, delim)) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    std::size_t b = 0;
    while (b < field.size() && field[b] == ' ') ++b;
    out.push_back(field.substr(b));
  }
  return out;
}

}  // namespace detail

struct CsvSchema {
  std::string time_column;
  std::vector<std::string> asset_columns;
  std::vector<std::string> factor_columns;
  char delimiter = ',';
  double max_bad_fraction = 0.1;  // tolerated share of dropped rows
};

struct CsvLoadReport {
  std::size_t rows_total = 0;
  std::size_t rows_dropped = 0;
};

/*
schema-driven csv load: header row names the columns; rows are sorted by
time; rows with missing or unparseable fields are dropped and counted, and
the load fails if too many were dropped or any duplicate timestamp remains.
*/
inline MarketFactorPath load_csv(const std::string& filename, const CsvSchema& schema,
                                 const MarketPathOptions& opt = {},
                                 CsvLoadReport* report = nullptr) {
  std::ifstream in(filename);
  if (!in) throw error("load_csv: cannot open " + filename);
  if (schema.asset_columns.empty()) throw error("load_csv: schema names no asset columns");

  std::string line;
  if (!std::getline(in, line)) throw error("load_csv: " + filename + " is empty");
  const auto header = detail::split_line(line, schema.delimiter);
  auto col_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw error("load_csv: column '" + name + "' not in header of " + filename);
  };

  const std::size_t time_ix = col_of(schema.time_column);
  std::vector<std::size_t> asset_ix, factor_ix;
  for (const auto& c : schema.asset_columns) asset_ix.push_back(col_of(c));
  for (const auto& c : schema.factor_columns) factor_ix.push_back(col_of(c));

  struct Row {
    double t;
    std::vector<double> v;
  };
  std::vector<Row> rows;
  std::size_t total = 0, dropped = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++total;
    const auto fields = detail::split_line(line, schema.delimiter);
    Row r;
    r.v.reserve(asset_ix.size() + factor_ix.size());
    bool ok = true;
    auto grab = [&](std::size_t ix) {
      double x;
      if (ix >= fields.size() || fields[ix].empty() ||
          !detail::parse_time_field(fields[ix], x) || !std::isfinite(x)) {
        ok = false;
        return 0.0;
      }
      return x;
    };
    r.t = grab(time_ix);
    for (std::size_t ix : asset_ix) r.v.push_back(grab(ix));
    for (std::size_t ix : factor_ix) r.v.push_back(grab(ix));
    if (ok)
      rows.push_back(std::move(r));
    else
      ++dropped;
  }
  if (report) {
    report->rows_total = total;
    report->rows_dropped = dropped;
  }
  if (total == 0) throw error("load_csv: " + filename + " has no data rows");
  if (static_cast<double>(dropped) > schema.max_bad_fraction * static_cast<double>(total))
    throw error("load_csv: dropped " + std::to_string(dropped) + " of " +
                std::to_string(total) + " rows, above the configured tolerance");
  if (rows.size() < 2) throw error("load_csv: fewer than two usable rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.t < b.t; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].t == rows[i - 1].t)
      throw error("load_csv: duplicate timestamp at sorted row " + std::to_string(i));

  std::vector<double> times(rows.size());
  std::vector<std::vector<double>> assets(asset_ix.size(), std::vector<double>(rows.size()));
  std::vector<std::vector<double>> factors(factor_ix.size(), std::vector<double>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    times[k] = rows[k].t;
    for (std::size_t m = 0; m < asset_ix.size(); ++m) assets[m][k] = rows[k].v[m];
    for (std::size_t j = 0; j < factor_ix.size(); ++j)
      factors[j][k] = rows[k].v[asset_ix.size() + j];
  }
  return build_market_path(times, assets, factors, opt);
}

}  // namespace sigtrade
