#pragma once

/*
artifact io.  everything that crosses a process boundary is a
self-describing json document (artifact tag, format version, dimensions,
word order tag) so a consumer can refuse inputs built under different
conventions instead of silently misreading them.  csv cells use %.17g,
which round-trips any double exactly; json doubles round-trip by
construction.  no artifact contains timestamps or absolute paths, so a
rerun with the same inputs is byte-identical.
*/

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sigtrade/engine.hpp"
#include "sigtrade/market.hpp"
#include "sigtrade/moments.hpp"
#include "sigtrade/optimize.hpp"
#include "sigtrade/signature.hpp"
#include "sigtrade/words.hpp"

namespace sigtrade {

// insertion-ordered so key order (and therefore output bytes) is fixed
using json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

// ---------------------------------------------------------------- files

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw error("write to " + path + " failed");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void save_json(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

inline json load_json(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw error(path + ": " + e.what());
  }
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw error("csv row width " + std::to_string(row.size()) + " does not match header of " +
                  std::to_string(header.size()));
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  write_text_file(path, out.str());
}

// ---------------------------------------------------------------- envelopes

namespace detail {

inline json artifact_header(const char* tag) {
  json j;
  j["artifact"] = tag;
  j["format_version"] = kFormatVersion;
  return j;
}

inline void require_artifact(const json& j, const char* tag, const std::string& what,
                             bool needs_word_order) {
  if (!j.is_object() || !j.contains("artifact") || !j["artifact"].is_string())
    throw error(what + ": not an artifact document");
  if (j["artifact"].get<std::string>() != tag)
    throw error(what + ": artifact tag is '" + j["artifact"].get<std::string>() +
                "', expected '" + tag + "'");
  if (!j.contains("format_version") || j["format_version"] != kFormatVersion)
    throw error(what + ": unsupported format version");
  if (needs_word_order) {
    if (!j.contains("word_order") || !j["word_order"].is_string())
      throw error(what + ": missing word order tag");
    if (j["word_order"].get<std::string>() != kWordOrderTag)
      throw error(what + ": word order tag '" + j["word_order"].get<std::string>() +
                  "' does not match this build's '" + kWordOrderTag + "'");
  }
}

inline std::vector<double> vec_of(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd eigen_of(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace detail

// ---------------------------------------------------------------- expected signature

inline json to_json(const ExpectedSignature& E) {
  json j = detail::artifact_header("expected_signature");
  j["word_order"] = kWordOrderTag;
  j["d"] = E.d;
  j["N"] = E.N;
  j["sample_count"] = E.sample_count;
  j["alphabet"] = E.alphabet();
  j["order"] = E.order();
  j["coeffs"] = E.mean.data();
  return j;
}

inline ExpectedSignature expected_signature_from_json(const json& j,
                                                      const std::string& what = "expected signature") {
  detail::require_artifact(j, "expected_signature", what, true);
  try {
    ExpectedSignature E;
    E.d = j.at("d").get<std::size_t>();
    E.N = j.at("N").get<std::size_t>();
    E.sample_count = j.at("sample_count").get<std::size_t>();
    const auto alphabet = j.at("alphabet").get<std::size_t>();
    const auto order = j.at("order").get<int>();
    if (E.d == 0) throw error(what + ": d must be positive");
    if (alphabet != 2 * (E.N + E.d + 1))
      throw error(what + ": alphabet " + std::to_string(alphabet) +
                  " does not match the lead-lag alphabet of d=" + std::to_string(E.d) +
                  ", N=" + std::to_string(E.N));
    E.mean = TruncatedSignature(alphabet, order);
    auto coeffs = j.at("coeffs").get<std::vector<double>>();
    if (coeffs.size() != E.mean.data().size())
      throw error(what + ": has " + std::to_string(coeffs.size()) + " coefficients, order " +
                  std::to_string(order) + " needs " + std::to_string(E.mean.data().size()));
    E.mean.data() = std::move(coeffs);
    return E;
  } catch (const nlohmann::json::exception& e) {
    throw error(what + ": " + e.what());
  }
}

// ---------------------------------------------------------------- moments

inline json to_json(const SigMoments& m) {
  json j = detail::artifact_header("sig_moments");
  j["word_order"] = kWordOrderTag;
  j["d"] = m.d;
  j["N"] = m.N;
  j["M"] = m.M;
  j["sample_count"] = m.sample_count;
  j["dim"] = m.dim();
  j["mu"] = detail::vec_of(m.mu);
  json sigma = json::array();
  for (Eigen::Index r = 0; r < m.sigma.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.sigma.cols(); ++c) row.push_back(m.sigma(r, c));
    sigma.push_back(std::move(row));
  }
  j["sigma"] = std::move(sigma);
  return j;
}

inline SigMoments moments_from_json(const json& j, const std::string& what = "moments") {
  detail::require_artifact(j, "sig_moments", what, true);
  try {
    SigMoments m;
    m.d = j.at("d").get<std::size_t>();
    m.N = j.at("N").get<std::size_t>();
    m.M = j.at("M").get<int>();
    m.sample_count = j.at("sample_count").get<std::size_t>();
    if (m.d == 0 || m.M < 0) throw error(what + ": bad dimensions");
    const std::size_t dim = m.dim();
    const auto mu = j.at("mu").get<std::vector<double>>();
    if (mu.size() != dim)
      throw error(what + ": mu has " + std::to_string(mu.size()) + " entries, (d,N,M) imply " +
                  std::to_string(dim));
    m.mu = detail::eigen_of(mu);
    const json& sigma = j.at("sigma");
    if (!sigma.is_array() || sigma.size() != dim)
      throw error(what + ": sigma must be a " + std::to_string(dim) + "-row matrix");
    m.sigma.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r) {
      const auto row = sigma[r].get<std::vector<double>>();
      if (row.size() != dim) throw error(what + ": sigma is not square");
      for (std::size_t c = 0; c < dim; ++c)
        m.sigma(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw error(what + ": " + e.what());
  }
}

// ---------------------------------------------------------------- strategies

inline json to_json(const SigStrategy& s) {
  json j = detail::artifact_header("sig_strategy");
  j["word_order"] = kWordOrderTag;
  j["d"] = s.d;
  j["N"] = s.N;
  j["M"] = s.M;
  j["lambda"] = s.lambda;
  j["delta"] = s.delta;
  j["ridge"] = s.ridge;
  j["degenerate"] = s.degenerate;
  j["words_per_asset"] = s.words_per_asset();
  json coeffs = json::array();
  for (std::size_t m = 1; m <= s.d; ++m) coeffs.push_back(detail::vec_of(s.asset_coeffs(m)));
  j["coeffs"] = std::move(coeffs);
  return j;
}

inline SigStrategy strategy_from_json(const json& j, const std::string& what = "strategy") {
  detail::require_artifact(j, "sig_strategy", what, true);
  try {
    SigStrategy s;
    s.d = j.at("d").get<std::size_t>();
    s.N = j.at("N").get<std::size_t>();
    s.M = j.at("M").get<int>();
    s.lambda = j.at("lambda").get<double>();
    s.delta = j.at("delta").get<double>();
    s.ridge = j.at("ridge").get<double>();
    s.degenerate = j.at("degenerate").get<bool>();
    if (s.d == 0 || s.M < 0) throw error(what + ": bad dimensions");
    const std::size_t W = s.words_per_asset();
    const json& coeffs = j.at("coeffs");
    if (!coeffs.is_array() || coeffs.size() != s.d)
      throw error(what + ": expected one coefficient block per asset");
    s.ell.resize(static_cast<Eigen::Index>(s.d * W));
    for (std::size_t m = 0; m < s.d; ++m) {
      const auto block = coeffs[m].get<std::vector<double>>();
      if (block.size() != W)
        throw error(what + ": asset " + std::to_string(m + 1) + " has " +
                    std::to_string(block.size()) + " coefficients, order " + std::to_string(s.M) +
                    " needs " + std::to_string(W));
      for (std::size_t w = 0; w < W; ++w)
        s.ell(static_cast<Eigen::Index>(m * W + w)) = block[w];
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw error(what + ": " + e.what());
  }
}

// ---------------------------------------------------------------- reports

inline json to_json(const FitReport& r) {
  json j = detail::artifact_header("functional_fit");
  j["word_order"] = kWordOrderTag;
  j["d"] = r.d;
  j["N"] = r.N;
  j["M"] = r.M;
  j["ridge"] = r.ridge;
  j["r2"] = r.r2;
  j["rmse"] = r.rmse;
  j["coeffs"] = detail::vec_of(r.coeffs);
  return j;
}

inline FitReport fit_report_from_json(const json& j, const std::string& what = "fit report") {
  detail::require_artifact(j, "functional_fit", what, true);
  try {
    FitReport r;
    r.d = j.at("d").get<std::size_t>();
    r.N = j.at("N").get<std::size_t>();
    r.M = j.at("M").get<int>();
    r.ridge = j.at("ridge").get<double>();
    r.r2 = j.at("r2").get<double>();
    r.rmse = j.at("rmse").get<double>();
    r.coeffs = detail::eigen_of(j.at("coeffs").get<std::vector<double>>());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw error(what + ": " + e.what());
  }
}

inline json to_json(const AggregateStats& a) {
  json j = detail::artifact_header("backtest_stats");
  j["n_paths"] = a.n_paths;
  j["mean_sharpe"] = a.mean_sharpe;
  j["quantile_levels"] = std::vector<double>{0.05, 0.25, 0.5, 0.75, 0.95};
  j["sharpe_quantiles"] = a.sharpe_quantiles;
  j["mean_terminal"] = a.mean_terminal;
  j["var_terminal"] = a.var_terminal;
  return j;
}

// ---------------------------------------------------------------- sample bundles

inline std::string sample_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sample_%04zu.csv", index);
  return buf;
}

inline void write_sample_csv(const std::string& path, const MarketFactorPath& p) {
  std::vector<std::string> header{"time"};
  for (std::size_t m = 1; m <= p.d; ++m) header.push_back("asset_" + std::to_string(m));
  for (std::size_t s = 1; s <= p.N; ++s) header.push_back("signal_" + std::to_string(s));
  std::vector<std::vector<std::string>> rows;
  rows.reserve(p.nodes());
  for (std::size_t k = 0; k < p.nodes(); ++k) {
    std::vector<std::string> row{format_double(p.times[k])};
    for (std::size_t ch = 0; ch < p.channels(); ++ch) row.push_back(format_double(p.at(k, ch)));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

inline MarketFactorPath read_sample_csv(const std::string& path, std::size_t d, std::size_t N) {
  std::ifstream in(path);
  if (!in) throw error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw error(path + " is empty");
  const auto header = detail::split_line(line, ',');
  if (header.size() != 1 + d + N)
    throw error(path + ": header has " + std::to_string(header.size()) +
                " columns, bundle dimensions imply " + std::to_string(1 + d + N));
  MarketFactorPath p;
  p.d = d;
  p.N = N;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_line(line, ',');
    if (fields.size() != header.size())
      throw error(path + ": row has " + std::to_string(fields.size()) + " fields");
    try {
      p.times.push_back(std::stod(fields[0]));
      for (std::size_t ch = 0; ch < d + N; ++ch) p.values.push_back(std::stod(fields[1 + ch]));
    } catch (const std::exception&) {
      throw error(path + ": unparseable numeric field");
    }
  }
  validate(p);
  return p;
}

/*
a directory of per-sample csv files plus a manifest recording the
dimensions, the file list, and whatever provenance the producer supplies
(model name, seed, resolved parameters).
*/
inline void write_sample_bundle(const std::string& dir, const SampleSet& set,
                                const json& provenance = json::object()) {
  validate(set);
  std::filesystem::create_directories(dir);
  json manifest = detail::artifact_header("sample_bundle");
  manifest["d"] = set.d;
  manifest["N"] = set.N;
  manifest["paths"] = set.samples.size();
  manifest["nodes"] = set.samples.front().nodes();
  if (!provenance.empty()) manifest["provenance"] = provenance;
  json files = json::array();
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    const std::string name = sample_file_name(i);
    write_sample_csv(dir + "/" + name, set.samples[i]);
    files.push_back(name);
  }
  manifest["files"] = std::move(files);
  save_json(dir + "/manifest.json", manifest);
}

inline SampleSet read_sample_bundle(const std::string& dir) {
  const json manifest = load_json(dir + "/manifest.json");
  detail::require_artifact(manifest, "sample_bundle", dir + "/manifest.json", false);
  try {
    SampleSet set;
    set.d = manifest.at("d").get<std::size_t>();
    set.N = manifest.at("N").get<std::size_t>();
    for (const auto& name : manifest.at("files"))
      set.samples.push_back(read_sample_csv(dir + "/" + name.get<std::string>(), set.d, set.N));
    validate(set);
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw error(dir + "/manifest.json: " + e.what());
  }
}

// ---------------------------------------------------------------- result tables

// one row per decision time: the position held over (t_k, t_{k+1}], the pnl
// of that step, and the running total after it
inline void write_backtest_csv(const std::string& path, const MarketFactorPath& p,
                               const BacktestResult& r) {
  std::vector<std::string> header{"time"};
  for (std::size_t m = 1; m <= p.d; ++m) header.push_back("position_" + std::to_string(m));
  header.push_back("pnl");
  header.push_back("cum_pnl");
  std::vector<std::vector<std::string>> rows;
  rows.reserve(r.pnl.size());
  for (std::size_t k = 0; k < r.pnl.size(); ++k) {
    std::vector<std::string> row{format_double(p.times[k])};
    for (std::size_t m = 0; m < p.d; ++m)
      row.push_back(format_double(r.positions(static_cast<Eigen::Index>(k),
                                               static_cast<Eigen::Index>(m))));
    row.push_back(format_double(r.pnl[k]));
    row.push_back(format_double(r.cum_pnl[k + 1]));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

struct LabeledFrontier {
  std::string label;
  std::vector<FrontierPoint> points;
};

inline void write_frontier_csv(const std::string& path,
                               const std::vector<LabeledFrontier>& curves) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& curve : curves)
    for (const auto& pt : curve.points)
      rows.push_back({curve.label, format_double(pt.delta), format_double(pt.expected_pnl),
                      format_double(pt.variance), format_double(pt.lambda)});
  write_csv(path, {"label", "delta", "expected_pnl", "variance", "lambda"}, rows);
}

}  // namespace sigtrade
