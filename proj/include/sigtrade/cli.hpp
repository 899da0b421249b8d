#pragma once

/*
command line pipeline.  five subcommands share a json config plus --seed and
--out overrides: simulate writes a sample bundle, fit estimates moments and
solves the strategy, backtest runs a strategy artifact over data, frontier
sweeps variance budgets per truncation order, learn-momentum regresses a
macd position series onto running-signature features.  every run echoes its
resolved config into the output directory, and reruns with the same config
and seed are byte-identical.  failures print one machine-readable json line
to stderr and exit nonzero.
*/

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "sigtrade/engine.hpp"
#include "sigtrade/io.hpp"
#include "sigtrade/market.hpp"
#include "sigtrade/moments.hpp"
#include "sigtrade/optimize.hpp"
#include "sigtrade/simulate.hpp"

namespace sigtrade::cli {

inline void reject_unknown(const json& j, std::initializer_list<const char*> known,
                           const std::string& ctx) {
  if (!j.is_object()) throw error(ctx + ": expected a json object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* name : known)
      if (item.key() == name) {
        ok = true;
        break;
      }
    if (!ok) throw error(ctx + ": unknown field '" + item.key() + "'");
  }
}

template <class T>
T get_as(const json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key)) throw error(ctx + ": missing required field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw error(ctx + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T dflt, const std::string& ctx) {
  if (!j.contains(key)) return dflt;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw error(ctx + ": field '" + key + "' has the wrong type");
  }
}

inline RebaseMode rebase_of(const std::string& s, const std::string& ctx) {
  if (s == "divide") return RebaseMode::divide;
  if (s == "shift") return RebaseMode::shift;
  if (s == "none") return RebaseMode::none;
  throw error(ctx + ": unknown rebase mode '" + s + "' (expected divide, shift, or none)");
}

inline FactorMode factor_mode_of(const std::string& s, const std::string& ctx) {
  if (s == "raw") return FactorMode::raw;
  if (s == "zscore") return FactorMode::zscore;
  if (s == "start_at_one") return FactorMode::start_at_one;
  throw error(ctx + ": unknown factor mode '" + s + "' (expected raw, zscore, or start_at_one)");
}

// ------------------------------------------------------------ model params

inline PairsConfig pairs_params(const json& p, const std::string& ctx) {
  reject_unknown(p, {"n_steps", "dt", "sigma_x", "sigma_y", "kappa", "x0", "y0"}, ctx);
  PairsConfig c;
  c.n_steps = get_or<std::size_t>(p, "n_steps", c.n_steps, ctx);
  c.dt = get_or<double>(p, "dt", c.dt, ctx);
  c.sigma_x = get_or<double>(p, "sigma_x", c.sigma_x, ctx);
  c.sigma_y = get_or<double>(p, "sigma_y", c.sigma_y, ctx);
  c.kappa = get_or<double>(p, "kappa", c.kappa, ctx);
  c.x0 = get_or<double>(p, "x0", c.x0, ctx);
  c.y0 = get_or<double>(p, "y0", c.y0, ctx);
  return c;
}

inline json params_json(const PairsConfig& c) {
  json j;
  j["n_steps"] = c.n_steps;
  j["dt"] = c.dt;
  j["sigma_x"] = c.sigma_x;
  j["sigma_y"] = c.sigma_y;
  j["kappa"] = c.kappa;
  j["x0"] = c.x0;
  j["y0"] = c.y0;
  return j;
}

inline SignalMarketConfig signal_params(const json& p, const std::string& ctx) {
  reject_unknown(p,
                 {"n_steps", "dt", "sigma_x", "sigma_f", "kappa", "alpha", "x0", "f0",
                  "include_signal"},
                 ctx);
  SignalMarketConfig c;
  c.n_steps = get_or<std::size_t>(p, "n_steps", c.n_steps, ctx);
  c.dt = get_or<double>(p, "dt", c.dt, ctx);
  c.sigma_x = get_or<double>(p, "sigma_x", c.sigma_x, ctx);
  c.sigma_f = get_or<double>(p, "sigma_f", c.sigma_f, ctx);
  c.kappa = get_or<double>(p, "kappa", c.kappa, ctx);
  c.alpha = get_or<double>(p, "alpha", c.alpha, ctx);
  c.x0 = get_or<double>(p, "x0", c.x0, ctx);
  c.f0 = get_or<double>(p, "f0", c.f0, ctx);
  c.include_signal = get_or<bool>(p, "include_signal", c.include_signal, ctx);
  return c;
}

inline json params_json(const SignalMarketConfig& c) {
  json j;
  j["n_steps"] = c.n_steps;
  j["dt"] = c.dt;
  j["sigma_x"] = c.sigma_x;
  j["sigma_f"] = c.sigma_f;
  j["kappa"] = c.kappa;
  j["alpha"] = c.alpha;
  j["x0"] = c.x0;
  j["f0"] = c.f0;
  j["include_signal"] = c.include_signal;
  return j;
}

struct ModelRun {
  SampleSet set;
  json resolved;  // model, paths, seed, rng, fully-defaulted params
};

inline ModelRun run_model(const json& spec, std::uint64_t seed, const std::string& ctx) {
  const auto model = get_as<std::string>(spec, "model", ctx);
  const auto paths = get_or<std::size_t>(spec, "paths", 1, ctx);
  const json params = spec.contains("params") ? spec.at("params") : json::object();

  ModelRun out;
  out.resolved["model"] = model;
  out.resolved["paths"] = paths;
  out.resolved["seed"] = seed;
  out.resolved["rng"] = GaussianRng::name();
  if (model == "pairs") {
    const PairsConfig c = pairs_params(params, ctx + ".params");
    out.resolved["params"] = params_json(c);
    out.set = simulate_pairs(c, seed, paths);
  } else if (model == "signal_market") {
    const SignalMarketConfig c = signal_params(params, ctx + ".params");
    out.resolved["params"] = params_json(c);
    out.set = simulate_signal_market(c, seed, paths);
  } else {
    throw error(ctx + ": unknown model '" + model + "' (expected pairs or signal_market)");
  }
  return out;
}

// ------------------------------------------------------------ input loading

/*
the 'input' object of fit/backtest/frontier/learn-momentum: a sample bundle
directory, a csv file with a column schema (optionally windowed into
samples), or an inline simulation.
*/
inline SampleSet load_input(const json& cfg, std::uint64_t seed, json* resolved_out) {
  if (!cfg.contains("input")) throw error("config: missing required field 'input'");
  const json& in = cfg.at("input");
  const std::string ctx = "input";
  json resolved = in;
  SampleSet set;

  if (in.is_object() && in.contains("bundle")) {
    reject_unknown(in, {"bundle"}, ctx);
    set = read_sample_bundle(get_as<std::string>(in, "bundle", ctx));
  } else if (in.is_object() && in.contains("csv")) {
    reject_unknown(in,
                   {"csv", "time_column", "asset_columns", "factor_columns", "delimiter",
                    "max_bad_fraction", "normalize_assets", "asset_rebase", "factor_mode",
                    "windowing"},
                   ctx);
    CsvSchema schema;
    schema.time_column = get_as<std::string>(in, "time_column", ctx);
    schema.asset_columns = get_as<std::vector<std::string>>(in, "asset_columns", ctx);
    schema.factor_columns =
        get_or<std::vector<std::string>>(in, "factor_columns", {}, ctx);
    const auto delim = get_or<std::string>(in, "delimiter", ",", ctx);
    if (delim.size() != 1) throw error(ctx + ": delimiter must be a single character");
    schema.delimiter = delim[0];
    schema.max_bad_fraction = get_or<double>(in, "max_bad_fraction", schema.max_bad_fraction, ctx);

    MarketPathOptions opt;
    opt.normalize_assets = get_or<bool>(in, "normalize_assets", opt.normalize_assets, ctx);
    opt.asset_rebase = rebase_of(get_or<std::string>(in, "asset_rebase", "divide", ctx), ctx);
    opt.factor_mode = factor_mode_of(get_or<std::string>(in, "factor_mode", "raw", ctx), ctx);

    const MarketFactorPath path = load_csv(get_as<std::string>(in, "csv", ctx), schema, opt);
    if (in.contains("windowing")) {
      const json& w = in.at("windowing");
      reject_unknown(w, {"horizon", "stride", "rebase"}, ctx + ".windowing");
      const auto horizon = get_as<std::size_t>(w, "horizon", ctx + ".windowing");
      const auto stride = get_or<std::size_t>(w, "stride", horizon, ctx + ".windowing");
      const RebaseMode rebase =
          rebase_of(get_or<std::string>(w, "rebase", "divide", ctx + ".windowing"),
                    ctx + ".windowing");
      set = window_samples(path, horizon, stride, rebase);
    } else {
      set.d = path.d;
      set.N = path.N;
      set.samples.push_back(path);
    }
  } else if (in.is_object() && in.contains("model")) {
    reject_unknown(in, {"model", "paths", "params", "seed"}, ctx);
    const std::uint64_t model_seed = get_or<std::uint64_t>(in, "seed", seed, ctx);
    ModelRun run = run_model(in, model_seed, ctx);
    set = std::move(run.set);
    resolved = std::move(run.resolved);
  } else {
    throw error(ctx + ": must name a 'bundle', a 'csv', or a 'model'");
  }

  if (resolved_out) *resolved_out = std::move(resolved);
  return set;
}

inline std::string backtest_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "backtest_%04zu.csv", index);
  return buf;
}

// resolved config echo, written into every output directory; the output
// path itself is excluded so runs into different directories stay
// byte-identical
inline void emit_config_echo(const json& cfg, std::uint64_t seed, const std::string& out) {
  std::filesystem::create_directories(out);
  json echo = cfg;
  echo.erase("out");
  echo["seed"] = seed;
  save_json(out + "/config.json", echo);
}

// ------------------------------------------------------------ subcommands

inline void cmd_simulate(const json& cfg, std::uint64_t seed, const std::string& out) {
  reject_unknown(cfg, {"model", "paths", "params", "seed", "out"}, "simulate config");
  emit_config_echo(cfg, seed, out);
  const ModelRun run = run_model(cfg, seed, "simulate config");
  write_sample_bundle(out, run.set, run.resolved);
  std::cout << "simulate: wrote " << run.set.samples.size() << " sample files to " << out
            << "\n";
}

inline void cmd_fit(const json& cfg, std::uint64_t seed, const std::string& out) {
  reject_unknown(cfg, {"input", "M", "delta", "ridge", "coeff_budget", "seed", "out"},
                 "fit config");
  emit_config_echo(cfg, seed, out);
  json resolved_input;
  const SampleSet set = load_input(cfg, seed, &resolved_input);
  const int M = get_as<int>(cfg, "M", "fit config");
  if (M < 0) throw error("fit config: M must be nonnegative");
  const auto delta = get_as<double>(cfg, "delta", "fit config");
  const auto ridge = get_or<double>(cfg, "ridge", 0.0, "fit config");
  const auto budget = get_or<std::uint64_t>(cfg, "coeff_budget", kDefaultCoeffBudget, "fit config");

  const ExpectedSignature E = expected_signature(set, 2 * M + 2, budget);
  const SigMoments m = build_moments(E, M);
  validate_moments(m);
  const SigStrategy s = solve(m, delta, ridge);
  const auto [mean, var] = evaluate(s, m);

  save_json(out + "/expected_signature.json", to_json(E));
  save_json(out + "/moments.json", to_json(m));
  save_json(out + "/strategy.json", to_json(s));

  json rep = sigtrade::detail::artifact_header("fit_report");
  rep["d"] = m.d;
  rep["N"] = m.N;
  rep["M"] = m.M;
  rep["sample_count"] = m.sample_count;
  rep["delta"] = delta;
  rep["ridge"] = ridge;
  rep["lambda"] = s.lambda;
  rep["degenerate"] = s.degenerate;
  rep["expected_pnl"] = mean;
  rep["variance"] = var;
  rep["condition_number"] = covariance_condition(m, ridge);
  rep["input"] = resolved_input;
  save_json(out + "/fit_report.json", rep);
  std::cout << "fit: M=" << M << " on " << set.samples.size() << " samples, expected pnl "
            << mean << " at variance " << var << "\n";
}

inline void cmd_backtest(const json& cfg, std::uint64_t seed, const std::string& out) {
  reject_unknown(cfg, {"strategy", "input", "annualization", "write_paths", "seed", "out"},
                 "backtest config");
  emit_config_echo(cfg, seed, out);
  const auto strategy_path = get_as<std::string>(cfg, "strategy", "backtest config");
  const SigStrategy s = strategy_from_json(load_json(strategy_path), strategy_path);
  json resolved_input;
  const SampleSet set = load_input(cfg, seed, &resolved_input);
  const auto ann = get_or<double>(cfg, "annualization", std::sqrt(252.0), "backtest config");
  if (!(ann > 0.0)) throw error("backtest config: annualization must be positive");
  const bool write_paths = get_or<bool>(cfg, "write_paths", true, "backtest config");

  const std::vector<BacktestResult> results = backtest_set(s, set, ann);
  if (write_paths)
    for (std::size_t i = 0; i < results.size(); ++i)
      write_backtest_csv(out + "/" + backtest_file_name(i), set.samples[i], results[i]);

  const AggregateStats agg = aggregate_stats(results);
  json stats = to_json(agg);
  stats["annualization"] = ann;
  stats["strategy"] = {{"d", s.d}, {"N", s.N}, {"M", s.M}, {"delta", s.delta}};
  stats["input"] = resolved_input;
  save_json(out + "/aggregate.json", stats);
  std::cout << "backtest: " << agg.n_paths << " paths, mean sharpe " << agg.mean_sharpe
            << ", mean terminal pnl " << agg.mean_terminal << "\n";
}

inline void cmd_frontier(const json& cfg, std::uint64_t seed, const std::string& out) {
  reject_unknown(cfg,
                 {"expected_signature", "moments", "input", "orders", "deltas", "ridge",
                  "cloud", "coeff_budget", "seed", "out"},
                 "frontier config");
  emit_config_echo(cfg, seed, out);
  const auto deltas = get_as<std::vector<double>>(cfg, "deltas", "frontier config");
  const auto ridge = get_or<double>(cfg, "ridge", 0.0, "frontier config");
  const auto budget =
      get_or<std::uint64_t>(cfg, "coeff_budget", kDefaultCoeffBudget, "frontier config");

  // moment source: a reusable expected-signature artifact (sliceable per
  // order), a single fixed-order moments artifact, or raw input data
  ExpectedSignature E;
  SigMoments fixed;
  bool have_fixed = false;
  std::vector<int> orders;

  if (cfg.contains("expected_signature")) {
    const auto path = get_as<std::string>(cfg, "expected_signature", "frontier config");
    E = expected_signature_from_json(load_json(path), path);
    orders = get_as<std::vector<int>>(cfg, "orders", "frontier config");
  } else if (cfg.contains("moments")) {
    const auto path = get_as<std::string>(cfg, "moments", "frontier config");
    fixed = moments_from_json(load_json(path), path);
    have_fixed = true;
    orders = get_or<std::vector<int>>(cfg, "orders", {fixed.M}, "frontier config");
    if (orders.size() != 1 || orders[0] != fixed.M)
      throw error("frontier config: a moments artifact fixes the order to M=" +
                  std::to_string(fixed.M) + "; use an expected_signature artifact to sweep orders");
  } else if (cfg.contains("input")) {
    orders = get_as<std::vector<int>>(cfg, "orders", "frontier config");
    if (orders.empty()) throw error("frontier config: 'orders' is empty");
    int max_m = 0;
    for (int m : orders) {
      if (m < 0) throw error("frontier config: orders must be nonnegative");
      max_m = std::max(max_m, m);
    }
    const SampleSet set = load_input(cfg, seed, nullptr);
    E = expected_signature(set, 2 * max_m + 2, budget);
  } else {
    throw error("frontier config: need 'expected_signature', 'moments', or 'input'");
  }
  if (orders.empty()) throw error("frontier config: 'orders' is empty");

  auto moments_at = [&](int M) -> SigMoments {
    if (have_fixed) return fixed;
    return build_moments(E, M);
  };

  std::vector<LabeledFrontier> curves;
  for (int M : orders)
    curves.push_back({"M=" + std::to_string(M), frontier(moments_at(M), deltas, ridge)});
  write_frontier_csv(out + "/frontier.csv", curves);

  if (cfg.contains("cloud")) {
    const json& cl = cfg.at("cloud");
    reject_unknown(cl, {"count", "magnitude", "seed", "order", "delta"}, "frontier config.cloud");
    const auto count = get_or<std::size_t>(cl, "count", 1000, "cloud");
    const auto magnitude = get_or<double>(cl, "magnitude", 0.5, "cloud");
    const auto cloud_seed = get_or<std::uint64_t>(cl, "seed", seed, "cloud");
    int cloud_order = orders[0];
    for (int m : orders) cloud_order = std::max(cloud_order, m);
    cloud_order = get_or<int>(cl, "order", cloud_order, "cloud");
    const auto cloud_delta = get_or<double>(cl, "delta", deltas.front(), "cloud");

    const SigMoments m = moments_at(cloud_order);
    const SigStrategy s = solve(m, cloud_delta, ridge);
    const auto [mean, var] = evaluate(s, m);
    std::vector<LabeledFrontier> cloud_curves;
    cloud_curves.push_back({"optimum", {{cloud_delta, mean, var, s.lambda}}});
    cloud_curves.push_back({"perturbed", perturb_cloud(s, m, count, magnitude, cloud_seed)});
    write_frontier_csv(out + "/cloud.csv", cloud_curves);
  }
  std::cout << "frontier: " << curves.size() << " curves over " << deltas.size()
            << " budgets\n";
}

inline void cmd_learn_momentum(const json& cfg, std::uint64_t seed, const std::string& out) {
  reject_unknown(cfg,
                 {"input", "asset", "macd", "orders", "ridge", "comparison", "coeff_budget",
                  "seed", "out"},
                 "learn-momentum config");
  emit_config_echo(cfg, seed, out);
  json resolved_input;
  const SampleSet set = load_input(cfg, seed, &resolved_input);
  if (set.samples.size() != 1)
    throw error("learn-momentum needs a single price path, input has " +
                std::to_string(set.samples.size()) + " samples");
  const MarketFactorPath& full = set.samples.front();
  const auto asset = get_or<std::size_t>(cfg, "asset", 1, "learn-momentum config");
  if (asset < 1 || asset > full.d)
    throw error("learn-momentum config: asset " + std::to_string(asset) + " outside 1.." +
                std::to_string(full.d));

  MarketFactorPath px;
  px.d = 1;
  px.N = 0;
  px.times = full.times;
  px.values.resize(full.nodes());
  std::vector<double> prices(full.nodes());
  for (std::size_t k = 0; k < full.nodes(); ++k) {
    prices[k] = full.asset(k, asset);
    px.values[k] = prices[k];
  }

  const json mac = cfg.contains("macd") ? cfg.at("macd") : json::object();
  reject_unknown(mac, {"fast", "slow", "L", "scale"}, "learn-momentum config.macd");
  const auto fast = get_or<std::size_t>(mac, "fast", 10, "macd");
  const auto slow = get_or<std::size_t>(mac, "slow", 20, "macd");
  const auto L = get_or<double>(mac, "L", 1.0, "macd");
  const auto scale = get_or<double>(mac, "scale", 0.0, "macd");

  const std::vector<double> signal = macd(prices, fast, slow);
  const std::vector<double> pos = momentum_positions(prices, fast, slow, L, scale);
  const std::vector<double> target(pos.begin(), pos.end() - 1);

  const auto orders = get_or<std::vector<int>>(cfg, "orders", {1, 2, 3}, "learn-momentum config");
  if (orders.empty()) throw error("learn-momentum config: 'orders' is empty");
  const auto ridge = get_or<double>(cfg, "ridge", 0.0, "learn-momentum config");

  std::vector<FitReport> fits;
  std::vector<Eigen::VectorXd> fitted_series;
  std::vector<std::vector<std::string>> r2_rows;
  for (int M : orders) {
    if (M < 0) throw error("learn-momentum config: orders must be nonnegative");
    FitReport rep = learn_functional(px, target, M, ridge);
    save_json(out + "/fit_M" + std::to_string(M) + ".json", to_json(rep));
    r2_rows.push_back({std::to_string(M), format_double(rep.r2), format_double(rep.rmse)});

    SigStrategy tmp;
    tmp.d = 1;
    tmp.N = 0;
    tmp.M = M;
    tmp.ell = rep.coeffs;
    fitted_series.push_back(positions(tmp, px).col(0));
    fits.push_back(std::move(rep));
  }
  write_csv(out + "/r2_table.csv", {"order", "r2", "rmse"}, r2_rows);

  std::vector<std::string> header{"time", "price", "macd", "target"};
  for (int M : orders) header.push_back("fit_M" + std::to_string(M));
  std::vector<std::vector<std::string>> trace_rows;
  for (std::size_t k = 0; k < target.size(); ++k) {
    std::vector<std::string> row{format_double(px.times[k]), format_double(prices[k]),
                                 format_double(signal[k]), format_double(target[k])};
    for (const auto& series : fitted_series)
      row.push_back(format_double(series(static_cast<Eigen::Index>(k))));
    trace_rows.push_back(std::move(row));
  }
  write_csv(out + "/positions.csv", header, trace_rows);

  // risk-return comparison at matched variance: window the series into
  // samples, price the learned functional on the estimated moments, and
  // solve the optimum at the learned functional's own variance
  if (cfg.contains("comparison")) {
    const json& cmp = cfg.at("comparison");
    reject_unknown(cmp, {"horizon", "stride", "rebase", "ridge"}, "learn-momentum config.comparison");
    const auto horizon = get_as<std::size_t>(cmp, "horizon", "comparison");
    const auto stride = get_or<std::size_t>(cmp, "stride", horizon, "comparison");
    const RebaseMode rebase =
        rebase_of(get_or<std::string>(cmp, "rebase", "divide", "comparison"), "comparison");
    const auto cmp_ridge = get_or<double>(cmp, "ridge", ridge, "comparison");
    const auto budget =
        get_or<std::uint64_t>(cfg, "coeff_budget", kDefaultCoeffBudget, "learn-momentum config");

    int max_m = 0;
    for (int m : orders) max_m = std::max(max_m, m);
    const SampleSet windows = window_samples(px, horizon, stride, rebase);
    const ExpectedSignature E = expected_signature(windows, 2 * max_m + 2, budget);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < fits.size(); ++i) {
      const SigMoments m = build_moments(E, fits[i].M);
      const auto [lm, lv] = evaluate(fits[i].coeffs, m);
      if (!(lv > 0.0)) continue;  // learned functional carries no model risk
      const SigStrategy opt = solve(m, lv, cmp_ridge);
      const auto [om, ov] = evaluate(opt, m);
      rows.push_back({std::to_string(fits[i].M), format_double(lv), format_double(lm),
                      format_double(om), format_double(ov)});
    }
    write_csv(out + "/comparison.csv",
              {"order", "variance", "learned_expected_pnl", "optimal_expected_pnl",
               "optimal_variance"},
              rows);
  }
  std::cout << "learn-momentum: fitted " << orders.size() << " orders on " << target.size()
            << " decision times\n";
}

// ------------------------------------------------------------ driver

inline int run(int argc, const char* const* argv) {
  CLI::App app{"signature trading strategies: simulate, fit, backtest, frontier, learn-momentum"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    CLI::App* sub = nullptr;
  };
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "generate a synthetic market sample bundle"},
      {"fit", "estimate signature moments and solve the optimal strategy"},
      {"backtest", "run a strategy artifact over sample data"},
      {"frontier", "sweep variance budgets per truncation order"},
      {"learn-momentum", "regress a macd position series onto signature features"}};
  std::vector<SubArgs> args(commands.size());
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, commands[i].second);
    sub->add_option("--config", args[i].config, "json config file")->required();
    sub->add_option("--seed", args[i].seed, "override the config seed");
    sub->add_option("--out", args[i].out, "output directory (overrides config)");
    args[i].sub = sub;
  }

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    json err;
    err["error"] = {{"type", "usage"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return e.get_exit_code();
  }

  std::size_t chosen = commands.size();
  for (std::size_t i = 0; i < commands.size(); ++i)
    if (args[i].sub->parsed()) chosen = i;
  const std::string name = commands[chosen].first;

  try {
    const json cfg = load_json(args[chosen].config);
    if (!cfg.is_object()) throw error(args[chosen].config + ": config must be a json object");
    const std::uint64_t seed = args[chosen].sub->count("--seed")
                                   ? args[chosen].seed
                                   : get_or<std::uint64_t>(cfg, "seed", 0, "config");
    std::string out = args[chosen].out;
    if (out.empty()) out = get_or<std::string>(cfg, "out", "", "config");
    if (out.empty())
      throw error("no output directory: pass --out or set \"out\" in the config");

    if (name == "simulate")
      cmd_simulate(cfg, seed, out);
    else if (name == "fit")
      cmd_fit(cfg, seed, out);
    else if (name == "backtest")
      cmd_backtest(cfg, seed, out);
    else if (name == "frontier")
      cmd_frontier(cfg, seed, out);
    else
      cmd_learn_momentum(cfg, seed, out);
    return 0;
  } catch (const std::exception& e) {
    json err;
    err["error"] = {{"type", "runtime"}, {"command", name}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}

// in-process invocation used by tests: argv without the program name
inline int run(const std::vector<std::string>& argv) {
  std::vector<std::string> full{"sigtrade"};
  full.insert(full.end(), argv.begin(), argv.end());
  std::vector<const char*> ptrs;
  ptrs.reserve(full.size());
  for (const auto& s : full) ptrs.push_back(s.c_str());
  return run(static_cast<int>(ptrs.size()), ptrs.data());
}

}  // namespace sigtrade::cli
