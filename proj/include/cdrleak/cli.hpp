#pragma once

// Pipelines behind the command-line tool. Data goes to the output stream as
// CSV, the human-readable summary to the error stream.
//
// Exit status: 0 success, 1 invalid configuration or scenario, 2 solver
// error, 3 failed verification.

#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cdrleak/analysis.hpp"
#include "cdrleak/equilibrium.hpp"
#include "cdrleak/error.hpp"
#include "cdrleak/io.hpp"
#include "cdrleak/policy.hpp"
#include "cdrleak/table.hpp"

namespace cdrleak {

enum class Command { Solve, Optimize, Prices, Sweep, Verify, Curves };

enum ExitStatus : int {
  kExitOk = 0,
  kExitInvalid = 1,
  kExitSolver = 2,
  kExitVerification = 3,
};

struct RunConfig {
  Command command = Command::Solve;
  std::string scenario_path;
  std::optional<std::string> sweep_path;
  std::optional<std::string> output_path;  // standard output when empty
  int seed_count = 200;
  std::optional<Allocation> point;
  int curve_points = 101;
  int workers = 1;
};

inline int exit_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidScenario:
    case ErrorCode::ConfigError:
      return kExitInvalid;
    case ErrorCode::AssertionFailure:
      return kExitVerification;
    default:
      return kExitSolver;
  }
}

namespace detail {

inline void summary_line(std::ostream& err, const char* key, double v) { err << "  " << key << " = " << format_number(v) << '\n'; }

inline void policy_summary(std::ostream& err, const CommandControlOptimum& o, const PolicyPrices& p) {
  err << "command-and-control optimum\n";
  summary_line(err, "E^A*", o.e_a_star);
  summary_line(err, "R*", o.r_star);
  summary_line(err, "E^W*", o.e_w_star);
  summary_line(err, "p", o.price);
  summary_line(err, "tau*", p.tau_star);
  summary_line(err, "sigma*", p.sigma_star);
  summary_line(err, "Theta", p.theta);
  summary_line(err, "wedge sigma_hat/tau_hat", p.wedge_ratio);
  err << "  trade case = " << to_string(p.trade_case) << '\n';
  err << "  ordering = " << (p.tau_star < p.sigma_star ? "tau* < sigma*" : "tau* >= sigma*") << '\n';
}

inline Scenario load_valid_scenario(const RunConfig& cfg) {
  if (cfg.scenario_path.empty()) throw Error(ErrorCode::ConfigError, "--scenario is required");
  const auto s = load_scenario(cfg.scenario_path);
  require_valid(s);
  return s;
}

inline Allocation require_point(const RunConfig& cfg) {
  if (!cfg.point) throw Error(ErrorCode::ConfigError, "--ea and --r are required");
  return *cfg.point;
}

inline Cell rate_cell(const std::optional<LeakageRates>& k, double LeakageRates::*field, ErrorCode err) {
  if (k) return (*k).*field;
  return error_cell(err);
}

inline int run_solve(const RunConfig& cfg, Table& out, std::ostream& err) {
  const auto s = load_valid_scenario(cfg);
  const auto [e_a, r] = require_point(cfg);
  const auto eq = solve_phi(s, e_a, r);
  std::optional<LeakageRates> k;
  ErrorCode rate_error = ErrorCode::SingularDerivative;
  try {
    k = leakage_rates_at(s, eq);
  } catch (const Error& e) {
    rate_error = e.code();
  }
  out.header = {"e_a", "r", "e_w", "price", "residual", "iterations", "e_gross", "e_net", "dphi_dea", "dphi_dr", "alpha", "lr_s"};
  out.rows.push_back({e_a, r, eq.e_w, eq.price, eq.residual, static_cast<double>(eq.iterations), eq.e_gross, eq.e_net,
                      rate_cell(k, &LeakageRates::dphi_dea, rate_error), rate_cell(k, &LeakageRates::dphi_dr, rate_error),
                      rate_cell(k, &LeakageRates::alpha, rate_error), rate_cell(k, &LeakageRates::lr_s, rate_error)});
  err << "equilibrium at (E^A, R) = (" << format_number(e_a) << ", " << format_number(r) << ")\n";
  summary_line(err, "E^W", eq.e_w);
  summary_line(err, "p", eq.price);
  return kExitOk;
}

inline int run_optimize(const RunConfig& cfg, Table& out, std::ostream& err, bool prices_table) {
  const auto s = load_valid_scenario(cfg);
  const auto o = optimize_command_control(s);
  const auto p = optimal_prices(s, o);
  if (prices_table) {
    out.header = {"tau_star", "sigma_star", "theta", "tau_hat", "sigma_hat", "wedge_ratio", "gap", "trade_case", "marginal_damage", "lr_s"};
    out.rows.push_back({p.tau_star, p.sigma_star, p.theta, p.tau_hat, p.sigma_hat, p.wedge_ratio, p.gap,
                        std::string(to_string(p.trade_case)), p.marginal_damage, p.rates.lr_s});
  } else {
    out.header = {"e_a_star", "r_star", "e_w_star", "c_a_star", "foc_residual_ea", "foc_residual_r", "hessian_negdef", "pi_r", "price"};
    out.rows.push_back({o.e_a_star, o.r_star, o.e_w_star, o.c_a_star, o.foc_residual_ea, o.foc_residual_r,
                        o.hessian_negdef ? 1.0 : 0.0, o.pi_r, o.price});
  }
  policy_summary(err, o, p);
  classify_trade_case(s, o, p);
  if (!o.hessian_negdef) {
    err << "error: numerical Hessian at the optimum is not negative definite (second-order condition)\n";
    return kExitVerification;
  }
  return kExitOk;
}

inline int run_sweep(const RunConfig& cfg, Table& out, std::ostream& err) {
  if (!cfg.sweep_path) throw Error(ErrorCode::ConfigError, "--sweep is required");
  std::optional<Scenario> base;
  if (!cfg.scenario_path.empty()) base = load_scenario(cfg.scenario_path);
  const auto spec = load_sweep(*cfg.sweep_path, base);
  out = sweep(spec, cfg.workers);
  std::size_t failed = 0;
  for (const auto& row : out.rows)
    for (const auto& c : row) failed += is_error_cell(c) ? 1 : 0;
  err << "sweep over " << spec.parameter << ": " << out.rows.size() << " rows, " << failed << " failed cells\n";
  return kExitOk;
}

inline int run_verify(const RunConfig& cfg, Table& out, std::ostream& err) {
  if (cfg.seed_count < 0) throw Error(ErrorCode::ConfigError, "--seeds must be non-negative");
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.seed_count));
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
  VerifyOptions options;
  options.workers = cfg.workers;
  const auto rep = verify_propositions(seeds, options);
  out = report_table(rep);
  err << "verification over " << cfg.seed_count << " seeds: " << rep.n_scenarios << " scenarios, "
      << rep.failures.size() << " failures, " << rep.skipped.size() << " skipped\n";
  for (const auto& c : rep.checks)
    err << "  " << c.name << ": " << c.passed << "/" << c.evaluated << '\n';
  for (const auto& f : rep.failures) err << "  FAILED " << f.check << " (seed " << f.seed << "): " << f.detail << '\n';
  return rep.passed() ? kExitOk : kExitVerification;
}

inline int run_curves(const RunConfig& cfg, Table& out, std::ostream& err) {
  const auto s = load_valid_scenario(cfg);
  const auto [e_a, r] = require_point(cfg);
  const auto grid = curve_grid(s, e_a, cfg.curve_points);
  const auto pts = mc_mb_curves(s, e_a, r, grid);
  out = curves_table(pts);
  if (const auto br = crossing_bracket(pts))
    err << "MC = MB crossing in [" << format_number(br->first) << ", " << format_number(br->second) << "]\n";
  else
    err << "no MC = MB crossing on the grid\n";
  return kExitOk;
}

}  // namespace detail

/// Runs one pipeline. `out` receives the CSV unless an output path is set.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Table table;
  int status = kExitOk;
  try {
    switch (cfg.command) {
      case Command::Solve: status = detail::run_solve(cfg, table, err); break;
      case Command::Optimize: status = detail::run_optimize(cfg, table, err, false); break;
      case Command::Prices: status = detail::run_optimize(cfg, table, err, true); break;
      case Command::Sweep: status = detail::run_sweep(cfg, table, err); break;
      case Command::Verify: status = detail::run_verify(cfg, table, err); break;
      case Command::Curves: status = detail::run_curves(cfg, table, err); break;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (table.header.empty()) return exit_status_for(e.code());
    status = exit_status_for(e.code());
  }

  if (cfg.output_path) {
    std::ofstream file(*cfg.output_path, std::ios::binary);
    if (!file) {
      err << "error: cannot write '" << *cfg.output_path << "'\n";
      return kExitInvalid;
    }
    write_csv(file, table);
  } else {
    write_csv(out, table);
  }
  return status;
}

}  // namespace cdrleak
