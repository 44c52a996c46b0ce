#pragma once

// Randomized verification of the leakage and pricing results, comparative
// statics sweeps, and the marginal cost / marginal benefit curves of the
// energy market.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cdrleak/equilibrium.hpp"
#include "cdrleak/error.hpp"
#include "cdrleak/model.hpp"
#include "cdrleak/policy.hpp"
#include "cdrleak/rng.hpp"
#include "cdrleak/table.hpp"

namespace cdrleak {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Sampling ranges for random scenarios. e_max is drawn as a fraction of fa/fb.
struct ScenarioBounds {
  Range fa{8.0, 12.0};
  Range fb{0.4, 0.6};
  Range e_max_fraction{0.9, 0.98};
  Range g1{0.005, 0.02};
  Range g2{0.0005, 0.002};
  Range c1{2.0, 3.5};
  Range c2{0.05, 0.4};
  Range h1{0.05, 0.3};
  Range h2{0.3, 1.0};
  Range lambda{0.0, 1.0};
};

inline constexpr int kRejectionLimit = 1000;

/// Deterministic scenario for `seed`: parameters are drawn in a fixed order
/// from SplitMix64(seed) and redrawn until the scenario validates.
inline Scenario random_scenario(std::uint64_t seed, const ScenarioBounds& b = {}) {
  SplitMix64 rng(seed);
  for (int attempt = 0; attempt < kRejectionLimit; ++attempt) {
    Scenario s;
    s.production.fa = rng.uniform(b.fa.lo, b.fa.hi);
    s.production.fb = rng.uniform(b.fb.lo, b.fb.hi);
    s.e_max = rng.uniform(b.e_max_fraction.lo, b.e_max_fraction.hi) * s.production.fa / s.production.fb;
    s.damage.g1 = rng.uniform(b.g1.lo, b.g1.hi);
    s.damage.g2 = rng.uniform(b.g2.lo, b.g2.hi);
    s.extraction.c1 = rng.uniform(b.c1.lo, b.c1.hi);
    s.extraction.c2 = rng.uniform(b.c2.lo, b.c2.hi);
    s.removal.h1 = rng.uniform(b.h1.lo, b.h1.hi);
    s.removal.h2 = rng.uniform(b.h2.lo, b.h2.hi);
    s.lambda = rng.uniform(b.lambda.lo, b.lambda.hi);
    if (validate_scenario(s).ok()) return s;
  }
  std::ostringstream msg;
  msg << "seed " << seed << ": no valid scenario in " << kRejectionLimit << " draws";
  throw Error(ErrorCode::RejectionLimit, msg.str());
}

// ---------------------------------------------------------------------------
// Verification

/// Pass thresholds of the verification suite.
struct VerifyTolerances {
  double leakage_identity = 1e-12;
  double fd_relative = 1e-5;
  double fd_step = 1e-4;
  double closed_loop = 1e-6;
  double gap_decomposition = 1e-10;
  double balanced_theta = 1e-9;
  double wedge_relative = 1e-8;
  double special_case = 1e-9;
};

struct CheckStats {
  std::string name;
  int evaluated = 0;
  int passed = 0;
  double worst = -std::numeric_limits<double>::infinity();
};

struct SeedIssue {
  std::uint64_t seed = 0;
  std::string check;
  std::string detail;
};

struct VerificationReport {
  int n_scenarios = 0;
  std::vector<CheckStats> checks;
  std::vector<SeedIssue> failures;
  std::vector<SeedIssue> skipped;

  bool passed() const { return failures.empty(); }

  const CheckStats& check(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw Error(ErrorCode::ConfigError, "unknown check " + std::string(name));
  }
};

/// Check names in report order, with the metric each one tracks in `worst`.
inline const std::vector<std::string>& verification_checks() {
  static const std::vector<std::string> names = {
      "energy_leakage_bound",   // max(dphi/dE^A, -1 - dphi/dE^A); pass < 0
      "removal_leakage_bound",  // max(-dphi/dR, dphi/dR - 1); pass < 0
      "leakage_identity",       // |dphi/dR - alpha (-dphi/dE^A)|
      "leakage_ordering",       // dphi/dR + dphi/dE^A; pass < 0 when c'' > 0
      "fd_oracle",              // max relative error of analytic vs central-difference partials
      "foc_residual",           // max |FOC residual|
      "hessian_negdef",         // largest Hessian eigenvalue; pass < 0
      "closed_loop",            // max coordinate distance planner vs decentralized
      "gap_decomposition",      // |tau* - sigma* - decomposition|
      "gap_sign_structure",     // max(leakage term, -Theta coefficient); pass <= 0
      "balanced_wedge",         // balanced trade: relative error of sigma*/tau* vs 1/(1 - LR_s)
      "special_case",           // balanced trade: max(|tau_hat - tau*|, |sigma_hat - sigma*|)
      "exporter_case",          // lambda = 1: max(Theta, tau* - sigma*); pass < 0
      "balanced_case",          // balanced lambda: tau* - sigma*; pass < 0 with |Theta| <= 1e-9
  };
  return names;
}

namespace detail {

struct CheckResult {
  std::string name;
  bool passed = false;
  double metric = 0.0;
  std::string detail;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool skipped = false;
  std::string skip_reason;
  std::vector<CheckResult> results;
  std::vector<SeedIssue> partial_skips;
};

inline double max_eigenvalue(const std::array<double, 3>& h) {
  const double mean = 0.5 * (h[0] + h[2]);
  const double half = 0.5 * (h[0] - h[2]);
  return mean + std::sqrt(half * half + h[1] * h[1]);
}

inline std::string describe(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " = " << value;
  return os.str();
}

inline SeedOutcome verify_seed(std::uint64_t seed, const ScenarioBounds& bounds, const VerifyTolerances& tol) {
  SeedOutcome out;
  out.seed = seed;
  auto record = [&](const char* name, bool pass, double metric, std::string detail = {}) {
    out.results.push_back({name, pass, metric, std::move(detail)});
  };
  auto error_result = [&](const char* name, const Error& e) {
    out.results.push_back({name, false, std::numeric_limits<double>::quiet_NaN(), e.what()});
  };

  Scenario s;
  try {
    s = random_scenario(seed, bounds);
  } catch (const Error& e) {
    out.skipped = true;
    out.skip_reason = e.what();
    return out;
  }

  CommandControlOptimum opt;
  try {
    opt = optimize_command_control(s);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoInteriorOptimum) {
      out.skipped = true;
      out.skip_reason = e.what();
    } else {
      error_result("foc_residual", e);
    }
    return out;
  }

  const double c2 = s.extraction.c2;
  try {
    const auto k = leakage_rates(s, opt.e_a_star, opt.r_star);
    const double p1 = std::max(k.dphi_dea, -1.0 - k.dphi_dea);
    record("energy_leakage_bound", p1 < 0.0, p1, describe("dphi_dea", k.dphi_dea));
    const double p2 = std::max(-k.dphi_dr, k.dphi_dr - 1.0);
    record("removal_leakage_bound", p2 < 0.0, p2, describe("dphi_dr", k.dphi_dr));
    const double ident = std::abs(k.dphi_dr - k.alpha * (-k.dphi_dea));
    record("leakage_identity", ident <= tol.leakage_identity, ident);
    const double ineq = k.dphi_dr + k.dphi_dea;
    record("leakage_ordering", c2 > 0.0 ? ineq < 0.0 : std::abs(ineq) <= tol.leakage_identity, ineq);

    const auto fd = phi_partials_fd(s, opt.e_a_star, opt.r_star, tol.fd_step);
    const double rel = std::max(std::abs(fd.dphi_dea - k.dphi_dea) / std::abs(k.dphi_dea),
                                std::abs(fd.dphi_dr - k.dphi_dr) / std::abs(k.dphi_dr));
    record("fd_oracle", rel <= tol.fd_relative, rel);
  } catch (const Error& e) {
    error_result("fd_oracle", e);
  }

  const double foc = std::max(std::abs(opt.foc_residual_ea), std::abs(opt.foc_residual_r));
  record("foc_residual", foc <= s.tol_opt, foc);
  const double eig = max_eigenvalue(opt.hessian);
  record("hessian_negdef", opt.hessian_negdef, std::isnan(eig) ? std::numeric_limits<double>::infinity() : eig);

  try {
    const auto prices = optimal_prices(s, opt);
    const auto dec = decentralized_check(s, prices.tau_star, prices.sigma_star);
    const double dist = std::max({std::abs(dec.e_a - opt.e_a_star), std::abs(dec.r - opt.r_star),
                                  std::abs(dec.e_w - opt.e_w_star)});
    record("closed_loop", dist <= tol.closed_loop, dist);

    const double dec_err = std::abs(prices.gap - prices.gap_decomposed);
    record("gap_decomposition", dec_err <= tol.gap_decomposition, dec_err);
    const auto& k = prices.rates;
    const double leak_term = (1.0 - k.alpha) * k.dphi_dea * prices.marginal_damage;
    const double theta_coef = (1.0 - k.alpha) * k.dphi_dea + 1.0;
    const double sign = std::max(leak_term, -theta_coef);
    record("gap_sign_structure", sign <= 0.0, sign);
  } catch (const Error& e) {
    error_result("closed_loop", e);
  }

  // Region A owns all producers: a net exporter.
  try {
    Scenario exporter = s;
    exporter.lambda = 1.0;
    const auto o = optimize_command_control(exporter);
    const auto p = optimal_prices(exporter, o);
    const double m = std::max(p.theta, p.gap);
    record("exporter_case", p.theta < 0.0 && p.gap < 0.0, m, describe("theta", p.theta));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoInteriorOptimum)
      out.partial_skips.push_back({seed, "exporter_case", e.what()});
    else
      error_result("exporter_case", e);
  }

  // Ownership share equal to A's share of energy use: balanced trade.
  try {
    const auto bal = balanced_ownership(s, {.start = Allocation{opt.e_a_star, opt.r_star}});
    const auto& p = bal.prices;
    const bool balanced = std::abs(p.theta) <= tol.balanced_theta;
    record("balanced_case", balanced && p.gap < 0.0, p.gap, describe("theta", p.theta));
    const double expected = 1.0 / (1.0 - p.rates.lr_s);
    const double wedge_err = std::abs(p.sigma_star / p.tau_star - expected) / expected;
    record("balanced_wedge", balanced && wedge_err <= tol.wedge_relative, wedge_err);
    const double sc = std::max(std::abs(p.tau_hat - p.tau_star), std::abs(p.sigma_hat - p.sigma_star));
    record("special_case", balanced && sc <= tol.special_case, sc);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoInteriorOptimum)
      out.partial_skips.push_back({seed, "balanced_case", e.what()});
    else
      error_result("balanced_case", e);
  }
  return out;
}

/// Runs `job(i)` for i in [0, n) on up to `workers` threads; results land by index.
template <class Job>
void parallel_for(std::size_t n, int workers, Job&& job) {
  const std::size_t w = std::clamp<std::size_t>(workers > 0 ? static_cast<std::size_t>(workers) : 1, 1, std::max<std::size_t>(n, 1));
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(w);
  for (std::size_t t = 0; t < w; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += w) job(i);
    });
}

}  // namespace detail

struct VerifyOptions {
  ScenarioBounds bounds;
  VerifyTolerances tolerances;
  int workers = 1;
};

/// Runs the full invariant suite at each scenario's command-and-control
/// optimum. Boundary optima are skipped, not failed.
inline VerificationReport verify_propositions(std::span<const std::uint64_t> seeds, const VerifyOptions& opt = {}) {
  std::vector<detail::SeedOutcome> outcomes(seeds.size());
  detail::parallel_for(seeds.size(), opt.workers, [&](std::size_t i) {
    outcomes[i] = detail::verify_seed(seeds[i], opt.bounds, opt.tolerances);
  });

  VerificationReport rep;
  for (const auto& name : verification_checks()) rep.checks.push_back({name});
  auto stats = [&](const std::string& name) -> CheckStats& {
    for (auto& c : rep.checks)
      if (c.name == name) return c;
    throw Error(ErrorCode::ConfigError, "unknown check " + name);
  };

  for (const auto& o : outcomes) {
    if (o.skipped) {
      rep.skipped.push_back({o.seed, "scenario", o.skip_reason});
      continue;
    }
    ++rep.n_scenarios;
    for (const auto& r : o.results) {
      auto& c = stats(r.name);
      ++c.evaluated;
      if (r.passed) ++c.passed;
      if (!std::isnan(r.metric)) c.worst = std::max(c.worst, r.metric);
      if (!r.passed) rep.failures.push_back({o.seed, r.name, r.detail});
    }
    for (const auto& p : o.partial_skips) rep.skipped.push_back(p);
  }
  return rep;
}

/// Report as a CSV table: one `check` row per check, then one row per
/// failure and per skip.
inline Table report_table(const VerificationReport& rep) {
  Table t;
  t.header = {"record", "name", "evaluated", "passed", "worst", "seed", "detail"};
  t.rows.push_back({std::string("scenarios"), std::string("all"), static_cast<double>(rep.n_scenarios),
                    std::string(rep.passed() ? "PASS" : "FAIL"), std::string(), std::string(), std::string()});
  for (const auto& c : rep.checks) {
    t.rows.push_back({std::string("check"), c.name, static_cast<double>(c.evaluated), static_cast<double>(c.passed),
                      c.evaluated > 0 ? Cell(c.worst) : Cell(std::string()), std::string(), std::string()});
  }
  for (const auto& f : rep.failures)
    t.rows.push_back({std::string("failure"), f.check, std::string(), std::string(), std::string(),
                      static_cast<double>(f.seed), f.detail});
  for (const auto& f : rep.skipped)
    t.rows.push_back({std::string("skipped"), f.check, std::string(), std::string(), std::string(),
                      static_cast<double>(f.seed), f.detail});
  return t;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
  Scenario base;
  std::string parameter;
  std::vector<double> values;
  std::vector<std::string> outputs;
  // Where equilibrium quantities (e_w, price, leakage rates) are evaluated;
  // at the planner optimum when absent.
  std::optional<Allocation> point;
};

inline double& scenario_field(Scenario& s, std::string_view name) {
  if (name == "fa") return s.production.fa;
  if (name == "fb") return s.production.fb;
  if (name == "g1") return s.damage.g1;
  if (name == "g2") return s.damage.g2;
  if (name == "c1") return s.extraction.c1;
  if (name == "c2") return s.extraction.c2;
  if (name == "h1") return s.removal.h1;
  if (name == "h2") return s.removal.h2;
  if (name == "lambda") return s.lambda;
  if (name == "e_max") return s.e_max;
  if (name == "tol_root") return s.tol_root;
  if (name == "tol_opt") return s.tol_opt;
  throw Error(ErrorCode::ConfigError, "'" + std::string(name) + "' is not a numeric scenario field");
}

inline const std::vector<std::string>& sweep_output_names() {
  static const std::vector<std::string> names = {
      "e_w", "price", "dphi_dea", "dphi_dr", "alpha", "lr_s",
      "e_a_star", "r_star", "e_w_star", "c_a_star", "foc_residual_ea", "foc_residual_r", "hessian_negdef", "pi_r",
      "tau_star", "sigma_star", "theta", "tau_hat", "sigma_hat", "wedge_ratio", "gap", "trade_case", "marginal_damage",
  };
  return names;
}

namespace detail {

/// Lazily evaluates the quantities of one sweep row, caching failures.
class SweepRow {
 public:
  SweepRow(const Scenario& s, std::optional<Allocation> point) : s_(s), point_(point) {}

  Cell get(const std::string& name) {
    try {
      return compute(name);
    } catch (const Error& e) {
      return error_cell(e.code());
    }
  }

 private:
  template <class T>
  const T& cached(std::optional<T>& slot, std::optional<ErrorCode>& err, const std::function<T()>& f) {
    if (err) throw Error(*err, "cached failure");
    if (!slot) {
      try {
        slot = f();
      } catch (const Error& e) {
        err = e.code();
        throw;
      }
    }
    return *slot;
  }

  const CommandControlOptimum& optimum() {
    return cached<CommandControlOptimum>(opt_, opt_err_, [&] { return optimize_command_control(s_); });
  }
  const PolicyPrices& prices() {
    return cached<PolicyPrices>(prices_, prices_err_, [&] { return optimal_prices(s_, optimum()); });
  }
  const PointState& point() {
    return cached<PointState>(state_, state_err_, [&] {
      if (point_) return point_state(s_, (*point_)[0], (*point_)[1]);
      const auto& o = optimum();
      return point_state(s_, o.e_a_star, o.r_star);
    });
  }

  Cell compute(const std::string& n) {
    if (n == "e_w") return point().eq.e_w;
    if (n == "price") return point().eq.price;
    if (n == "dphi_dea") return point().rates.dphi_dea;
    if (n == "dphi_dr") return point().rates.dphi_dr;
    if (n == "alpha") return point().rates.alpha;
    if (n == "lr_s") return point().rates.lr_s;
    if (n == "e_a_star") return optimum().e_a_star;
    if (n == "r_star") return optimum().r_star;
    if (n == "e_w_star") return optimum().e_w_star;
    if (n == "c_a_star") return optimum().c_a_star;
    if (n == "foc_residual_ea") return optimum().foc_residual_ea;
    if (n == "foc_residual_r") return optimum().foc_residual_r;
    if (n == "hessian_negdef") return optimum().hessian_negdef ? 1.0 : 0.0;
    if (n == "pi_r") return optimum().pi_r;
    if (n == "tau_star") return prices().tau_star;
    if (n == "sigma_star") return prices().sigma_star;
    if (n == "theta") return prices().theta;
    if (n == "tau_hat") return prices().tau_hat;
    if (n == "sigma_hat") return prices().sigma_hat;
    if (n == "wedge_ratio") return prices().wedge_ratio;
    if (n == "gap") return prices().gap;
    if (n == "trade_case") return std::string(to_string(prices().trade_case));
    if (n == "marginal_damage") return prices().marginal_damage;
    throw Error(ErrorCode::ConfigError, "unknown sweep output '" + n + "'");
  }

  Scenario s_;
  std::optional<Allocation> point_;
  std::optional<CommandControlOptimum> opt_;
  std::optional<ErrorCode> opt_err_;
  std::optional<PolicyPrices> prices_;
  std::optional<ErrorCode> prices_err_;
  std::optional<PointState> state_;
  std::optional<ErrorCode> state_err_;
};

}  // namespace detail

inline void check_sweep_spec(const SweepSpec& spec) {
  Scenario probe = spec.base;
  scenario_field(probe, spec.parameter);
  const auto& known = sweep_output_names();
  for (const auto& o : spec.outputs)
    if (std::find(known.begin(), known.end(), o) == known.end())
      throw Error(ErrorCode::ConfigError, "unknown sweep output '" + o + "'");
}

/// One row per parameter value, in input order. Cells that cannot be
/// computed hold `ERR:<code>`.
inline Table sweep(const SweepSpec& spec, int workers = 1) {
  check_sweep_spec(spec);
  Table t;
  t.header.push_back(spec.parameter);
  t.header.insert(t.header.end(), spec.outputs.begin(), spec.outputs.end());
  t.rows.resize(spec.values.size());
  detail::parallel_for(spec.values.size(), workers, [&](std::size_t i) {
    Scenario s = spec.base;
    scenario_field(s, spec.parameter) = spec.values[i];
    auto& row = t.rows[i];
    row.push_back(spec.values[i]);
    if (!validate_scenario(s).ok()) {
      for (std::size_t k = 0; k < spec.outputs.size(); ++k) row.push_back(error_cell(ErrorCode::InvalidScenario));
      return;
    }
    detail::SweepRow eval(s, spec.point);
    for (const auto& o : spec.outputs) row.push_back(eval.get(o));
  });
  return t;
}

// ---------------------------------------------------------------------------
// Marginal cost / marginal benefit curves of region W's energy demand

struct CurvePoint {
  double e_w = 0.0;
  double mc = 0.0;  // c'(E^A + E^W)
  double mb = 0.0;  // F'(E^W) Omega(E^A + E^W - R)
};

inline std::vector<CurvePoint> mc_mb_curves(const Scenario& s, double e_a, double r, std::span<const double> grid) {
  std::vector<CurvePoint> out;
  out.reserve(grid.size());
  for (double e_w : grid) {
    if (!(e_w >= 0.0) || !(e_a + e_w <= s.e_max)) {
      std::ostringstream msg;
      msg << "grid point E^W = " << e_w << " outside [0, e_max - E^A]";
      throw Error(ErrorCode::DomainError, msg.str());
    }
    const double e = e_a + e_w;
    out.push_back({e_w, world_price(s, e),
                   production_eval(s.production, e_w).d1 * damage_factor(s, e - r).value});
  }
  return out;
}

/// Evenly spaced E^W grid over [0, e_max - E^A].
inline std::vector<double> curve_grid(const Scenario& s, double e_a, int points) {
  std::vector<double> g(static_cast<std::size_t>(std::max(points, 2)));
  const double hi = s.e_max - e_a;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = hi * static_cast<double>(i) / static_cast<double>(g.size() - 1);
  return g;
}

/// Adjacent grid points between which MC - MB changes sign.
inline std::optional<std::pair<double, double>> crossing_bracket(const std::vector<CurvePoint>& pts) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i].mc - pts[i].mb;
    const double b = pts[i + 1].mc - pts[i + 1].mb;
    if (a == 0.0) return std::pair{pts[i].e_w, pts[i].e_w};
    if ((a < 0.0) != (b < 0.0)) return std::pair{pts[i].e_w, pts[i + 1].e_w};
  }
  if (!pts.empty() && pts.back().mc == pts.back().mb) return std::pair{pts.back().e_w, pts.back().e_w};
  return std::nullopt;
}

inline Table curves_table(const std::vector<CurvePoint>& pts) {
  Table t;
  t.header = {"e_w", "mc", "mb"};
  for (const auto& p : pts) t.rows.push_back({p.e_w, p.mc, p.mb});
  return t;
}

}  // namespace cdrleak
