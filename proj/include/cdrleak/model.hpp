#pragma once

// Functional forms for the two-region energy/climate economy.
//
//   production  F(E) = fa*E - fb/2*E^2        (per region, own energy use)
//   damages     Omega(X) = 1 - g1*X - g2*X^2  (X = gross emissions net of removal)
//   extraction  c(E) = c1*E + c2/2*E^2        (world supply)
//   removal     h(R) = h1*R + h2/2*R^2

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cdrleak/error.hpp"

namespace cdrleak {

/// Value with its first two derivatives.
struct Eval {
  double value;
  double d1;
  double d2;
};

struct ProductionSpec {
  double fa = 0.0;
  double fb = 0.0;
};

struct DamageSpec {
  double g1 = 0.0;
  double g2 = 0.0;
};

struct ExtractionSpec {
  double c1 = 0.0;
  double c2 = 0.0;
};

struct RemovalSpec {
  double h1 = 0.0;
  double h2 = 0.0;
};

struct Scenario {
  ProductionSpec production;
  DamageSpec damage;
  ExtractionSpec extraction;
  RemovalSpec removal;
  double lambda = 0.0;
  double e_max = 0.0;
  double tol_root = 1e-10;
  double tol_opt = 1e-9;
  // Diagnostic: Omega == 1, Omega' == 0. Never used for policy results.
  bool damage_channel_enabled = true;
  // Region A treats the energy price and resource rent as given.
  bool price_taker = false;
};

inline Eval production_eval(const ProductionSpec& spec, double e) {
  if (!(e >= 0.0) || !(e < spec.fa / spec.fb)) {
    std::ostringstream msg;
    msg << "production energy " << e << " outside [0, fa/fb = " << spec.fa / spec.fb << ")";
    throw Error(ErrorCode::DomainError, msg.str());
  }
  return {spec.fa * e - 0.5 * spec.fb * e * e, spec.fa - spec.fb * e, -spec.fb};
}

inline Eval damage_eval(const DamageSpec& spec, double e_net) {
  if (!std::isfinite(e_net)) throw Error(ErrorCode::DomainError, "non-finite damage argument");
  const double omega = 1.0 - spec.g1 * e_net - spec.g2 * e_net * e_net;
  if (!(omega > 0.0)) {
    std::ostringstream msg;
    msg << "Omega(" << e_net << ") = " << omega << " <= 0";
    throw Error(ErrorCode::DamageCollapse, msg.str());
  }
  return {omega, -spec.g1 - 2.0 * spec.g2 * e_net, -2.0 * spec.g2};
}

inline Eval extraction_eval(const ExtractionSpec& spec, double e) {
  if (!(e >= 0.0)) throw Error(ErrorCode::DomainError, "negative extraction quantity");
  return {spec.c1 * e + 0.5 * spec.c2 * e * e, spec.c1 + spec.c2 * e, spec.c2};
}

inline Eval removal_eval(const RemovalSpec& spec, double r) {
  if (!(r >= 0.0)) throw Error(ErrorCode::DomainError, "negative removal quantity");
  return {spec.h1 * r + 0.5 * spec.h2 * r * r, spec.h1 + spec.h2 * r, spec.h2};
}

/// Damage factor honoring the scenario's diagnostic switch.
inline Eval damage_factor(const Scenario& s, double e_net) {
  if (!s.damage_channel_enabled) return {1.0, 0.0, 0.0};
  return damage_eval(s.damage, e_net);
}

struct AssumptionCheck {
  std::string name;
  std::string condition;
  bool passed;
  std::string detail;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  /// Human-readable list of failed checks, one per line.
  std::string failures() const {
    std::string out;
    for (const auto& c : checks) {
      if (c.passed) continue;
      out += c.name + " (" + c.condition + ")";
      if (!c.detail.empty()) out += ": " + c.detail;
      out += '\n';
    }
    return out;
  }
};

namespace detail {

inline constexpr int kValidationGridPoints = 1000;

template <class Pred>
std::string first_grid_violation(double e_max, Pred&& pred) {
  for (int i = 0; i < kValidationGridPoints; ++i) {
    const double e = e_max * static_cast<double>(i) / (kValidationGridPoints - 1);
    if (!pred(e)) {
      std::ostringstream msg;
      msg << "violated at E = " << e;
      return msg.str();
    }
  }
  return {};
}

}  // namespace detail

/// Checks every curvature and range assumption of the model on a
/// 1000-point grid over [0, e_max]. Failures are reported, never thrown.
inline ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport report;
  auto add = [&](std::string name, std::string condition, bool ok, std::string detail = {}) {
    report.checks.push_back({std::move(name), std::move(condition), ok, std::move(detail)});
  };

  const auto& p = s.production;
  const auto& d = s.damage;
  const auto& x = s.extraction;
  const auto& h = s.removal;

  const double values[] = {p.fa, p.fb, d.g1, d.g2, x.c1, x.c2, h.h1, h.h2, s.lambda, s.e_max, s.tol_root, s.tol_opt};
  bool finite = true;
  for (double v : values) finite = finite && std::isfinite(v);
  add("finite_parameters", "all parameters finite", finite);
  if (!finite) return report;

  add("domain_bound", "e_max > 0", s.e_max > 0.0);
  add("tolerances", "tol_root > 0, tol_opt > 0", s.tol_root > 0.0 && s.tol_opt > 0.0);

  const bool fb_ok = p.fa > 0.0 && p.fb > 0.0;
  add("production_params", "fa > 0, fb > 0", fb_ok);
  add("production_marginal_positive", "F' > 0 on [0, e_max] (e_max < fa/fb)",
      fb_ok && s.e_max < p.fa / p.fb);
  add("production_concave", "F'' < 0", p.fb > 0.0);

  add("damage_params", "g1 >= 0", d.g1 >= 0.0);
  {
    const auto where = detail::first_grid_violation(s.e_max, [&](double e) {
      return 1.0 - d.g1 * e - d.g2 * e * e > 0.0;
    });
    add("damage_positive", "Omega > 0 on [0, e_max]", where.empty(), where);
  }
  {
    // Omega'(0) = -g1 may be zero when g1 = 0; strictness applies for E > 0.
    const auto where = detail::first_grid_violation(s.e_max, [&](double e) {
      const double slope = -d.g1 - 2.0 * d.g2 * e;
      return e > 0.0 ? slope < 0.0 : slope <= 0.0;
    });
    add("damage_decreasing", "Omega' < 0 on (0, e_max]", where.empty(), where);
  }
  add("damage_concave", "Omega'' < 0 (g2 > 0)", d.g2 > 0.0);

  add("extraction_params", "c1 >= 0", x.c1 >= 0.0);
  add("extraction_convex", "c'' >= 0 (c2 >= 0)", x.c2 >= 0.0);
  add("removal_params", "h1 >= 0", h.h1 >= 0.0);
  add("removal_convex", "h'' >= 0 (h2 >= 0)", h.h2 >= 0.0);
  add("ownership_share", "0 <= lambda <= 1", s.lambda >= 0.0 && s.lambda <= 1.0);
  return report;
}

/// Throws InvalidScenario listing every failed assumption.
inline void require_valid(const Scenario& s) {
  const auto report = validate_scenario(s);
  if (!report.ok()) throw Error(ErrorCode::InvalidScenario, report.failures());
}

}  // namespace cdrleak
