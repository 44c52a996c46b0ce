#pragma once

// World energy-market equilibrium. Region W demands energy until the world
// price (marginal extraction cost of total supply) equals its damaged
// marginal product:
//
//   c'(E^A + E^W) = F'(E^W) * Omega(E^A + E^W - R)
//
// which defines W's response E^W = phi(E^A, R).

#include <cmath>
#include <sstream>

#include "cdrleak/error.hpp"
#include "cdrleak/model.hpp"
#include "cdrleak/root_finding.hpp"

namespace cdrleak {

struct ResponseEvaluation {
  double e_w = 0.0;
  double price = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double e_gross = 0.0;
  double e_net = 0.0;
};

struct LeakageRates {
  double dphi_dea = 0.0;
  double dphi_dr = 0.0;
  double alpha = 0.0;
  double lr_s = 0.0;
};

inline constexpr int kRootIterationBudget = 200;
inline constexpr double kSingularThreshold = 1e-14;

/// Market-clearing residual c'(E) - F'(E^W)*Omega(E - R) and its derivative in E^W.
inline std::pair<double, double> market_residual(const Scenario& s, double e_a, double r, double e_w) {
  const double e = e_a + e_w;
  const auto prod = production_eval(s.production, e_w);
  const auto dmg = damage_factor(s, e - r);
  const auto ext = extraction_eval(s.extraction, e);
  return {ext.d1 - prod.d1 * dmg.value, ext.d2 - prod.d2 * dmg.value - prod.d1 * dmg.d1};
}

inline double world_price(const Scenario& s, double e_gross) {
  return extraction_eval(s.extraction, e_gross).d1;
}

inline ResponseEvaluation solve_phi(const Scenario& s, double e_a, double r) {
  if (!(e_a >= 0.0) || !(r >= 0.0)) throw Error(ErrorCode::DomainError, "E^A and R must be non-negative");
  if (!(e_a < s.e_max)) {
    std::ostringstream msg;
    msg << "E^A = " << e_a << " leaves no room below e_max = " << s.e_max;
    throw Error(ErrorCode::NoBracket, msg.str());
  }

  const auto residual = [&](double e_w) { return market_residual(s, e_a, r, e_w); };
  const auto root = roots::newton_bisect(residual, 0.0, s.e_max - e_a,
                                         {.f_tol = s.tol_root, .max_iterations = kRootIterationBudget});
  if (root.status == roots::Status::NoBracket) {
    std::ostringstream msg;
    msg << "market residual has no sign change for E^W in [0, " << s.e_max - e_a << "] at E^A = " << e_a
        << ", R = " << r;
    throw Error(ErrorCode::NoBracket, msg.str());
  }
  if (root.status == roots::Status::MaxIterations) {
    std::ostringstream msg;
    msg << "residual " << root.fx << " above tol_root after " << root.iterations << " iterations";
    throw Error(ErrorCode::MaxIterations, msg.str());
  }

  ResponseEvaluation out;
  out.e_w = root.x;
  out.e_gross = e_a + root.x;
  out.e_net = out.e_gross - r;
  out.price = world_price(s, out.e_gross);
  out.residual = std::abs(root.fx);
  out.iterations = root.iterations;
  if (out.e_net < 0.0) {
    std::ostringstream msg;
    msg << "net emissions E - R = " << out.e_net << " < 0 outside the damage domain";
    throw Error(ErrorCode::DomainError, msg.str());
  }
  return out;
}

struct PhiPartials {
  double dphi_dea = 0.0;
  double dphi_dr = 0.0;
};

/// Slopes of the response over a common denominator F''Omega + F'Omega' - c'',
/// which stays negative where the leakage-rate form is singular.
inline PhiPartials response_slopes_at(const Scenario& s, const ResponseEvaluation& eq) {
  const auto prod = production_eval(s.production, eq.e_w);
  const auto dmg = damage_factor(s, eq.e_net);
  const double slope = prod.d1 * dmg.d1;
  const double c2 = extraction_eval(s.extraction, eq.e_gross).d2;
  const double denom = prod.d2 * dmg.value + slope - c2;
  return {-(slope - c2) / denom, slope / denom};
}

/// Leakage rates from derivatives at a solved equilibrium point.
inline LeakageRates leakage_rates_at(const Scenario& s, const ResponseEvaluation& eq) {
  const auto prod = production_eval(s.production, eq.e_w);
  const auto dmg = damage_factor(s, eq.e_net);
  const double curv = prod.d2 * dmg.value;  // F''(E^W) Omega  < 0
  const double slope = prod.d1 * dmg.d1;    // F'(E^W) Omega'  <= 0
  const double c2 = extraction_eval(s.extraction, eq.e_gross).d2;

  const double denom = slope - c2;
  if (std::abs(denom) < kSingularThreshold)
    throw Error(ErrorCode::SingularDerivative, "F'(E^W) Omega' - c'' vanishes");

  LeakageRates out;
  out.dphi_dea = -1.0 / (1.0 + curv / denom);
  // (1 + (F''Omega - c'')/(F'Omega'))^-1, written without dividing by F'Omega'.
  out.dphi_dr = -slope / (c2 - curv - slope);
  // (1 - c''/(F'Omega'))^-1
  out.alpha = slope / denom;
  out.lr_s = c2 / (c2 - curv);
  return out;
}

inline LeakageRates leakage_rates(const Scenario& s, double e_a, double r) {
  return leakage_rates_at(s, solve_phi(s, e_a, r));
}

/// Central finite-difference partials of the root-found response.
inline PhiPartials phi_partials_fd(const Scenario& s, double e_a, double r, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorCode::DomainError, "finite-difference step must be positive");
  const double a_plus = solve_phi(s, e_a + step, r).e_w;
  const double a_minus = solve_phi(s, e_a - step, r).e_w;
  const double r_plus = solve_phi(s, e_a, r + step).e_w;
  const double r_minus = solve_phi(s, e_a, r - step).e_w;
  return {(a_plus - a_minus) / (2.0 * step), (r_plus - r_minus) / (2.0 * step)};
}

}  // namespace cdrleak
