#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>

namespace cdrleak::roots {

enum class Status { Converged, NoBracket, MaxIterations };

struct Result {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
  Status status = Status::MaxIterations;
};

struct Options {
  double f_tol = 1e-10;  // |f(x)| bound required for success
  int max_iterations = 200;
};

/// Safeguarded Newton iteration inside a sign-change bracket [lo, hi].
/// `f(x)` returns {value, derivative}. A Newton step that leaves the current
/// bracket, or fails to halve the residual fast enough, is replaced by
/// bisection. Iterates until the step reaches machine resolution so the
/// returned root is as accurate as the residual allows, then checks f_tol.
template <class F>
Result newton_bisect(F&& f, double lo, double hi, const Options& opt = {}) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  Result res;
  const double f_lo = f(lo).first;
  const double f_hi = f(hi).first;
  if (f_lo == 0.0) return {lo, 0.0, 0, Status::Converged};
  if (f_hi == 0.0) return {hi, 0.0, 0, Status::Converged};
  if ((f_lo < 0.0) == (f_hi < 0.0) || std::isnan(f_lo) || std::isnan(f_hi)) {
    res.status = Status::NoBracket;
    res.x = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
    res.fx = std::abs(f_lo) < std::abs(f_hi) ? f_lo : f_hi;
    return res;
  }
  // Orient so that f(neg) < 0 < f(pos).
  double neg = f_lo < 0.0 ? lo : hi;
  double pos = f_lo < 0.0 ? hi : lo;

  double x = 0.5 * (lo + hi);
  double dx_old = std::abs(hi - lo);
  double dx = dx_old;
  auto [fx, dfx] = f(x);

  for (int it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    if (fx == 0.0) break;
    if (fx < 0.0)
      neg = x;
    else
      pos = x;

    const bool newton_leaves = ((x - pos) * dfx - fx) * ((x - neg) * dfx - fx) > 0.0;
    const bool newton_slow = std::abs(2.0 * fx) > std::abs(dx_old * dfx);
    if (newton_leaves || newton_slow || dfx == 0.0) {
      dx_old = dx;
      dx = 0.5 * (pos - neg);
      x = neg + dx;
    } else {
      dx_old = dx;
      dx = fx / dfx;
      x -= dx;
    }
    std::tie(fx, dfx) = f(x);

    const double x_tol = 4.0 * eps * std::max(1.0, std::abs(x));
    if (std::abs(dx) <= x_tol || std::abs(pos - neg) <= x_tol) break;
  }
  res.x = x;
  res.fx = fx;
  res.status = std::abs(fx) <= opt.f_tol ? Status::Converged : Status::MaxIterations;
  return res;
}

/// Derivative-free bracketed root search (Illinois variant of regula falsi).
/// Stops when |f| <= f_tol or the bracket collapses.
template <class F>
Result illinois(F&& f, double lo, double hi, const Options& opt = {}) {
  Result res;
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return {lo, 0.0, 0, Status::Converged};
  if (f_hi == 0.0) return {hi, 0.0, 0, Status::Converged};
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    res.status = Status::NoBracket;
    return res;
  }
  int side = 0;
  double x = lo;
  double fx = f_lo;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    if (!(x > std::min(lo, hi) && x < std::max(lo, hi))) x = 0.5 * (lo + hi);
    fx = f(x);
    if (std::abs(fx) <= opt.f_tol) {
      res.status = Status::Converged;
      break;
    }
    if ((fx < 0.0) == (f_hi < 0.0)) {
      hi = x;
      f_hi = fx;
      if (side == -1) f_lo *= 0.5;
      side = -1;
    } else {
      lo = x;
      f_lo = fx;
      if (side == +1) f_hi *= 0.5;
      side = +1;
    }
    if (std::abs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
  }
  res.x = x;
  res.fx = fx;
  if (res.status != Status::Converged)
    res.status = std::abs(fx) <= opt.f_tol ? Status::Converged : Status::MaxIterations;
  return res;
}

}  // namespace cdrleak::roots
