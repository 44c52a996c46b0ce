#pragma once

// Test-only reference computations. They share no code with the library:
// formulas are written out from the model definition and roots are found by
// plain bisection.

#include <cmath>
#include <optional>

namespace oracle {

struct Params {
  double fa, fb, g1, g2, c1, c2, h1, h2, lambda, e_max;
  bool damage = true;
};

inline Params baseline(double e_max = 15.0) { return {10, 0.5, 0.01, 0.001, 1, 0.2, 0.5, 0.3, 0.5, e_max}; }

inline double omega(const Params& p, double x) { return p.damage ? 1.0 - p.g1 * x - p.g2 * x * x : 1.0; }

inline double market_gap(const Params& p, double e_a, double r, double e_w) {
  const double e = e_a + e_w;
  return (p.c1 + p.c2 * e) - (p.fa - p.fb * e_w) * omega(p, e - r);
}

/// W's equilibrium demand by bisection on [0, e_max - e_a]; nullopt without a sign change.
inline std::optional<double> phi(const Params& p, double e_a, double r, double width = 1e-13) {
  double lo = 0.0, hi = p.e_max - e_a;
  if (hi <= 0.0) return std::nullopt;
  const double flo = market_gap(p, e_a, r, lo), fhi = market_gap(p, e_a, r, hi);
  if ((flo < 0) == (fhi < 0)) return std::nullopt;
  for (int i = 0; i < 300 && hi - lo > width; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((market_gap(p, e_a, r, mid) < 0) == (flo < 0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Region A's consumption, term by term.
inline std::optional<double> consumption(const Params& p, double e_a, double r) {
  const auto e_w = phi(p, e_a, r);
  if (!e_w) return std::nullopt;
  const double e = e_a + *e_w;
  if (e - r < 0.0) return std::nullopt;
  const double output = (p.fa * e_a - 0.5 * p.fb * e_a * e_a) * omega(p, e - r);
  const double price = p.c1 + p.c2 * e;
  const double rent = price * e - (p.c1 * e + 0.5 * p.c2 * e * e);
  const double removal_cost = p.h1 * r + 0.5 * p.h2 * r * r;
  return output + p.lambda * rent - price * e_a - removal_cost;
}

struct GridOptimum {
  double e_a, r, value;
  int i, j;
};

/// Exhaustive search over [0, e_max] x [0, r_max] on an n x n node grid.
inline std::optional<GridOptimum> grid_optimum(const Params& p, double r_max, int n) {
  std::optional<GridOptimum> best;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = p.e_max * i / (n - 1), r = r_max * j / (n - 1);
      const auto v = consumption(p, a, r);
      if (v && (!best || *v > best->value)) best = GridOptimum{a, r, *v, i, j};
    }
  }
  return best;
}

}  // namespace oracle
