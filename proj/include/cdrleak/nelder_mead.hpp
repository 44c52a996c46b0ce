#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace cdrleak::opt {

template <std::size_t N>
using Point = std::array<double, N>;

struct SimplexOptions {
  double x_tol = 1e-9;   // simplex diameter (max-norm) at termination
  double f_tol = 1e-15;  // relative spread of vertex values at termination
  int max_evaluations = 5000;
};

template <std::size_t N>
struct SimplexResult {
  Point<N> x{};
  double fx = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead minimization with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
/// The objective may return +inf to mark infeasible points.
template <std::size_t N, class F>
SimplexResult<N> nelder_mead(F&& f, const Point<N>& start, const Point<N>& step,
                             const SimplexOptions& opt = {}) {
  struct Vertex {
    Point<N> x;
    double fx;
  };
  std::array<Vertex, N + 1> v;
  int evals = 0;
  auto eval = [&](const Point<N>& x) {
    ++evals;
    return f(x);
  };

  v[0] = {start, eval(start)};
  for (std::size_t i = 0; i < N; ++i) {
    Point<N> x = start;
    x[i] += step[i];
    double fx = eval(x);
    if (!std::isfinite(fx)) {
      x[i] = start[i] - step[i];
      fx = eval(x);
    }
    v[i + 1] = {x, fx};
  }

  auto affine = [](const Point<N>& a, const Point<N>& b, double t) {
    Point<N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + t * (b[i] - a[i]);
    return out;
  };

  SimplexResult<N> res;
  while (evals < opt.max_evaluations) {
    std::sort(v.begin(), v.end(), [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; });

    double diameter = 0.0;
    for (std::size_t k = 1; k <= N; ++k)
      for (std::size_t i = 0; i < N; ++i) diameter = std::max(diameter, std::abs(v[k].x[i] - v[0].x[i]));
    const double spread = std::abs(v[N].fx - v[0].fx);
    if (std::isfinite(v[N].fx) &&
        (diameter <= opt.x_tol || spread <= opt.f_tol * (1.0 + std::abs(v[0].fx)))) {
      res.converged = true;
      break;
    }

    Point<N> centroid{};
    for (std::size_t k = 0; k < N; ++k)
      for (std::size_t i = 0; i < N; ++i) centroid[i] += v[k].x[i] / static_cast<double>(N);

    const Point<N> xr = affine(centroid, v[N].x, -1.0);
    const double fr = eval(xr);
    if (fr < v[0].fx) {
      const Point<N> xe = affine(centroid, v[N].x, -2.0);
      const double fe = eval(xe);
      v[N] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < v[N - 1].fx) {
      v[N] = {xr, fr};
      continue;
    }
    if (fr < v[N].fx) {
      const Point<N> xc = affine(centroid, xr, 0.5);
      const double fc = eval(xc);
      if (fc <= fr) {
        v[N] = {xc, fc};
        continue;
      }
    } else {
      const Point<N> xc = affine(centroid, v[N].x, 0.5);
      const double fc = eval(xc);
      if (fc < v[N].fx) {
        v[N] = {xc, fc};
        continue;
      }
    }
    for (std::size_t k = 1; k <= N; ++k) {
      v[k].x = affine(v[0].x, v[k].x, 0.5);
      v[k].fx = eval(v[k].x);
    }
  }
  const auto best = std::min_element(v.begin(), v.end(), [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; });
  res.x = best->x;
  res.fx = best->fx;
  res.evaluations = evals;
  return res;
}

}  // namespace cdrleak::opt
