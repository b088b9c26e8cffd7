#pragma once

#include <cmath>
#include <functional>

namespace qdmft {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // accumulated Richardson estimate
  std::size_t evaluations = 0;
  bool depth_limited = false;
};

namespace detail {

inline void simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                         double whole, double tol, int depth, QuadratureResult& r) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  r.evaluations += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
    if (depth <= 0 && std::abs(diff) > 15.0 * tol) r.depth_limited = true;
    r.value += left + right + diff / 15.0;
    r.error += std::abs(diff) / 15.0;
    return;
  }
  simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, r);
  simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, r);
}

}  // namespace detail

// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
inline QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                                         int max_depth = 40) {
  QuadratureResult r;
  if (b <= a) return r;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  r.evaluations = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth, r);
  return r;
}

}  // namespace qdmft
