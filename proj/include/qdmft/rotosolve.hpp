#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qdmft/errors.hpp"
#include "qdmft/format.hpp"

namespace qdmft {

using Objective = std::function<double(std::span<const double>)>;

struct RotosolveOptions {
  std::size_t max_sweeps = 400;
  double tol = 1e-13;  // stop once a full sweep lowers the value by less than this
};

struct RotosolveResult {
  std::vector<double> theta;
  double value = 0.0;
  std::size_t sweeps = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double x) {
  double r = std::remainder(x, 2 * std::numbers::pi);
  return r <= -std::numbers::pi ? r + 2 * std::numbers::pi : r;
}

// Coordinate descent exploiting f(theta_d) = a cos(theta_d - b) + c: three
// evaluations per coordinate fix a, b, c and the coordinate jumps to b + pi.
inline RotosolveResult rotosolve_minimize(const Objective& f, std::vector<double> theta,
                                          const RotosolveOptions& opt = {}) {
  RotosolveResult r;
  auto eval = [&](std::span<const double> t) {
    double v = f(t);
    ++r.evaluations;
    if (!std::isfinite(v)) {
      std::string where;
      for (double x : t) where += (where.empty() ? "" : ", ") + format_double(x);
      throw EvaluationError("objective returned a non-finite value at theta = [" + where + "]");
    }
    return v;
  };

  double value = eval(theta);
  for (r.sweeps = 0; r.sweeps < opt.max_sweeps;) {
    const double before = value;
    for (std::size_t d = 0; d < theta.size(); ++d) {
      const double t0 = theta[d];
      const double f0 = eval(theta);
      theta[d] = t0 + std::numbers::pi / 2;
      const double fp = eval(theta);
      theta[d] = t0 - std::numbers::pi / 2;
      const double fm = eval(theta);
      // a cos(t0 - b) = f0 - c, a sin(t0 - b) = (fm - fp) / 2, c = (fp + fm) / 2
      const double c = 0.5 * (fp + fm);
      const double ac = f0 - c, as = 0.5 * (fm - fp);
      const double amp = std::hypot(ac, as);
      if (amp <= 1e-15 * (1.0 + std::abs(c))) {
        theta[d] = t0;
        value = f0;
        continue;
      }
      theta[d] = wrap_angle(t0 - std::atan2(as, ac) + std::numbers::pi);
      value = c - amp;
    }
    ++r.sweeps;
    if (before - value < opt.tol) {
      r.converged = true;
      break;
    }
  }
  r.value = eval(theta);
  r.theta = std::move(theta);
  return r;
}

}  // namespace qdmft
