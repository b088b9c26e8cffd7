#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdmft/errors.hpp"
#include "qdmft/format.hpp"
#include "qdmft/model.hpp"
#include "qdmft/polynomial.hpp"
#include "qdmft/quadrature.hpp"
#include "qdmft/spectral_data.hpp"

namespace qdmft {

using cplx = std::complex<double>;

// Bath level seen by one impurity orbital: energy and |V|^2 (levels with
// equal energy merged).
struct BathLevel {
  double eps;
  double v2;
};

inline std::vector<BathLevel> bath_levels(const ImpurityModel& m, std::size_t alpha) {
  std::vector<BathLevel> out;
  for (std::size_t i = 0; i < m.n_bath(); ++i) {
    const double v = m.hoppings().at(alpha)[i];
    if (v == 0.0) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const BathLevel& b) { return std::abs(b.eps - m.eps_bath()[i]) < 1e-12; });
    if (it != out.end())
      it->v2 += v * v;
    else
      out.push_back({m.eps_bath()[i], v * v});
  }
  return out;
}

// Sigma pole left at a bath energy after cancellation.
struct SigmaPole {
  double omega;
  double coefficient;  // of (w - omega)^-order
  int order;
};

// Sigma on the real axis as N(w)/D(w) with the (w - eps_i) factors that
// cancel between numerator and denominator divided out.
struct RationalSelfEnergy {
  Polynomial num, den;
  std::vector<SigmaPole> bath_poles;

  double operator()(double w) const { return num(w) / den(w); }
  bool has_pole_at(double w, double rel = 1e-10) const { return std::abs(den(w)) <= rel * den.scale_at(w); }
  std::vector<double> poles() const { return den.real_roots(); }
};

namespace detail {

struct MergedPole {
  double omega;
  double lambda;
};

inline std::vector<MergedPole> merged_poles(const SpectralData& sd, std::size_t alpha, double merge_tol = 1e-9) {
  std::vector<MergedPole> all;
  for (auto* list : {&sd.particle, &sd.hole})
    for (auto& p : *list) all.push_back({p.omega, p.lambda.at(alpha)});
  std::sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.omega < b.omega; });
  std::vector<MergedPole> out;
  for (auto& p : all) {
    if (!out.empty() && p.omega - out.back().omega < merge_tol)
      out.back().lambda += p.lambda;
    else
      out.push_back(p);
  }
  return out;
}

}  // namespace detail

class GreensEvaluator {
 public:
  GreensEvaluator(SpectralData spectral, ImpurityModel model, double delta = 0.05, std::size_t orbital = 0)
      : sd_(std::move(spectral)), model_(std::move(model)), delta_(delta), alpha_(orbital) {
    if (!(delta_ > 0.0) || !std::isfinite(delta_)) throw ParameterError("broadening delta must be positive");
    if (alpha_ >= model_.n_imp()) throw ParameterError("orbital outside impurity");
    if (sd_.n_orbitals() <= alpha_) throw DimensionError("spectral data lacks weights for the orbital");
    for (auto* list : {&sd_.particle, &sd_.hole})
      for (auto& p : *list)
        if (!std::isfinite(p.omega) || !std::isfinite(p.lambda[alpha_])) throw ParameterError("pole not finite");
    bath_ = bath_levels(model_, alpha_);
    build_rational();
  }

  const SpectralData& spectral() const { return sd_; }
  const ImpurityModel& model() const { return model_; }
  double delta() const { return delta_; }
  std::size_t orbital() const { return alpha_; }
  const std::vector<BathLevel>& bath() const { return bath_; }
  const RationalSelfEnergy& sigma_rational() const { return sigma_; }

  // Lehmann sum at complex frequency z. An exact pole hit moves z off the
  // axis by a few ulps and sets *hit.
  cplx greens(cplx z, bool* hit = nullptr) const {
    cplx g = 0.0;
    for (auto* list : {&sd_.particle, &sd_.hole})
      for (auto& p : *list) {
        cplx d = z - p.omega;
        if (d == cplx(0.0)) {
          d = cplx(0.0, 8 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(z)));
          if (hit) *hit = true;
        }
        g += p.lambda[alpha_] / d;
      }
    return g;
  }
  cplx greens(double omega, bool* hit = nullptr) const { return greens(cplx(omega, delta_), hit); }

  cplx hybridization(cplx z) const {
    cplx d = 0.0;
    for (auto& b : bath_) d += b.v2 / (z - b.eps);
    return d;
  }
  cplx hybridization(double omega) const { return hybridization(cplx(omega, delta_)); }

  cplx bare_inverse(cplx z) const { return z - model_.eps_imp()[alpha_] + model_.mu() - hybridization(z); }

  // G0^{-1} - G^{-1} from the closed forms; *pole set when |G| < 1e-14.
  cplx self_energy(cplx z, bool* pole = nullptr) const {
    const cplx g = greens(z);
    if (std::abs(g) < 1e-14) {
      if (pole) *pole = true;
      return cplx(std::numeric_limits<double>::infinity(), 0.0);
    }
    return bare_inverse(z) - 1.0 / g;
  }
  cplx self_energy(double omega, bool* pole = nullptr) const { return self_energy(cplx(omega, delta_), pole); }

  // delta -> 0 limit on the real axis.
  double self_energy_real(double omega) const { return sigma_(omega); }

 private:
  void build_rational() {
    // zero-weight poles would only add common factors
    auto poles = detail::merged_poles(sd_, alpha_);
    std::erase_if(poles, [](const detail::MergedPole& p) { return std::abs(p.lambda) <= 1e-14; });
    std::vector<double> roots;
    Polynomial pg;  // numerator of G
    for (auto& p : poles) roots.push_back(p.omega);
    for (std::size_t n = 0; n < poles.size(); ++n) {
      std::vector<double> others;
      for (std::size_t m = 0; m < poles.size(); ++m)
        if (m != n) others.push_back(poles[m].omega);
      pg = pg + from_roots(others) * poles[n].lambda;
    }
    const Polynomial qg = from_roots(roots);

    std::vector<double> eps;
    for (auto& b : bath_) eps.push_back(b.eps);
    const Polynomial bq = from_roots(eps);
    Polynomial a;
    for (std::size_t i = 0; i < bath_.size(); ++i) {
      std::vector<double> others;
      for (std::size_t j = 0; j < bath_.size(); ++j)
        if (j != i) others.push_back(bath_[j].eps);
      a = a + from_roots(others) * bath_[i].v2;
    }
    const Polynomial lin({model_.mu() - model_.eps_imp()[alpha_], 1.0});

    Polynomial num = (lin * bq - a) * pg - qg * bq;
    Polynomial den = bq * pg;
    num.trim(1e-13);
    den.trim(1e-13);

    // A root of D at eps_i is divided out of N and D while the leading
    // Laurent coefficient N(eps) k! / D^(k)(eps) of Sigma there is negligible.
    for (auto& b : bath_) {
      const double tol = 1e-6 * std::max(1.0, b.v2);
      while (den.degree() > 0 && std::abs(den(b.eps)) <= 1e-10 * den.scale_at(b.eps)) {
        int k = 1;
        Polynomial dk = den.derivative();
        double fact = 1.0;
        while (dk.degree() > 0 && std::abs(dk(b.eps)) <= 1e-10 * dk.scale_at(b.eps)) {
          dk = dk.derivative();
          ++k;
          fact *= k;
        }
        const double coeff = num(b.eps) * fact / dk(b.eps);
        if (std::abs(coeff) > tol) {
          sigma_.bath_poles.push_back({b.eps, coeff, k});
          break;
        }
        num.divide_linear(b.eps);
        den.divide_linear(b.eps);
      }
    }
    sigma_.num = std::move(num);
    sigma_.den = std::move(den);
  }

  SpectralData sd_;
  ImpurityModel model_;
  double delta_;
  std::size_t alpha_;
  std::vector<BathLevel> bath_;
  RationalSelfEnergy sigma_;
};

inline cplx greens_impurity(const GreensEvaluator& g, double omega) { return g.greens(omega); }
inline cplx greens_impurity(const GreensEvaluator& g, cplx z) { return g.greens(z); }

// Sum_i |V_ai|^2 / (w + i delta - eps_i).
inline cplx hybridization(const ImpurityModel& m, double omega, double delta, std::size_t alpha = 0) {
  cplx d = 0.0;
  for (auto& b : bath_levels(m, alpha)) d += b.v2 / (cplx(omega, delta) - b.eps);
  return d;
}

inline cplx self_energy(const GreensEvaluator& g, double omega) { return g.self_energy(omega); }

struct QuasiparticleWeight {
  double z = 0.0;
  double z_imag_axis = 0.0;  // 1/(1 - Im Sigma(i delta)/delta)
  double sigma_slope = 0.0;  // dSigma/dw at 0
  bool defined = true;       // false: Sigma has a pole at w = 0
  bool clamped = false;
  bool cross_check_ok = true;
  std::string diagnostic;
};

inline QuasiparticleWeight quasiparticle_weight(const GreensEvaluator& g, double check_delta = 1e-5) {
  QuasiparticleWeight q;
  const auto& s = g.sigma_rational();
  const double d0 = s.den(0.0);
  if (s.has_pole_at(0.0)) {
    q.defined = false;
    q.z = 0.0;
    q.diagnostic = "self-energy pole at omega = 0";
    return q;
  }
  const double n0 = s.num(0.0), n1 = s.num.derivative()(0.0), d1 = s.den.derivative()(0.0);
  q.sigma_slope = (n1 * d0 - n0 * d1) / (d0 * d0);
  q.z = 1.0 / (1.0 - q.sigma_slope);

  const cplx sig = g.self_energy(cplx(0.0, check_delta));
  q.z_imag_axis = 1.0 / (1.0 - sig.imag() / check_delta);
  if (!(std::abs(q.z_imag_axis - q.z) <= 1e-4 * std::max(std::abs(q.z), 1e-12))) {
    q.cross_check_ok = false;
    q.diagnostic = "imaginary-axis estimate " + format_double(q.z_imag_axis) + " disagrees with " + format_double(q.z);
  }
  if (!(q.z >= 0.0 && q.z <= 1.0)) {
    q.clamped = true;
    if (!q.diagnostic.empty()) q.diagnostic += "; ";
    q.diagnostic += "z = " + format_double(q.z) + " clamped to [0,1]";
    q.z = std::clamp(std::isfinite(q.z) ? q.z : 0.0, 0.0, 1.0);
  }
  return q;
}

enum class DosKind { impurity, lattice };

struct DosCurve {
  std::vector<double> omega;
  std::vector<double> values;
  DosKind kind = DosKind::impurity;

  double integral() const {
    double s = 0.0;
    for (std::size_t k = 1; k < omega.size(); ++k) s += 0.5 * (omega[k] - omega[k - 1]) * (values[k] + values[k - 1]);
    return s;
  }

  // strict interior maxima; a flat top counts once
  std::size_t local_maxima(double rel_tol = 1e-12) const {
    std::size_t count = 0;
    double peak = 0.0;
    for (double v : values) peak = std::max(peak, v);
    const double tol = rel_tol * peak;
    std::size_t k = 1;
    while (k + 1 < values.size()) {
      if (values[k] > values[k - 1] + tol) {
        std::size_t j = k;
        while (j + 1 < values.size() && std::abs(values[j + 1] - values[k]) <= tol) ++j;
        if (j + 1 < values.size() && values[j + 1] < values[k] - tol && values[k] > tol) ++count;
        k = j + 1;
      } else {
        ++k;
      }
    }
    return count;
  }
};

inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw ParameterError("grid needs at least 2 points and hi > lo");
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k) g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  return g;
}

namespace detail {
inline void check_grid(const std::vector<double>& grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw ParameterError("frequency grid must be sorted");
}
}  // namespace detail

// Semicircular density of the Bethe lattice with half bandwidth 2.
inline double rho0(double x) { return std::abs(x) < 2.0 ? std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi) : 0.0; }

inline DosCurve dos_impurity(const GreensEvaluator& g, const std::vector<double>& grid, double delta) {
  detail::check_grid(grid);
  if (!(delta > 0.0)) throw ParameterError("broadening delta must be positive");
  DosCurve c{grid, {}, DosKind::impurity};
  for (double w : grid) c.values.push_back(std::max(0.0, -2.0 / std::numbers::pi * g.greens(cplx(w, delta)).imag()));
  return c;
}

inline double lattice_dos_at(const GreensEvaluator& g, double w) {
  const auto& s = g.sigma_rational();
  if (s.has_pole_at(w, 1e-14)) return 0.0;
  return 2.0 * rho0(w + g.model().mu() - s(w));
}

inline DosCurve dos_lattice(const GreensEvaluator& g, const std::vector<double>& grid) {
  detail::check_grid(grid);
  DosCurve c{grid, {}, DosKind::lattice};
  for (double w : grid) c.values.push_back(lattice_dos_at(g, w));
  return c;
}

// DOS of the non-interacting lattice, 2 rho0(w + mu).
inline DosCurve dos_semicircle(double mu, const std::vector<double>& grid) {
  detail::check_grid(grid);
  DosCurve c{grid, {}, DosKind::lattice};
  for (double w : grid) c.values.push_back(2.0 * rho0(w + mu));
  return c;
}

struct Occupations {
  double n_imp = 0.0;
  double n_lat = 0.0;
  double quadrature_error = 0.0;
};

inline Occupations occupations(const GreensEvaluator& g, double tol = 1e-6) {
  Occupations o;
  o.n_imp = 2.0 * g.spectral().hole_weight(g.orbital());

  // x(w) = w + mu - Sigma(w) crosses the band edges +-2 at roots of
  // (w + mu -+ 2) D - N; Sigma poles are the roots of D.
  const auto& s = g.sigma_rational();
  const double mu = g.model().mu();
  std::vector<double> br = s.den.real_roots();
  for (double edge : {2.0, -2.0}) {
    const Polynomial p = Polynomial({mu - edge, 1.0}) * s.den - s.num;
    for (double r : p.real_roots()) br.push_back(r);
  }
  br.push_back(0.0);
  std::sort(br.begin(), br.end());
  br.erase(std::remove_if(br.begin(), br.end(), [](double x) { return x > 0.0; }), br.end());
  br.erase(std::unique(br.begin(), br.end(), [](double a, double b) { return std::abs(a - b) < 1e-13; }), br.end());

  auto f = [&](double w) { return lattice_dos_at(g, w); };
  const std::size_t panels = br.size() > 1 ? br.size() - 1 : 1;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double a = br[k], b = br[k + 1];
    if (b - a < 1e-14 || f(0.5 * (a + b)) == 0.0) continue;
    // w = a + (b - a)(1 - cos t)/2 removes the square-root edges
    auto ft = [&](double t) { return f(a + 0.5 * (b - a) * (1.0 - std::cos(t))) * 0.5 * (b - a) * std::sin(t); };
    auto r = adaptive_simpson(ft, 0.0, std::numbers::pi, tol / static_cast<double>(panels));
    if (r.depth_limited) throw NumericalError("lattice occupation quadrature did not converge");
    o.n_lat += r.value;
    o.quadrature_error += r.error;
  }
  return o;
}

// Pole-cancellation residuals per bath level: G(eps) and V^2 * (-G'(eps)) - 1,
// then the sum rule.
struct ConstraintResiduals {
  std::vector<double> value;  // G(eps_i)
  std::vector<double> slope;  // V_i^2 sum lambda/(eps_i - w)^2 - 1
  double sum_rule = 0.0;

  double max_abs() const {
    double m = std::abs(sum_rule);
    for (double x : value) m = std::max(m, std::abs(x));
    for (double x : slope) m = std::max(m, std::abs(x));
    return m;
  }
};

inline ConstraintResiduals constraint_residuals(const SpectralData& sd, const ImpurityModel& m, std::size_t alpha = 0) {
  ConstraintResiduals r;
  const auto poles = detail::merged_poles(sd, alpha);
  for (auto& b : bath_levels(m, alpha)) {
    double g = 0.0, gp = 0.0;
    for (auto& p : poles) {
      const double d = b.eps - p.omega;
      g += p.lambda / d;
      gp += p.lambda / (d * d);
    }
    r.value.push_back(g);
    r.slope.push_back(b.v2 * gp - 1.0);
  }
  r.sum_rule = sd.weight_sum(alpha) - 1.0;
  return r;
}

struct RegularizationReport {
  double max_residual = 0.0;
  double max_change = 0.0;
  std::size_t clipped = 0;
  std::size_t merged = 0;
};

namespace detail {

// min |x - x0|^2 subject to A x = b, by the KKT system.
inline Eigen::VectorXd constrained_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& x0) {
  const Eigen::Index n = x0.size(), m = b.size();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + m, n + m);
  k.topLeftCorner(n, n).setIdentity();
  k.topRightCorner(n, m) = A.transpose();
  k.bottomLeftCorner(m, n) = A;
  Eigen::VectorXd rhs(n + m);
  rhs << x0, b;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(k);
  Eigen::VectorXd sol = cod.solve(rhs);
  Eigen::VectorXd x = sol.head(n);
  const double res = (A * x - b).norm();
  if (!(res <= 1e-9 * (1.0 + b.norm())))
    throw RegularizationError("sum-rule constraints are infeasible for these pole energies");
  return x;
}

}  // namespace detail

// Projects the weights of orbital `alpha` onto the constraints G(eps_i) = 0,
// -G'(eps_i) = 1/V_i^2 and sum lambda = 1, nearest to the measured values,
// then enforces 0 <= lambda <= 1 by an active-set re-solve.
inline SpectralData regularize(const SpectralData& sd, const ImpurityModel& model, std::size_t alpha = 0,
                               RegularizationReport* report = nullptr) {
  const auto bath = bath_levels(model, alpha);
  const auto poles = detail::merged_poles(sd, alpha);
  const Eigen::Index n = static_cast<Eigen::Index>(poles.size());
  const Eigen::Index m = static_cast<Eigen::Index>(2 * bath.size() + 1);
  if (n == 0) throw RegularizationError("no poles to regularize");

  Eigen::MatrixXd A(m, n);
  Eigen::VectorXd b(m), x0(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    x0(j) = poles[j].lambda;
    for (std::size_t i = 0; i < bath.size(); ++i) {
      const double d = bath[i].eps - poles[j].omega;
      if (std::abs(d) < 1e-12) throw RegularizationError("pole coincides with bath energy " + format_double(bath[i].eps));
      A(2 * i, j) = 1.0 / d;
      A(2 * i + 1, j) = 1.0 / (d * d);
    }
    A(m - 1, j) = 1.0;
  }
  for (std::size_t i = 0; i < bath.size(); ++i) {
    b(2 * i) = 0.0;
    b(2 * i + 1) = 1.0 / bath[i].v2;
  }
  b(m - 1) = 1.0;

  // row scaling for conditioning
  for (Eigen::Index r = 0; r < m; ++r) {
    const double s = A.row(r).cwiseAbs().maxCoeff();
    if (s > 0) A.row(r) /= s, b(r) /= s;
  }

  std::vector<int> bound(n, 0);  // 0 free, -1 at 0, +1 at 1
  Eigen::VectorXd x;
  RegularizationReport rep;
  for (Eigen::Index pass = 0; pass <= n; ++pass) {
    std::vector<Eigen::Index> free;
    Eigen::VectorXd bf = b;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (bound[j] == 0)
        free.push_back(j);
      else if (bound[j] > 0)
        bf -= A.col(j);
    }
    if (free.empty()) throw RegularizationError("all weights clipped; constraints infeasible in [0,1]");
    Eigen::MatrixXd af(m, static_cast<Eigen::Index>(free.size()));
    Eigen::VectorXd xf0(static_cast<Eigen::Index>(free.size()));
    for (std::size_t k = 0; k < free.size(); ++k) af.col(k) = A.col(free[k]), xf0(k) = x0(free[k]);
    const Eigen::VectorXd xf = detail::constrained_least_squares(af, bf, xf0);
    x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j)
      if (bound[j] > 0) x(j) = 1.0;
    bool clipped = false;
    for (std::size_t k = 0; k < free.size(); ++k) {
      x(free[k]) = xf(k);
      if (xf(k) < -1e-13) bound[free[k]] = -1, clipped = true;
      if (xf(k) > 1.0 + 1e-13) bound[free[k]] = 1, clipped = true;
    }
    if (!clipped) break;
    ++rep.clipped;
    if (pass == n) throw RegularizationError("active-set clipping did not settle");
  }

  // split merged weights back in proportion to the measured ones
  SpectralData out = sd;
  std::vector<Pole*> all;
  for (auto* list : {&out.particle, &out.hole})
    for (auto& p : *list) all.push_back(&p);
  std::stable_sort(all.begin(), all.end(), [](Pole* a, Pole* b) { return a->omega < b->omega; });
  std::size_t k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<Pole*> group;
    while (k < all.size() && (group.empty() || all[k]->omega - group.front()->omega < 1e-9)) group.push_back(all[k++]);
    double measured = 0.0;
    for (auto* p : group) measured += std::max(p->lambda[alpha], 0.0);
    if (group.size() > 1) ++rep.merged;
    for (auto* p : group) {
      const double share =
          measured > 0.0 ? std::max(p->lambda[alpha], 0.0) / measured : 1.0 / static_cast<double>(group.size());
      rep.max_change = std::max(rep.max_change, std::abs(x(j) * share - p->lambda[alpha]));
      p->lambda[alpha] = x(j) * share;
    }
  }
  rep.max_residual = constraint_residuals(out, model, alpha).max_abs();
  if (report) *report = rep;
  return out;
}

// Closed form for the ph-symmetric 2-site model: with the two particle
// levels w0 < w2 and hybridization V,
//   lambda = w0^2 (V^2 - w2^2) / (2 V^2 (w0^2 - w2^2)),
// the other level carries 1/2 - lambda, and holes mirror particles. Within a
// degenerate level the weight goes to the S_z-raising state.
inline SpectralData regularize_two_site_ph(const SpectralData& sd, double V) {
  if (sd.particle.empty()) throw RegularizationError("no particle poles");
  if (!(std::abs(V) > 0.0)) throw RegularizationError("closed form needs V != 0");
  double w0 = sd.particle.front().omega, w2 = w0;
  for (auto& p : sd.particle) w0 = std::min(w0, p.omega), w2 = std::max(w2, p.omega);
  if (w2 - w0 < 1e-9) throw RegularizationError("particle levels are degenerate");
  const double v2 = V * V;
  const double lam = w0 * w0 * (v2 - w2 * w2) / (2.0 * v2 * (w0 * w0 - w2 * w2));

  SpectralData out = sd;
  // orbital 0 is spin up and the N0 ground state has S_z = 0
  auto assign = [&](std::vector<Pole>& list, double level, double weight, int sz_target) {
    Pole* chosen = nullptr;
    for (auto& p : list)
      if (std::abs(p.omega - level) < 1e-6) {
        p.lambda.assign(p.lambda.size(), 0.0);
        if (!chosen && p.sector.sz == sz_target) chosen = &p;
      }
    if (!chosen) throw RegularizationError("no spin-allowed state at level " + format_double(level));
    chosen->lambda[0] = weight;
  };
  for (auto& p : out.particle) p.lambda.assign(std::max<std::size_t>(p.lambda.size(), 1), 0.0);
  assign(out.particle, w0, lam, 1);
  assign(out.particle, w2, 0.5 - lam, 1);
  for (auto& p : out.hole) p.lambda.assign(std::max<std::size_t>(p.lambda.size(), 1), 0.0);
  if (!out.hole.empty()) {
    assign(out.hole, -w0, lam, -1);
    assign(out.hole, -w2, 0.5 - lam, -1);
  }
  return out;
}

inline void write_dos_csv(const std::string& path, const DosCurve& c) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << "omega,dos\n";
  for (std::size_t k = 0; k < c.omega.size(); ++k) f << format_double(c.omega[k]) << ',' << format_double(c.values[k]) << '\n';
}

inline void write_sigma_csv(const std::string& path, const GreensEvaluator& g, const std::vector<double>& grid) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << "omega,re_sigma,im_sigma\n";
  for (double w : grid) {
    const cplx s = g.self_energy(w);
    f << format_double(w) << ',' << format_double(s.real()) << ',' << format_double(s.imag()) << '\n';
  }
}

}  // namespace qdmft
