#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

namespace qdmft {

// Real polynomial, coefficients in ascending powers.
class Polynomial {
 public:
  Polynomial() : c_{0.0} {}
  Polynomial(std::vector<double> c) : c_(std::move(c)) {
    if (c_.empty()) c_ = {0.0};
  }
  static Polynomial constant(double a) { return Polynomial({a}); }
  // x - r
  static Polynomial linear_root(double r) { return Polynomial({-r, 1.0}); }

  std::size_t degree() const { return c_.size() - 1; }
  const std::vector<double>& coeffs() const { return c_; }
  double leading() const { return c_.back(); }

  template <typename T>
  T operator()(T x) const {
    T acc = T(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + T(*it);
    return acc;
  }

  // sum |c_k| max(|x|,1)^k: the magnitude against which a value at x is judged zero.
  double scale_at(double x) const {
    double acc = 0.0;
    const double ax = std::max(std::abs(x), 1.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * ax + std::abs(*it);
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() == 1) return Polynomial();
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
    return Polynomial(std::move(d));
  }

  // Drops leading coefficients below rel * max|c|.
  Polynomial& trim(double rel = 0.0) {
    double m = 0.0;
    for (double x : c_) m = std::max(m, std::abs(x));
    while (c_.size() > 1 && std::abs(c_.back()) <= rel * m) c_.pop_back();
    return *this;
  }

  // Synthetic division by (x - r); returns the remainder p(r).
  double divide_linear(double r) {
    if (c_.size() == 1) {
      double rem = c_[0];
      c_ = {0.0};
      return rem;
    }
    std::vector<double> q(c_.size() - 1);
    double acc = c_.back();
    for (std::size_t k = c_.size() - 1; k-- > 0;) {
      q[k] = acc;
      acc = c_[k] + acc * r;
    }
    c_ = std::move(q);
    return acc;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + b * -1.0; }
  friend Polynomial operator*(const Polynomial& a, double s) {
    Polynomial r = a;
    for (double& x : r.c_) x *= s;
    return r;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }

  // Real roots, ascending: companion-matrix eigenvalues with |Im| below
  // imag_tol * (1 + |Re|), each polished by a few Newton steps.
  std::vector<double> real_roots(double imag_tol = 1e-7) const {
    Polynomial p = *this;
    p.trim();
    std::vector<double> out;
    if (p.degree() == 0) return out;
    Eigen::VectorXd coeff = Eigen::Map<const Eigen::VectorXd>(p.c_.data(), p.c_.size());
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeff);
    const Polynomial dp = p.derivative();
    for (Eigen::Index k = 0; k < solver.roots().size(); ++k) {
      const auto z = solver.roots()[k];
      if (std::abs(z.imag()) > imag_tol * (1.0 + std::abs(z.real()))) continue;
      double x = z.real();
      for (int it = 0; it < 3; ++it) {
        const double d = dp(x);
        if (d == 0.0) break;
        const double step = p(x) / d;
        if (!std::isfinite(step) || std::abs(step) > 1e-6 * (1.0 + std::abs(x))) break;
        x -= step;
      }
      out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<double> c_;
};

// prod_k (x - r_k)
inline Polynomial from_roots(const std::vector<double>& roots) {
  Polynomial p = Polynomial::constant(1.0);
  for (double r : roots) p = p * Polynomial::linear_root(r);
  return p;
}

}  // namespace qdmft
