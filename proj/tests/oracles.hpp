#pragma once

// Reference computations for the tests, written without the library's
// numerical routines so that agreement is evidence rather than tautology.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

/// log|det A| and the sign of det A by LU with partial pivoting.
inline std::pair<double, int> lu_log_det(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  double log_abs = 0.0;
  int sign = 1;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    }
    if (a(piv, k) == 0.0) return {-INFINITY, 0};
    if (piv != k) {
      a.row(k).swap(a.row(piv));
      sign = -sign;
    }
    const double d = a(k, k);
    if (d < 0.0) sign = -sign;
    log_abs += std::log(std::abs(d));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double f = a(i, k) / d;
      for (Eigen::Index j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return {log_abs, sign};
}

/// erfc by the Maclaurin series of erf for x < 3 and a Lentz continued
/// fraction beyond, in long double.
inline double erfc(double xd) {
  const long double x = xd;
  const long double pi = std::numbers::pi_v<long double>;
  if (x < 0) return 2.0 - erfc(-xd);
  if (x < 3) {
    long double term = x, sum = x;
    for (int k = 1; k < 200; ++k) {
      term *= -x * x / k;
      const long double add = term / (2 * k + 1);
      sum += add;
      if (std::abs(add) < 1e-22L * std::abs(sum)) break;
    }
    return static_cast<double>(1.0L - 2.0L / std::sqrt(pi) * sum);
  }
  // erfc x = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
  const long double tiny = 1e-300L;
  long double f = x, c = x, d = 0.0L;
  for (int k = 1; k < 500; ++k) {
    const long double a = k / 2.0L;
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0L / d;
    const long double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0L) < 1e-20L) break;
  }
  return static_cast<double>(std::exp(-x * x) / std::sqrt(pi) / f);
}

/// Composite Simpson with `panels` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int k = 1; k < panels; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return acc * h / 3.0;
}

/// tau_l(f) = (1/pi) int_0^pi f(2 cos t) cos(l t) dt by the trapezoid rule,
/// which converges geometrically for analytic periodic integrands.
inline double tau(const std::function<double(double)>& f, int l, int points = 4000) {
  const double h = std::numbers::pi / points;
  double acc = 0.5 * (f(2.0) + f(-2.0) * std::cos(l * std::numbers::pi));
  for (int k = 1; k < points; ++k) acc += f(2.0 * std::cos(k * h)) * std::cos(l * k * h);
  return acc * h / std::numbers::pi;
}

/// Semicircle average int f(x) sqrt(4 - x^2) / (2 pi) dx via x = 2 cos t.
inline double semicircle(const std::function<double(double)>& f, int panels = 4000) {
  return simpson(
      [&](double t) {
        const double s = std::sin(t);
        return f(2.0 * std::cos(t)) * 2.0 * s * s / std::numbers::pi;
      },
      0.0, std::numbers::pi, panels);
}

/// Closed-form tau_l(phi_w) for the real ensemble.
inline double tau_phi_real(int l, double w, double w2, double w4) {
  if (l == 0) return (2.0 / (w4 - 1.0) - 1.0) * w;
  if (l == 1) return 2.0 * std::sqrt(w) / w2;
  if (l == 2) return w / (w4 - 1.0);
  return std::pow(w, 0.5 * l) / l;
}

/// Closed-form tau_l(phi_w) for the complex ensemble.
inline double tau_phi_complex(int l, double w, double w2, double w4) {
  if (l == 0) return (1.0 / (w4 - 1.0) - 1.0) * w;
  if (l == 1) return std::sqrt(w) / w2;
  if (l == 2) return w / (2.0 * (w4 - 1.0));
  return std::pow(w, 0.5 * l) / l;
}

}  // namespace oracle
