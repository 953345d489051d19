#include "spikedet/density.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "detail/quadrature.hpp"

namespace spikedet {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFdStep = 1e-5;

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

// Acklam's rational approximation refined by one Halley step.
double normal_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p > 1.0 - 0.02425) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

ScalarFn central_difference(ScalarFn f) {
  return [f = std::move(f)](double x) {
    return (f(x + kFdStep) - f(x - kFdStep)) / (2.0 * kFdStep);
  };
}

ScalarFn second_difference(ScalarFn f) {
  return [f = std::move(f)](double x) {
    return (f(x + kFdStep) - 2.0 * f(x) + f(x - kFdStep)) / (kFdStep * kFdStep);
  };
}

// Inverse CDF from a tabulated trapezoid CDF with linear interpolation.
ScalarFn tabulated_quantile(const ScalarFn& f) {
  const double w = tail_window(f);
  constexpr int kPoints = 1 << 16;
  auto xs = std::make_shared<std::vector<double>>(kPoints + 1);
  auto cdf = std::make_shared<std::vector<double>>(kPoints + 1);
  const double h = 2.0 * w / kPoints;
  double prev = f(-w);
  (*xs)[0] = -w;
  (*cdf)[0] = 0.0;
  for (int i = 1; i <= kPoints; ++i) {
    const double x = -w + i * h;
    const double cur = f(x);
    (*xs)[i] = x;
    (*cdf)[i] = (*cdf)[i - 1] + 0.5 * h * (prev + cur);
    prev = cur;
  }
  const double total = cdf->back();
  for (double& c : *cdf) c /= total;
  return [xs, cdf](double u) {
    const auto it = std::lower_bound(cdf->begin(), cdf->end(), u);
    if (it == cdf->begin()) return xs->front();
    if (it == cdf->end()) return xs->back();
    const auto i = static_cast<std::size_t>(it - cdf->begin());
    const double c0 = (*cdf)[i - 1], c1 = (*cdf)[i];
    const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return (*xs)[i - 1] + t * ((*xs)[i] - (*xs)[i - 1]);
  };
}

}  // namespace

DensitySpec DensitySpec::gaussian() {
  DensitySpec d;
  d.kind = DensityKind::gaussian;
  d.name = "gaussian";
  d.g = normal_pdf;
  d.g1 = [](double x) { return -x * normal_pdf(x); };
  d.g2 = [](double x) { return (x * x - 1.0) * normal_pdf(x); };
  d.gd = d.g;
  d.gd1 = d.g1;
  d.quantile = normal_quantile;
  d.quantile_d = normal_quantile;
  d.score = [](double x) { return x; };
  d.score_d = d.score;
  return d;
}

DensitySpec DensitySpec::sech() {
  DensitySpec d;
  d.kind = DensityKind::sech;
  d.name = "sech";
  d.g = [](double x) { return 0.5 / std::cosh(0.5 * kPi * x); };
  d.g1 = [](double x) {
    const double a = 0.5 * kPi * x;
    return -0.25 * kPi * std::tanh(a) / std::cosh(a);
  };
  d.g2 = [](double x) {
    // g'' = g (pi/2)^2 (tanh^2 - sech^2)
    const double a = 0.5 * kPi * x;
    const double t = std::tanh(a), s = 1.0 / std::cosh(a);
    return 0.5 * s * 0.25 * kPi * kPi * (t * t - s * s);
  };
  d.gd = d.g;
  d.gd1 = d.g1;
  // CDF is (2/pi) atan(exp(pi x / 2)).
  d.quantile = [](double u) { return (2.0 / kPi) * std::log(std::tan(0.5 * kPi * u)); };
  d.quantile_d = d.quantile;
  d.score = [](double x) { return 0.5 * kPi * std::tanh(0.5 * kPi * x); };
  d.score_d = d.score;
  return d;
}

DensitySpec DensitySpec::custom(std::string name, ScalarFn g, ScalarFn gd,
                                ScalarFn g1, ScalarFn g2, ScalarFn gd1) {
  if (!g || !gd) throw std::invalid_argument("custom density requires g and gd");
  DensitySpec d;
  d.kind = DensityKind::custom;
  d.name = std::move(name);
  d.numeric_derivatives = !g1 || !g2 || !gd1;
  d.g = g;
  d.gd = gd;
  d.g1 = g1 ? std::move(g1) : central_difference(g);
  d.g2 = g2 ? std::move(g2) : second_difference(g);
  d.gd1 = gd1 ? std::move(gd1) : central_difference(gd);
  d.quantile = tabulated_quantile(d.g);
  d.quantile_d = tabulated_quantile(d.gd);
  d.score = [g = d.g, g1 = d.g1](double x) { return -g1(x) / g(x); };
  d.score_d = [gd = d.gd, gd1 = d.gd1](double x) { return -gd1(x) / gd(x); };
  return d;
}

DensitySpec DensitySpec::by_name(std::string_view name) {
  if (name == "gaussian") return gaussian();
  if (name == "sech") return sech();
  throw std::invalid_argument("unknown density '" + std::string(name) +
                              "' (built-ins: gaussian, sech)");
}

double tail_window(const ScalarFn& f, double floor) {
  for (double w = 1.0; w <= 1024.0; w *= 2.0) {
    if (f(w) < floor && f(-w) < floor) return w;
  }
  throw std::runtime_error("density tail does not decay below tolerance within |x| <= 1024");
}

double density_moment(const ScalarFn& f, int k) {
  const double w = tail_window(f);
  return detail::integrate([&](double x) { return std::pow(x, k) * f(x); }, -w, w);
}

}  // namespace spikedet
