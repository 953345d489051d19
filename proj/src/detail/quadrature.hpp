#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>

namespace spikedet::detail {

/// Adaptive 61-point Gauss-Kronrod over [a, b], split into `panels` equal
/// pieces first so narrow features near the origin are not missed.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-14,
                 int panels = 16) {
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double hi = (p + 1 == panels) ? b : lo + width;
    double err = 0.0;
    total += gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, tol, &err);
  }
  if (!std::isfinite(total)) {
    throw std::runtime_error("quadrature produced a non-finite value");
  }
  return total;
}

}  // namespace spikedet::detail
