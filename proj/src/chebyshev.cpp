#include "spikedet/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spikedet {
namespace {

constexpr double kPi = std::numbers::pi;

void check_nodes(int nodes) {
  if (nodes < 64) throw std::invalid_argument("quadrature needs at least 64 nodes");
}

double checked(const AnalyticFn& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "test function '" << f.label << "' is not finite at x = " << x;
    throw std::domain_error(os.str());
  }
  return v;
}

double power_half(double lambda, int l) { return std::pow(lambda, 0.5 * l); }

}  // namespace

ChebCoeffs chebyshev_coeffs(const AnalyticFn& f, int ellmax, int nodes) {
  check_nodes(nodes);
  if (ellmax < 0 || ellmax >= nodes) throw std::invalid_argument("need 0 <= ellmax < nodes");
  ChebCoeffs out;
  out.nodes = nodes;
  out.tau.assign(static_cast<std::size_t>(ellmax) + 1, 0.0);
  // x = 2 cos(theta_k), theta_k = (k + 1/2) pi / K; weights are all pi / K,
  // which cancels the 1/pi prefactor.
  for (int k = 0; k < nodes; ++k) {
    const double t = std::cos((k + 0.5) * kPi / nodes);
    const double fx = checked(f, 2.0 * t);
    double prev = 1.0, cur = t;
    out.tau[0] += fx;
    if (ellmax >= 1) out.tau[1] += fx * t;
    for (int l = 2; l <= ellmax; ++l) {
      const double next = 2.0 * t * cur - prev;
      prev = cur;
      cur = next;
      out.tau[static_cast<std::size_t>(l)] += fx * cur;
    }
  }
  for (double& c : out.tau) c /= nodes;
  return out;
}

double tau(const AnalyticFn& f, int ell, int nodes) {
  if (ell < 0) throw std::invalid_argument("ell must be nonnegative");
  return chebyshev_coeffs(f, ell, nodes)[ell];
}

int default_ellmax(double lambda, int nodes) {
  int ell = 50;
  if (lambda > 0.0 && lambda < 1.0) {
    ell = std::max(ell, static_cast<int>(std::ceil(std::log(1e-12) / std::log(std::sqrt(lambda)))));
  }
  return std::min(ell, nodes - 1);
}

AnalyticFn phi_omega(double omega, double w2, double w4, bool complex) {
  if (!(omega > 0.0 && omega < 1.0)) throw std::domain_error("phi_omega: omega must lie in (0, 1)");
  if (!(w2 > 0.0)) throw std::domain_error("phi_omega: w2 must be positive");
  if (!(w4 > 1.0)) throw std::domain_error("phi_omega: w4 must exceed 1");
  const double s = std::sqrt(omega);
  const double lin = complex ? s * (1.0 / w2 - 1.0) : s * (2.0 / w2 - 1.0);
  const double quad = complex ? 0.5 * omega * (1.0 / (w4 - 1.0) - 1.0)
                              : omega * (1.0 / (w4 - 1.0) - 0.5);
  AnalyticFn f;
  f.eval = [s, omega, lin, quad](double x) {
    return -std::log(1.0 - s * x + omega) + (lin + quad * x) * x;
  };
  std::ostringstream label;
  label << "phi[omega=" << omega << ",w2=" << w2 << ",w4=" << w4 << (complex ? ",complex" : "")
        << "]";
  f.label = label.str();
  f.hi = s + 1.0 / s;
  f.lo = -f.hi;
  return f;
}

double clt_mean(const AnalyticFn& f, double lambda, double w2, double w4, bool complex,
                CltOptions opts) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::domain_error("clt_mean: the spike series diverges unless 0 <= lambda < 1");
  }
  const int ellmax = std::max(4, opts.ellmax > 0 ? opts.ellmax : default_ellmax(lambda, opts.nodes));
  const ChebCoeffs c = chebyshev_coeffs(f, ellmax, opts.nodes);
  double spike = 0.0;
  if (lambda > 0.0) {
    for (int l = 1; l <= ellmax; ++l) spike += power_half(lambda, l) * c[l];
  }
  if (complex) return (w2 - 1.0) * c[2] + (w4 - 2.0) * c[4] + spike;
  return 0.25 * (checked(f, 2.0) + checked(f, -2.0)) - 0.5 * c[0] + (w2 - 2.0) * c[2] +
         (w4 - 3.0) * c[4] + spike;
}

double clt_var(const AnalyticFn& f, double w2, double w4, bool complex, CltOptions opts) {
  const int ellmax =
      std::max(2, opts.ellmax > 0 ? opts.ellmax : std::min(opts.nodes / 4, 512));
  const ChebCoeffs c = chebyshev_coeffs(f, ellmax, opts.nodes);
  double tail = 0.0;
  for (int l = ellmax; l >= 1; --l) tail += l * c[l] * c[l];
  const double v = complex ? (w2 - 1.0) * c[1] * c[1] + 2.0 * (w4 - 2.0) * c[2] * c[2] + tail
                           : (w2 - 2.0) * c[1] * c[1] + 2.0 * (w4 - 3.0) * c[2] * c[2] + 2.0 * tail;
  if (v < -1e-10) {
    throw std::domain_error("clt_var: negative variance (requires w2 >= 0 and w4 >= 1)");
  }
  return std::max(v, 0.0);
}

double semicircle_avg(const AnalyticFn& f, int nodes) {
  check_nodes(nodes);
  // Nodes theta_k = k pi / (K + 1); weight (pi / (K + 1)) sin^2(theta_k)
  // against (2 / pi) sqrt(1 - t^2).
  double sum = 0.0;
  for (int k = 1; k <= nodes; ++k) {
    const double theta = k * kPi / (nodes + 1);
    const double s = std::sin(theta);
    sum += s * s * checked(f, 2.0 * std::cos(theta));
  }
  return 2.0 * sum / (nodes + 1);
}

Evaluated lss(const AnalyticFn& f, const SpectrumResult& spec, int nodes) {
  double sum = 0.0;
  for (const double mu : spec.eigvals) {
    if (!(mu > f.lo && mu < f.hi)) return Evaluated::out_of_domain();
    const double v = f(mu);
    if (!std::isfinite(v)) return Evaluated::out_of_domain();
    sum += v;
  }
  return Evaluated::of(sum - static_cast<double>(spec.n()) * semicircle_avg(f, nodes));
}

double optimality_ratio(const AnalyticFn& f, double omega, double w2, double w4,
                        CltOptions opts) {
  const int ellmax = opts.ellmax > 0 ? opts.ellmax : default_ellmax(omega, opts.nodes);
  const ChebCoeffs c = chebyshev_coeffs(f, ellmax, opts.nodes);
  double shift = 0.0;
  for (int l = 1; l <= ellmax; ++l) shift += power_half(omega, l) * c[l];
  const double v = clt_var(f, w2, w4, false, {ellmax, opts.nodes});
  if (!(v > 1e-14)) throw std::domain_error("optimality_ratio: f has zero limiting variance");
  return std::abs(shift) / std::sqrt(v);
}

AnalyticFn polynomial(std::vector<double> coeffs) {
  std::ostringstream label;
  label << "poly[";
  for (std::size_t i = 0; i < coeffs.size(); ++i) label << (i ? "," : "") << coeffs[i];
  label << "]";
  AnalyticFn f;
  f.label = label.str();
  f.eval = [c = std::move(coeffs)](double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  return f;
}

}  // namespace spikedet
