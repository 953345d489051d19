#include "spikedet/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spikedet {
namespace {

constexpr double kUniformTop = 1.0 - 1e-9;

SnrPrior weighted(SnrPrior::Kind kind, std::vector<double> values, std::vector<double> weights) {
  if (values.size() != weights.size() || values.empty()) {
    throw std::invalid_argument("prior needs matching, non-empty values and weights");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("prior weights must have positive sum");
  for (double& w : weights) w /= total;
  SnrPrior p{kind, std::move(values), std::move(weights)};
  p.validate();
  return p;
}

}  // namespace

SnrPrior SnrPrior::discrete(std::vector<double> values, std::vector<double> weights) {
  return weighted(Kind::discrete, std::move(values), std::move(weights));
}

SnrPrior SnrPrior::custom_grid(std::vector<double> values, std::vector<double> weights) {
  return weighted(Kind::custom_grid, std::move(values), std::move(weights));
}

void SnrPrior::validate() const {
  if (kind == Kind::uniform01) return;
  if (values.size() != weights.size() || values.empty()) {
    throw std::invalid_argument("prior needs matching, non-empty values and weights");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0 && values[i] < 1.0)) {
      throw std::invalid_argument("prior support must lie in (0, 1)");
    }
    if (weights[i] < 0.0) throw std::invalid_argument("prior weights must be nonnegative");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("prior weights must sum to 1");
}

double mean_under_lambda(double t, double lambda, double w2, double w4) {
  if (!(t > 0.0 && t < 1.0)) throw std::domain_error("t must lie in (0, 1)");
  if (!(lambda >= 0.0 && lambda < 1.0)) throw std::domain_error("lambda must lie in [0, 1)");
  const double r = std::sqrt(lambda * t);
  if (r >= 1.0) throw std::domain_error("sqrt(lambda t) must stay below 1");
  return -0.5 * std::log1p(-t) + ((w2 - 1.0) / (w4 - 1.0) - 0.5) * t +
         0.25 * (w4 - 3.0) * t * t - std::log1p(-r) + (2.0 / w2 - 1.0) * r +
         (1.0 / (w4 - 1.0) - 0.5) * lambda * t;
}

double average_error(double t, const SnrPrior& prior, double w2, double w4, int grid) {
  if (!(t > 0.0 && t < 1.0)) throw std::domain_error("t must lie in (0, 1)");
  prior.validate();
  const double m_null = mean_under_lambda(t, 0.0, w2, w4);
  const double m_alt = mean_under_lambda(t, t, w2, w4);
  const double v = -2.0 * std::log1p(-t) + (4.0 / w2 - 2.0) * t + (2.0 / (w4 - 1.0) - 1.0) * t * t;
  const double denom = 2.0 * std::sqrt(2.0 * v);
  const auto type2 = [&](double lambda) {
    return 0.5 * std::erfc((2.0 * mean_under_lambda(t, lambda, w2, w4) - m_alt - m_null) / denom);
  };
  const double type1 = 0.5 * std::erfc((m_alt - m_null) / denom);

  double miss = 0.0;
  if (prior.kind == SnrPrior::Kind::uniform01) {
    // lambda = u^2 removes the sqrt(lambda) kink at the origin.
    const int panels = std::max(2, grid + (grid % 2));
    const double top = std::sqrt(kUniformTop);
    const double h = top / panels;
    const auto g = [&](double u) { return 2.0 * u * type2(u * u); };
    double acc = g(0.0) + g(top);
    for (int k = 1; k < panels; ++k) acc += (k % 2 ? 4.0 : 2.0) * g(k * h);
    // Mass of [1 - 1e-9, 1] is negligible; the integral is over probability 1.
    miss = acc * h / 3.0 / kUniformTop;
  } else {
    for (std::size_t i = 0; i < prior.values.size(); ++i) {
      miss += prior.weights[i] * type2(prior.values[i]);
    }
  }
  return type1 + miss;
}

AdaptiveResult optimize_t(const SnrPrior& prior, double w2, double w4, double tol, int grid) {
  if (!(tol >= 1e-6)) throw std::invalid_argument("tol must be at least 1e-6");
  prior.validate();
  AdaptiveResult out;
  const auto eval = [&](double t) {
    const double e = average_error(t, prior, w2, w4, grid);
    out.trace.emplace_back(t, e);
    return e;
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 1e-4, b = 1.0 - 1e-4;
  const double fa = eval(a), fb = eval(b);
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = eval(c), fd = eval(d);
  int violations = 0;
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
    // An interior point worse than both outer endpoints cannot happen for a
    // unimodal objective.
    violations = std::min(fc, fd) > std::min(fa, fb) ? violations + 1 : 0;
    if (violations >= 3) out.non_unimodal = true;
  }
  out.t_star = 0.5 * (a + b);
  out.err_star = eval(out.t_star);
  if (fa < out.err_star || fb < out.err_star) {
    out.non_unimodal = true;
    if (fa <= fb) {
      out.t_star = 1e-4;
      out.err_star = fa;
    } else {
      out.t_star = 1.0 - 1e-4;
      out.err_star = fb;
    }
  }
  return out;
}

}  // namespace spikedet
