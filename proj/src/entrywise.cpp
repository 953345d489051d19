#include "spikedet/entrywise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "detail/quadrature.hpp"

namespace spikedet {
namespace {

constexpr double kTailFloor = 1e-16;

void require_subcritical(double omega, const FisherFunctionals& fi) {
  if (!(omega > 0.0 && omega * fi.F < 1.0)) {
    throw std::domain_error("transformed test requires 0 < omega and omega * F < 1");
  }
}

}  // namespace

FisherFunctionals fisher_functionals(const DensitySpec& d, QuadratureConfig quad) {
  double w = quad.window;
  if (w <= 0.0) {
    w = std::max(tail_window(d.g, kTailFloor), tail_window(d.gd, kTailFloor));
  }
  for (const ScalarFn* f : {&d.g, &d.gd}) {
    if (!((*f)(w) < kTailFloor && (*f)(-w) < kTailFloor)) {
      std::ostringstream os;
      os << "density '" << d.name << "' has tail mass above " << kTailFloor
         << " at the window edge W = " << w;
      throw std::runtime_error(os.str());
    }
  }
  const auto integral = [&](auto&& integrand) {
    return detail::integrate(
        [&](double x) {
          const double g = d.g(x);
          return g > 0.0 ? integrand(x, g) : 0.0;
        },
        -w, w, quad.tol, quad.panels);
  };
  // Written through the score h = -g'/g so the tails never divide underflowed
  // densities: g'^2/g = h^2 g, g'^2 g''/g^2 = h^2 g'', g'^4/g^3 = h^4 g.
  FisherFunctionals fi;
  fi.F = integral([&](double x, double g) {
    const double h = d.score(x);
    return h * h * g;
  });
  fi.Fd = detail::integrate(
      [&](double x) {
        const double g = d.gd(x);
        if (!(g > 0.0)) return 0.0;
        const double h = d.score_d(x);
        return h * h * g;
      },
      -w, w, quad.tol, quad.panels);
  const double g_int = integral([&](double x, double) {
    const double h = d.score(x);
    return h * h * d.g2(x);
  });
  const double w4_int = integral([&](double x, double g) {
    const double h2 = d.score(x) * d.score(x);
    return h2 * h2 * g;
  });
  fi.G = g_int / (2.0 * fi.F);
  fi.w4t = w4_int / (fi.F * fi.F);
  return fi;
}

DataMatrix transform(const DataMatrix& m, const DensitySpec& d, double w2,
                     const FisherFunctionals& fi) {
  if (m.is_complex()) throw std::invalid_argument("entrywise transform is defined for real matrices");
  if (!(w2 > 0.0)) throw std::domain_error("entrywise transform requires w2 > 0");
  const auto& a = m.real_entries();
  const Index n = a.rows();
  const double dn = static_cast<double>(n);
  const double root_n = std::sqrt(dn);
  const double off_scale = 1.0 / std::sqrt(fi.F * dn);
  const double diag_in = std::sqrt(dn / w2);
  const double diag_out = std::sqrt(w2 / (fi.Fd * dn));
  const bool linear = d.kind == DensityKind::gaussian;

  Eigen::MatrixXd out(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double x = a(i, j);
      if (linear) {
        out(i, j) = fi.F == 1.0 ? x : x / std::sqrt(fi.F);
      } else {
        if (!(d.g(root_n * x) > 0.0)) {
          throw std::domain_error("noise density vanishes at a data entry");
        }
        out(i, j) = off_scale * d.score(root_n * x);
      }
      out(j, i) = out(i, j);
    }
    const double x = a(j, j);
    if (linear) {
      out(j, j) = fi.Fd == 1.0 ? x : x / std::sqrt(fi.Fd);
    } else {
      if (!(d.gd(diag_in * x) > 0.0)) {
        throw std::domain_error("diagonal noise density vanishes at a data entry");
      }
      out(j, j) = diag_out * d.score_d(diag_in * x);
    }
  }
  return DataMatrix::real(std::move(out));
}

AnalyticFn phi_tilde(double omega, double w2, const FisherFunctionals& fi) {
  require_subcritical(omega, fi);
  const double s = omega * fi.F;
  const double root_s = std::sqrt(s);
  const double lin = std::sqrt(omega) * (2.0 * std::sqrt(fi.Fd) / w2 - std::sqrt(fi.F));
  const double quad = omega * (fi.G / (fi.w4t - 1.0) - 0.5 * fi.F);
  AnalyticFn f;
  f.eval = [s, root_s, lin, quad](double x) {
    return -std::log(1.0 - root_s * x + s) + (lin + quad * x) * x;
  };
  f.label = "phi_tilde";
  f.hi = root_s + 1.0 / root_s;
  f.lo = -f.hi;
  return f;
}

namespace {

double assemble_Ltilde(double logdet, Index dim, const Traces& tr, double omega, double w2,
                       const FisherFunctionals& fi) {
  const double n = static_cast<double>(dim);
  const double lin = std::sqrt(omega) * (2.0 * std::sqrt(fi.Fd) / w2 - std::sqrt(fi.F));
  const double quad = omega * (fi.G / (fi.w4t - 1.0) - 0.5 * fi.F);
  return -logdet + 0.5 * omega * fi.F * n + lin * tr.tr1 + quad * (tr.tr2 - n);
}

}  // namespace

Evaluated statistic_Ltilde(const SpectrumResult& spec, const Traces& tr, double omega, double w2,
                           const FisherFunctionals& fi) {
  if (!(omega > 0.0)) throw std::domain_error("omega must be positive");
  if (!(w2 > 0.0)) throw std::domain_error("w2 must be positive");
  const double s = omega * fi.F;
  if (s >= 1.0) return Evaluated::reliably_detectable();
  const Evaluated logdet = log_det_shift(spec, s);
  if (!logdet.is_finite()) return logdet;
  return Evaluated::of(assemble_Ltilde(logdet.value(), spec.n(), tr, omega, w2, fi));
}

double statistic_Ltilde_real_part(const SpectrumResult& spec, const Traces& tr, double omega,
                                  double w2, const FisherFunctionals& fi) {
  require_subcritical(omega, fi);
  if (!(w2 > 0.0)) throw std::domain_error("w2 must be positive");
  return assemble_Ltilde(log_abs_det_shift(spec, omega * fi.F), spec.n(), tr, omega, w2, fi);
}

double critical_tilde(double omega, double w2, const FisherFunctionals& fi) {
  require_subcritical(omega, fi);
  const double s = omega * fi.F;
  const double og = omega * fi.G;
  return -std::log1p(-s) + (fi.Fd / w2 - fi.F + (w2 - 1.0) * fi.G / (fi.w4t - 1.0)) * omega +
         (0.25 * fi.w4t - 1.0) * s * s + og * og / (2.0 * (fi.w4t - 1.0));
}

namespace {

double separation_tilde(double omega, double w2, const FisherFunctionals& fi) {
  const double s = omega * fi.F;
  return -std::log1p(-s) + (2.0 * fi.Fd / w2 - fi.F) * omega +
         (fi.G * fi.G / (fi.w4t - 1.0) - 0.5 * fi.F * fi.F) * omega * omega;
}

}  // namespace

LimitingMoments limiting_moments_tilde(double omega, double w2, const FisherFunctionals& fi) {
  require_subcritical(omega, fi);
  const double s = omega * fi.F;
  const double m0 = -0.5 * std::log1p(-s) +
                    ((w2 - 1.0) * fi.G / (fi.w4t - 1.0) - 0.5 * fi.F) * omega +
                    0.25 * (fi.w4t - 3.0) * s * s;
  const double e2 = separation_tilde(omega, w2, fi);
  const double v0 = -2.0 * std::log1p(-s) + (4.0 * fi.Fd / w2 - 2.0 * fi.F) * omega +
                    (2.0 * fi.G * fi.G / (fi.w4t - 1.0) - fi.F * fi.F) * omega * omega;
  return {m0, m0 + e2, v0};
}

double theoretical_error_tilde(double omega, double w2, const FisherFunctionals& fi) {
  require_subcritical(omega, fi);
  const double e2 = separation_tilde(omega, w2, fi);
  if (e2 < 0.0) throw std::logic_error("theoretical_error_tilde: negative radicand");
  return std::erfc(0.25 * std::sqrt(e2));
}

double clt_mean_transformed(const AnalyticFn& f, double lambda, double w2,
                            const FisherFunctionals& fi, CltOptions opts) {
  const double s = lambda * fi.F;
  if (!(lambda >= 0.0 && s < 1.0)) {
    throw std::domain_error("clt_mean_transformed requires 0 <= lambda and lambda * F < 1");
  }
  const int ellmax =
      std::max(4, opts.ellmax > 0 ? opts.ellmax : default_ellmax(s, opts.nodes));
  const ChebCoeffs c = chebyshev_coeffs(f, ellmax, opts.nodes);
  double tail = 0.0;
  if (s > 0.0) {
    for (int l = 3; l <= ellmax; ++l) tail += std::pow(s, 0.5 * l) * c[l];
  }
  return 0.25 * (f(2.0) + f(-2.0)) - 0.5 * c[0] + std::sqrt(lambda * fi.Fd) * c[1] +
         (w2 - 2.0 + lambda * fi.G) * c[2] + (fi.w4t - 3.0) * c[4] + tail;
}

double clt_var_transformed(const AnalyticFn& f, double w2, const FisherFunctionals& fi,
                           CltOptions opts) {
  return clt_var(f, w2, fi.w4t, false, opts);
}

TransformedReport run_transformed_test(const DataMatrix& m, const DensitySpec& d, double omega,
                                       double w2, const FisherFunctionals& fi) {
  TransformedReport r;
  if (omega * fi.F >= 1.0) {
    r.statistic = Evaluated::reliably_detectable();
    r.decision = Decision::reject_h0;
    r.theoretical_error = 0.0;
    return r;
  }
  const DataMatrix mt = transform(m, d, w2, fi);
  r.statistic = statistic_Ltilde(eigvals_sym(mt), traces(mt), omega, w2, fi);
  r.critical = critical_tilde(omega, w2, fi);
  r.decision = decide(r.statistic, r.critical);
  r.limiting = limiting_moments_tilde(omega, w2, fi);
  r.theoretical_error = theoretical_error_tilde(omega, w2, fi);
  return r;
}

bool check_delocalization(const Eigen::VectorXd& x, double phi) {
  if (x.size() == 0) return true;
  return x.cwiseAbs().maxCoeff() <= std::pow(static_cast<double>(x.size()), -phi);
}

}  // namespace spikedet
