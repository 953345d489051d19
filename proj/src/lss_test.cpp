#include "spikedet/lss_test.hpp"

#include <cmath>
#include <stdexcept>

namespace spikedet {

void TestParams::validate() const {
  if (!(omega > 0.0 && omega < 1.0)) throw std::domain_error("omega must lie in (0, 1)");
  if (!(w2 > 0.0)) {
    throw std::domain_error("w2 must be positive (w2 = 0: use exceptional_w2_zero)");
  }
  if (!(w4 > 1.0)) {
    throw std::domain_error("w4 must exceed 1 (w4 = 1: use exceptional_w4_one)");
  }
}

std::string_view to_string(Decision d) {
  return d == Decision::accept_h0 ? "accept_h0" : "reject_h0";
}

namespace {

double assemble_L(double logdet, Index dim, const Traces& tr, const TestParams& p) {
  const double w = p.omega;
  const double n = static_cast<double>(dim);
  const double lin = p.complex ? std::sqrt(w) * (1.0 / p.w2 - 1.0)
                               : std::sqrt(w) * (2.0 / p.w2 - 1.0);
  const double quad = p.complex ? 0.5 * w * (1.0 / (p.w4 - 1.0) - 1.0)
                                : w * (1.0 / (p.w4 - 1.0) - 0.5);
  return -logdet + 0.5 * w * n + lin * tr.tr1 + quad * (tr.tr2 - n);
}

}  // namespace

Evaluated statistic_L(const SpectrumResult& spec, const Traces& tr, const TestParams& p) {
  p.validate();
  const Evaluated logdet = log_det_shift(spec, p.omega);
  if (!logdet.is_finite()) return logdet;
  return Evaluated::of(assemble_L(logdet.value(), spec.n(), tr, p));
}

double statistic_L_real_part(const SpectrumResult& spec, const Traces& tr, const TestParams& p) {
  p.validate();
  return assemble_L(log_abs_det_shift(spec, p.omega), spec.n(), tr, p);
}

double critical_value(const TestParams& p) {
  p.validate();
  const double w = p.omega, w2 = p.w2, w4 = p.w4;
  if (p.complex) {
    return -std::log1p(-w) + 0.5 * (w2 - 1.0) * (1.0 / (w4 - 1.0) - 1.0 / w2) * w +
           (0.25 * (w4 - 3.0) + 0.25 / (w4 - 1.0)) * w * w;
  }
  return -std::log1p(-w) + (w2 - 1.0) * (1.0 / (w4 - 1.0) - 1.0 / w2) * w +
         (0.25 * w4 - 1.0 + 0.5 / (w4 - 1.0)) * w * w;
}

Decision decide(const Evaluated& l, double m_crit) {
  if (!l.is_finite()) return Decision::reject_h0;
  return l.value() <= m_crit ? Decision::accept_h0 : Decision::reject_h0;
}

namespace {

// E^2 = m_plus - m0.
double separation(const TestParams& p) {
  const double w = p.omega;
  if (p.complex) {
    return -std::log1p(-w) + (1.0 / p.w2 - 1.0) * w + (1.0 / (p.w4 - 1.0) - 1.0) * 0.5 * w * w;
  }
  return -std::log1p(-w) + (2.0 / p.w2 - 1.0) * w + (1.0 / (p.w4 - 1.0) - 0.5) * w * w;
}

}  // namespace

LimitingMoments limiting_moments(const TestParams& p) {
  p.validate();
  const double e2 = separation(p);
  if (p.complex) {
    // Anchored on the complex critical value so that m_w = (m0 + m_plus)/2
    // and the error erfc(E/4) hold together.
    const double crit = critical_value(p);
    return {crit - 0.5 * e2, crit + 0.5 * e2, 2.0 * e2};
  }
  const double w = p.omega, w2 = p.w2, w4 = p.w4;
  const double m0 = -0.5 * std::log1p(-w) + ((w2 - 1.0) / (w4 - 1.0) - 0.5) * w +
                    0.25 * (w4 - 3.0) * w * w;
  const double v0 = -2.0 * std::log1p(-w) + (4.0 / w2 - 2.0) * w +
                    (2.0 / (w4 - 1.0) - 1.0) * w * w;
  return {m0, m0 + e2, v0};
}

double theoretical_error(const TestParams& p) {
  p.validate();
  const double e2 = separation(p);
  if (e2 < 0.0) throw std::logic_error("theoretical_error: negative radicand");
  return std::erfc(0.25 * std::sqrt(e2));
}

TestReport run_test(const DataMatrix& m, const TestParams& p) {
  p.validate();
  if (m.is_complex() != p.complex) {
    throw std::invalid_argument("matrix and test parameters disagree on real/complex");
  }
  TestReport r;
  r.statistic = statistic_L(eigvals_sym(m), traces(m), p);
  r.critical = critical_value(p);
  r.decision = decide(r.statistic, r.critical);
  r.signal_certain = r.statistic.kind() == Evaluated::Kind::signal_certain;
  r.limiting = limiting_moments(p);
  r.theoretical_error = theoretical_error(p);
  return r;
}

MomentEstimate estimate_w2_w4(const DataMatrix& m) {
  const Index n = m.n();
  if (n < 32) throw std::invalid_argument("estimate_w2_w4 requires n >= 32");
  MomentEstimate est;
  const auto accumulate = [&](const auto& a) {
    for (Index j = 0; j < n; ++j) {
      est.w2 += std::norm(a(j, j));
      for (Index i = 0; i < j; ++i) {
        const double sq = std::norm(a(i, j));
        est.w4 += sq * sq;
      }
    }
  };
  if (m.is_complex()) {
    accumulate(m.complex_entries());
  } else {
    accumulate(m.real_entries());
  }
  est.w4 *= 2.0 * static_cast<double>(n) / static_cast<double>(n - 1);
  return est;
}

double exceptional_w2_zero(double tr1) { return tr1 * tr1; }

double exceptional_w4_one(double tr2, Index n, double w2) {
  return tr2 - (static_cast<double>(n) - 1.0 + w2);
}

double biased_sum_statistic(const DataMatrix& m) {
  if (m.is_complex()) return m.complex_entries().sum().real();
  return m.real_entries().sum();
}

}  // namespace spikedet
