#pragma once

// Chebyshev coefficients against the arcsine weight on [-2, 2], semicircle
// averages, and the Gaussian limit (mean, variance) of linear spectral
// statistics sum_i f(mu_i) - N * int f dsc.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "spikedet/outcome.hpp"
#include "spikedet/spectral.hpp"

namespace spikedet {

/// Real test function analytic on an open interval containing [-2, 2].
/// `lo`/`hi` bound the open domain; eigenvalues outside it make lss()
/// return out_of_domain.
struct AnalyticFn {
  std::function<double(double)> eval;
  std::string label;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double operator()(double x) const { return eval(x); }
};

/// tau_0 .. tau_ellmax of f, where
///   tau_l(f) = (1/pi) int_{-2}^{2} T_l(x/2) f(x) / sqrt(4 - x^2) dx.
struct ChebCoeffs {
  std::vector<double> tau;
  int nodes = 0;

  int ellmax() const { return static_cast<int>(tau.size()) - 1; }
  double operator[](int l) const {
    return l < static_cast<int>(tau.size()) ? tau[static_cast<std::size_t>(l)] : 0.0;
  }
};

inline constexpr int kDefaultNodes = 2048;

struct CltOptions {
  int ellmax = 0;  ///< 0 = automatic
  int nodes = kDefaultNodes;
};

/// Gauss-Chebyshev (first kind) coefficients, T_l by three-term recurrence.
/// Requires nodes >= 64 and 0 <= ellmax < nodes. Throws std::domain_error if
/// f is non-finite at a node.
ChebCoeffs chebyshev_coeffs(const AnalyticFn& f, int ellmax, int nodes = kDefaultNodes);

double tau(const AnalyticFn& f, int ell, int nodes = kDefaultNodes);

/// max(50, ceil(log(1e-12) / log(sqrt(lambda)))), capped at nodes - 1.
int default_ellmax(double lambda, int nodes = kDefaultNodes);

/// x -> log(1/(1 - sqrt(w) x + w)) + a x + b x^2, the optimal LSS test
/// function. Real: a = sqrt(w)(2/w2 - 1), b = w(1/(w4-1) - 1/2).
/// Complex: a = sqrt(w)(1/w2 - 1), b = (w/2)(1/(w4-1) - 1).
/// Requires 0 < w < 1, w2 > 0, w4 > 1.
AnalyticFn phi_omega(double omega, double w2, double w4, bool complex = false);

/// Limiting mean of the centred LSS at SNR lambda (0 <= lambda < 1).
/// Real: (f(2)+f(-2))/4 - tau_0/2 + (w2-2) tau_2 + (w4-3) tau_4
///       + sum_{l>=1} lambda^{l/2} tau_l.
/// Complex: (w2-1) tau_2 + (w4-2) tau_4 + sum_{l>=1} lambda^{l/2} tau_l.
double clt_mean(const AnalyticFn& f, double lambda, double w2, double w4, bool complex = false,
                CltOptions opts = {});

/// Limiting variance; independent of lambda.
/// Real: (w2-2) tau_1^2 + 2(w4-3) tau_2^2 + 2 sum l tau_l^2.
/// Complex: (w2-1) tau_1^2 + 2(w4-2) tau_2^2 + sum l tau_l^2.
double clt_var(const AnalyticFn& f, double w2, double w4, bool complex = false,
               CltOptions opts = {});

/// int_{-2}^{2} f(x) sqrt(4 - x^2) / (2 pi) dx by Gauss-Chebyshev of the
/// second kind.
double semicircle_avg(const AnalyticFn& f, int nodes = kDefaultNodes);

/// sum_i f(mu_i) - N * semicircle_avg(f).
Evaluated lss(const AnalyticFn& f, const SpectrumResult& spec, int nodes = kDefaultNodes);

/// |sum_{l>=1} w^{l/2} tau_l(f)| / sqrt(V(f)) (real ensemble). Throws
/// std::domain_error when V(f) vanishes.
double optimality_ratio(const AnalyticFn& f, double omega, double w2, double w4,
                        CltOptions opts = {});

/// Polynomial c0 + c1 x + ... evaluated by Horner's rule.
AnalyticFn polynomial(std::vector<double> coeffs);

}  // namespace spikedet
