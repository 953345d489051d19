#pragma once

// Entrywise transformation M -> M~ by the score h = -g'/g of the noise
// density, the Fisher-type functionals it depends on, and the test on M~.

#include "spikedet/chebyshev.hpp"
#include "spikedet/density.hpp"
#include "spikedet/lss_test.hpp"

namespace spikedet {

/// F = int g'^2/g, Fd likewise for gd, G = (1/2F) int g'^2 g''/g^2,
/// w4t = (1/F^2) int g'^4/g^3.
struct FisherFunctionals {
  double F = 1.0;
  double Fd = 1.0;
  double G = 1.0;
  double w4t = 3.0;
};

struct QuadratureConfig {
  /// Integration half-width; 0 picks the smallest power of two with
  /// g(+-W) < 1e-16.
  double window = 0.0;
  double tol = 1e-14;
  /// Panels the window is split into before adaptive refinement.
  int panels = 16;
};

/// Throws std::runtime_error when the density tail is still above 1e-16 at
/// the window edge.
FisherFunctionals fisher_functionals(const DensitySpec& d, QuadratureConfig quad = {});

/// M~_ij = h(sqrt(N) M_ij) / sqrt(F N) (i != j),
/// M~_ii = sqrt(w2 / (Fd N)) h_d(sqrt(N / w2) M_ii). Real matrices only.
DataMatrix transform(const DataMatrix& m, const DensitySpec& d, double w2,
                     const FisherFunctionals& fi);

/// The optimal test function for M~:
///   log(1/(1 - sqrt(wF) x + wF)) + sqrt(w)(2 sqrt(Fd)/w2 - sqrt(F)) x
///   + w(G/(w4t-1) - F/2) x^2.   Requires wF < 1.
AnalyticFn phi_tilde(double omega, double w2, const FisherFunctionals& fi);

/// L~_w; reliably_detectable when wF >= 1, signal_certain when the log-det
/// factor is non-positive.
Evaluated statistic_Ltilde(const SpectrumResult& spec, const Traces& tr, double omega, double w2,
                           const FisherFunctionals& fi);

/// L~_w with log|.|; throws std::domain_error when wF >= 1.
double statistic_Ltilde_real_part(const SpectrumResult& spec, const Traces& tr, double omega,
                                  double w2, const FisherFunctionals& fi);

/// m~_w = (m~0 + m~_plus) / 2.
double critical_tilde(double omega, double w2, const FisherFunctionals& fi);

LimitingMoments limiting_moments_tilde(double omega, double w2, const FisherFunctionals& fi);

/// erfc(E~/4), E~^2 = -log(1 - wF) + (2Fd/w2 - F) w + (G^2/(w4t-1) - F^2/2) w^2.
double theoretical_error_tilde(double omega, double w2, const FisherFunctionals& fi);

/// Limiting mean of the LSS of M~ at SNR lambda (lambda F < 1):
///   (f(2)+f(-2))/4 - tau_0/2 + sqrt(lambda Fd) tau_1 + (w2 - 2 + lambda G) tau_2
///   + (w4t - 3) tau_4 + sum_{l>=3} (lambda F)^{l/2} tau_l.
double clt_mean_transformed(const AnalyticFn& f, double lambda, double w2,
                            const FisherFunctionals& fi, CltOptions opts = {});

/// Variance of the LSS of M~ (real formula with w4 replaced by w4t).
double clt_var_transformed(const AnalyticFn& f, double w2, const FisherFunctionals& fi,
                           CltOptions opts = {});

struct TransformedReport {
  Evaluated statistic = Evaluated::of(0.0);
  double critical = 0.0;
  Decision decision = Decision::accept_h0;
  LimitingMoments limiting;
  double theoretical_error = 1.0;
};

/// Transform, then test. When wF >= 1 the statistic is reliably_detectable,
/// the decision is reject_h0 and the limiting fields are left at defaults.
TransformedReport run_transformed_test(const DataMatrix& m, const DensitySpec& d, double omega,
                                       double w2, const FisherFunctionals& fi);

/// ||x||_inf <= n^{-phi}.
bool check_delocalization(const Eigen::VectorXd& x, double phi = 3.0 / 8.0);

}  // namespace spikedet
