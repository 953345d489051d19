#pragma once

#include <vector>

#include "spikedet/outcome.hpp"
#include "spikedet/wigner.hpp"

namespace spikedet {

/// Eigenvalues sorted descending (mu_1 >= ... >= mu_N).
struct SpectrumResult {
  std::vector<double> eigvals;

  Index n() const { return static_cast<Index>(eigvals.size()); }
};

struct Traces {
  double tr1 = 0.0;  ///< sum_i M_ii
  double tr2 = 0.0;  ///< sum_ij |M_ij|^2 (= Tr M^2 for Hermitian M)
};

/// Eigenvalues of a symmetric or Hermitian matrix. Throws
/// std::invalid_argument on non-finite entries.
SpectrumResult eigvals_sym(const DataMatrix& m);

/// sum_i log((1 + omega) - sqrt(omega) mu_i), or signal_certain when some
/// factor is non-positive. Throws std::domain_error unless 0 < omega < 1.
Evaluated log_det_shift(const SpectrumResult& spec, double omega);

/// sum_i log|(1 + omega) - sqrt(omega) mu_i|: the real part of the analytic
/// continuation past the singularity (-inf on an exactly zero factor).
double log_abs_det_shift(const SpectrumResult& spec, double omega);

Traces traces(const DataMatrix& m);

}  // namespace spikedet
