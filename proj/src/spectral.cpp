#include "spikedet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace spikedet {

namespace {

template <class Matrix>
SpectrumResult solve(const Matrix& a) {
  if (!a.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
  const Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue iteration did not converge");
  SpectrumResult r;
  r.eigvals.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(r.eigvals.begin(), r.eigvals.end(), std::greater<>());
  return r;
}

}  // namespace

SpectrumResult eigvals_sym(const DataMatrix& m) {
  return m.is_complex() ? solve(m.complex_entries()) : solve(m.real_entries());
}

Evaluated log_det_shift(const SpectrumResult& spec, double omega) {
  if (!(omega > 0.0 && omega < 1.0)) throw std::domain_error("omega must lie in (0, 1)");
  const double shift = 1.0 + omega;
  const double scale = std::sqrt(omega);
  double sum = 0.0;
  for (const double mu : spec.eigvals) {
    const double factor = shift - scale * mu;
    if (!(factor > 0.0)) return Evaluated::signal_certain();
    sum += std::log(factor);
  }
  return Evaluated::of(sum);
}

double log_abs_det_shift(const SpectrumResult& spec, double omega) {
  if (!(omega > 0.0 && omega < 1.0)) throw std::domain_error("omega must lie in (0, 1)");
  const double shift = 1.0 + omega;
  const double scale = std::sqrt(omega);
  double sum = 0.0;
  for (const double mu : spec.eigvals) sum += std::log(std::abs(shift - scale * mu));
  return sum;
}

Traces traces(const DataMatrix& m) {
  if (m.is_complex()) {
    const auto& a = m.complex_entries();
    return {a.diagonal().real().sum(), a.cwiseAbs2().sum()};
  }
  const auto& a = m.real_entries();
  return {a.trace(), a.squaredNorm()};
}

}  // namespace spikedet
