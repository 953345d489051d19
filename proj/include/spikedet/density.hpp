#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace spikedet {

using ScalarFn = std::function<double(double)>;

enum class DensityKind { gaussian, sech, custom };

/// Density of the normalized noise entries sqrt(N) H_ij (off-diagonal, g)
/// and sqrt(N / w2) H_ii (diagonal, gd), with the derivatives the
/// entrywise transform and the Fisher functionals need.
///
/// Densities must be smooth, strictly positive and symmetric about zero.
/// All callables are stateless and safe to evaluate concurrently.
struct DensitySpec {
  DensityKind kind = DensityKind::gaussian;
  std::string name;
  ScalarFn g, g1, g2;
  ScalarFn gd, gd1;
  /// Inverse CDFs used for sampling.
  ScalarFn quantile, quantile_d;
  /// Score functions h = -g'/g and h_d = -gd'/gd. Built-ins supply closed
  /// forms that stay accurate where g underflows.
  ScalarFn score, score_d;
  /// True when g1/g2 are finite differences rather than closed forms
  /// (accuracy of derived quantities drops to ~1e-6).
  bool numeric_derivatives = false;

  static DensitySpec gaussian();
  /// g(x) = 1 / (2 cosh(pi x / 2)), used for both off-diagonal and diagonal.
  static DensitySpec sech();
  /// User density. Missing derivatives are replaced by central differences
  /// with step 1e-5; the quantile is tabulated from the numerical CDF.
  static DensitySpec custom(std::string name, ScalarFn g, ScalarFn gd,
                            ScalarFn g1 = {}, ScalarFn g2 = {},
                            ScalarFn gd1 = {});
  /// "gaussian" or "sech".
  static DensitySpec by_name(std::string_view name);
};

/// Half-width W of the integration window: the smallest power of two with
/// f(+-W) below `floor`.
double tail_window(const ScalarFn& f, double floor = 1e-16);

/// Integral of w^k f(w) over the real line (adaptive Gauss-Kronrod on the
/// tail window). Throws std::runtime_error if the window cannot be found.
double density_moment(const ScalarFn& f, int k);

}  // namespace spikedet
