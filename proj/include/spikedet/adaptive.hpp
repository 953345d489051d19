#pragma once

// Test for an unknown SNR drawn from a prior: the statistic is run at a
// representative value t, chosen to minimize the average limiting error.

#include <utility>
#include <vector>

namespace spikedet {

struct SnrPrior {
  enum class Kind { uniform01, point, discrete, custom_grid };

  Kind kind = Kind::uniform01;
  /// Support points in (0, 1) and their weights (point: one entry).
  std::vector<double> values;
  std::vector<double> weights;

  static SnrPrior uniform01() { return {}; }
  static SnrPrior point(double lambda0) { return {Kind::point, {lambda0}, {1.0}}; }
  /// Weights are normalized by their sum; validate() checks the result.
  static SnrPrior discrete(std::vector<double> values, std::vector<double> weights);
  /// Quadrature nodes/weights for a continuous prior supplied by the caller.
  static SnrPrior custom_grid(std::vector<double> values, std::vector<double> weights);

  /// Throws std::invalid_argument: negative weights, weights not summing to
  /// 1 within 1e-12, or support outside (0, 1).
  void validate() const;
};

/// Limiting mean of L_t under SNR lambda:
///   m_t(lambda) = -1/2 log(1-t) + ((w2-1)/(w4-1) - 1/2) t + (w4-3) t^2/4
///                 - log(1 - sqrt(lambda t)) + (2/w2 - 1) sqrt(lambda t)
///                 + (1/(w4-1) - 1/2) lambda t.
double mean_under_lambda(double t, double lambda, double w2, double w4);

/// Average limiting Type-I + Type-II error of the test run at t. The uniform
/// prior integral is composite Simpson on `grid` panels over [0, 1 - 1e-9].
double average_error(double t, const SnrPrior& prior, double w2, double w4, int grid = 512);

struct AdaptiveResult {
  double t_star = 0.0;
  double err_star = 0.0;
  std::vector<std::pair<double, double>> trace;  ///< (t, err) in evaluation order
  bool non_unimodal = false;
};

/// Golden-section search for t on [1e-4, 1 - 1e-4] down to bracket width
/// `tol` (>= 1e-6). Objective shapes that break bracketing are flagged, not
/// fatal.
AdaptiveResult optimize_t(const SnrPrior& prior, double w2, double w4, double tol = 1e-5,
                          int grid = 512);

}  // namespace spikedet
