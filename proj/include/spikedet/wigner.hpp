#pragma once

// Sampling of Wigner noise, spikes and spiked data matrices.

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <variant>

#include "spikedet/density.hpp"
#include "spikedet/rng.hpp"

namespace spikedet {

using Index = Eigen::Index;

enum class NoiseFamily { goe, gue, rademacher_offdiag, sech, custom_density, none };

/// Ensemble family plus the moment parameters of the Wigner noise:
/// w2 = N E[H_ii^2], w3 = N^{3/2} E[H_ij^3], w4 = N^2 E[H_ij^4]
/// (|H_ij| for complex families).
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::goe;
  double w2 = 2.0;
  double w3 = 0.0;
  double w4 = 3.0;
  bool complex = false;
  /// Set for custom_density only.
  std::shared_ptr<const DensitySpec> density;

  static NoiseSpec goe();
  static NoiseSpec gue();
  static NoiseSpec sech();
  /// Off-diagonal entries +-1/sqrt(N) (w4 = 1); diagonal N(0, w2/N).
  static NoiseSpec rademacher(double w2 = 1.0);
  /// Off-diagonal sqrt(N) H_ij ~ g, diagonal sqrt(N/w2) H_ii ~ gd. g must
  /// have unit variance; w4 is integrated from g.
  static NoiseSpec custom(DensitySpec density, double w2);
  /// H = 0.
  static NoiseSpec none();

  /// Throws std::invalid_argument when the family/flag/moment combination
  /// is inconsistent.
  void validate() const;
};

/// Closed-form (w2, w4) of a built-in family. Throws for custom_density and
/// none.
std::pair<double, double> theoretical_moments(const NoiseSpec& spec);

enum class SpikeKind { rademacher_iid, unit_sphere, sparse, all_ones, biased, explicit_vector };

struct SpikePrior {
  SpikeKind kind = SpikeKind::rademacher_iid;
  /// Number of nonzero entries for sparse.
  Index k = 0;
  /// Bias c in [-1, 1] for biased: sqrt(N) x_i = +-1 with mean c.
  double c = 0.0;
  Eigen::VectorXd vector;
  std::optional<double> delocalization_exponent;

  static SpikePrior of(SpikeKind kind) {
    SpikePrior p;
    p.kind = kind;
    return p;
  }
  static SpikePrior rademacher() { return of(SpikeKind::rademacher_iid); }
  static SpikePrior sphere() { return of(SpikeKind::unit_sphere); }
  static SpikePrior ones() { return of(SpikeKind::all_ones); }
  static SpikePrior sparse(Index k) {
    SpikePrior p = of(SpikeKind::sparse);
    p.k = k;
    return p;
  }
  static SpikePrior biased(double c) {
    SpikePrior p = of(SpikeKind::biased);
    p.c = c;
    return p;
  }
  static SpikePrior from_vector(Eigen::VectorXd v) {
    SpikePrior p = of(SpikeKind::explicit_vector);
    p.vector = std::move(v);
    return p;
  }
};

/// Symmetric (real) or Hermitian (complex) data matrix. Symmetry is checked
/// exactly on construction; the entries are never mutated afterwards.
class DataMatrix {
 public:
  static DataMatrix real(Eigen::MatrixXd entries);
  static DataMatrix hermitian(Eigen::MatrixXcd entries);

  Index n() const;
  bool is_complex() const { return std::holds_alternative<Eigen::MatrixXcd>(entries_); }
  /// Throws std::logic_error if the matrix is complex.
  const Eigen::MatrixXd& real_entries() const;
  /// Throws std::logic_error if the matrix is real.
  const Eigen::MatrixXcd& complex_entries() const;

  friend bool operator==(const DataMatrix&, const DataMatrix&);

 private:
  explicit DataMatrix(std::variant<Eigen::MatrixXd, Eigen::MatrixXcd> e)
      : entries_(std::move(e)) {}
  std::variant<Eigen::MatrixXd, Eigen::MatrixXcd> entries_;
};

/// N x N Wigner matrix with off-diagonal variance 1/N and diagonal variance
/// w2/N. Entry (i, j), i <= j, depends only on (seed, i, j).
DataMatrix sample_noise(Index n, const NoiseSpec& spec, Seed seed);

/// Unit-norm spike drawn from the prior.
Eigen::VectorXd sample_spike(Index n, const SpikePrior& prior, Seed seed);

/// M = sqrt(lambda) x x^* + H.
DataMatrix assemble(const Eigen::VectorXd& x, double lambda, const DataMatrix& h);

}  // namespace spikedet
