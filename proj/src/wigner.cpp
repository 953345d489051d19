#include "spikedet/wigner.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikedet {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

NoiseSpec NoiseSpec::goe() { return {NoiseFamily::goe, 2.0, 0.0, 3.0, false, nullptr}; }
NoiseSpec NoiseSpec::gue() { return {NoiseFamily::gue, 1.0, 0.0, 2.0, true, nullptr}; }
NoiseSpec NoiseSpec::sech() { return {NoiseFamily::sech, 1.0, 0.0, 5.0, false, nullptr}; }
NoiseSpec NoiseSpec::rademacher(double w2) {
  return {NoiseFamily::rademacher_offdiag, w2, 0.0, 1.0, false, nullptr};
}
NoiseSpec NoiseSpec::none() { return {NoiseFamily::none, 0.0, 0.0, 0.0, false, nullptr}; }

NoiseSpec NoiseSpec::custom(DensitySpec density, double w2) {
  const double mass = density_moment(density.g, 0);
  const double var = density_moment(density.g, 2);
  require(std::abs(mass - 1.0) < 1e-8, "custom density does not integrate to 1");
  require(std::abs(var - 1.0) < 1e-6, "custom density must have unit variance");
  NoiseSpec spec;
  spec.family = NoiseFamily::custom_density;
  spec.w2 = w2;
  spec.w3 = density_moment(density.g, 3);
  spec.w4 = density_moment(density.g, 4);
  spec.complex = false;
  spec.density = std::make_shared<const DensitySpec>(std::move(density));
  spec.validate();
  return spec;
}

void NoiseSpec::validate() const {
  switch (family) {
    case NoiseFamily::goe:
      require(!complex, "goe is a real ensemble");
      require(near(w2, 2.0) && near(w4, 3.0), "goe requires w2=2, w4=3");
      break;
    case NoiseFamily::gue:
      require(complex, "gue requires complex=true");
      require(near(w2, 1.0) && near(w4, 2.0), "gue requires w2=1, w4=2");
      break;
    case NoiseFamily::sech:
      require(!complex, "sech is a real ensemble");
      require(near(w2, 1.0) && near(w4, 5.0), "sech requires w2=1, w4=5");
      break;
    case NoiseFamily::rademacher_offdiag:
      require(!complex, "rademacher-offdiag is a real ensemble");
      require(near(w4, 1.0), "rademacher-offdiag has w4=1");
      break;
    case NoiseFamily::custom_density:
      require(!complex, "custom densities are real ensembles");
      require(density != nullptr, "custom_density requires a density");
      break;
    case NoiseFamily::none:
      require(!complex, "zero noise is real");
      return;
  }
  require(w2 >= 0.0, "w2 must be nonnegative");
  require(w4 >= 1.0 - 1e-12, "w4 >= 1 for a unit-variance off-diagonal law");
}

std::pair<double, double> theoretical_moments(const NoiseSpec& spec) {
  switch (spec.family) {
    case NoiseFamily::goe: return {2.0, 3.0};
    case NoiseFamily::gue: return {1.0, 2.0};
    case NoiseFamily::sech: return {1.0, 5.0};
    case NoiseFamily::rademacher_offdiag: return {spec.w2, 1.0};
    case NoiseFamily::custom_density:
      throw std::invalid_argument(
          "custom density: integrate its moments (density_moment) instead");
    case NoiseFamily::none: break;
  }
  throw std::invalid_argument("zero noise has no moment parameters");
}

DataMatrix DataMatrix::real(Eigen::MatrixXd entries) {
  require(entries.rows() == entries.cols(), "data matrix must be square");
  const Index n = entries.rows();
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i)
      require(entries(i, j) == entries(j, i), "data matrix must be symmetric");
  return DataMatrix(std::move(entries));
}

DataMatrix DataMatrix::hermitian(Eigen::MatrixXcd entries) {
  require(entries.rows() == entries.cols(), "data matrix must be square");
  const Index n = entries.rows();
  for (Index j = 0; j < n; ++j) {
    require(entries(j, j).imag() == 0.0, "Hermitian diagonal must be real");
    for (Index i = j + 1; i < n; ++i)
      require(entries(i, j) == std::conj(entries(j, i)), "data matrix must be Hermitian");
  }
  return DataMatrix(std::move(entries));
}

Index DataMatrix::n() const {
  return std::visit([](const auto& m) { return m.rows(); }, entries_);
}

const Eigen::MatrixXd& DataMatrix::real_entries() const {
  if (is_complex()) throw std::logic_error("complex matrix has no real entry view");
  return std::get<Eigen::MatrixXd>(entries_);
}

const Eigen::MatrixXcd& DataMatrix::complex_entries() const {
  if (!is_complex()) throw std::logic_error("real matrix has no complex entry view");
  return std::get<Eigen::MatrixXcd>(entries_);
}

bool operator==(const DataMatrix& a, const DataMatrix& b) {
  if (a.is_complex() != b.is_complex() || a.n() != b.n()) return false;
  return a.is_complex() ? a.complex_entries() == b.complex_entries()
                        : a.real_entries() == b.real_entries();
}

DataMatrix sample_noise(Index n, const NoiseSpec& spec, Seed seed) {
  require(n >= 2, "sample_noise requires n >= 2");
  spec.validate();
  const CounterRng rng(seed);
  const double off = 1.0 / std::sqrt(static_cast<double>(n));
  const double diag = std::sqrt(spec.w2 / static_cast<double>(n));
  const auto counter = [n](Index i, Index j) {
    return static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) +
           static_cast<std::uint64_t>(j);
  };

  if (spec.family == NoiseFamily::gue) {
    Eigen::MatrixXcd h(n, n);
    const double half = off / std::sqrt(2.0);
    for (Index j = 0; j < n; ++j) {
      const std::uint64_t k = counter(j, j);
      h(j, j) = {diag * rng.normal(2 * k), 0.0};
      for (Index i = 0; i < j; ++i) {
        const std::uint64_t c = counter(i, j);
        const std::complex<double> z{half * rng.normal(2 * c), half * rng.normal(2 * c + 1)};
        h(i, j) = z;
        h(j, i) = std::conj(z);
      }
    }
    return DataMatrix::hermitian(std::move(h));
  }

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  if (spec.family == NoiseFamily::none) return DataMatrix::real(std::move(h));

  const DensitySpec* density = nullptr;
  static const DensitySpec sech_density = DensitySpec::sech();
  if (spec.family == NoiseFamily::sech) density = &sech_density;
  if (spec.family == NoiseFamily::custom_density) density = spec.density.get();

  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const std::uint64_t c = counter(i, j);
      double v = 0.0;
      if (i == j) {
        if (density != nullptr) {
          v = diag * density->quantile_d(rng.uniform(c));
        } else {
          v = diag * rng.normal(c);
        }
      } else {
        switch (spec.family) {
          case NoiseFamily::goe: v = off * rng.normal(c); break;
          case NoiseFamily::rademacher_offdiag: v = off * rng.sign(c); break;
          default: v = off * density->quantile(rng.uniform(c)); break;
        }
      }
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return DataMatrix::real(std::move(h));
}

Eigen::VectorXd sample_spike(Index n, const SpikePrior& prior, Seed seed) {
  require(n >= 1, "sample_spike requires n >= 1");
  const CounterRng rng(seed);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::VectorXd x(n);

  switch (prior.kind) {
    case SpikeKind::all_ones:
      x.setConstant(inv_sqrt_n);
      return x;
    case SpikeKind::rademacher_iid:
      for (Index i = 0; i < n; ++i) x(i) = rng.sign(static_cast<std::uint64_t>(i)) * inv_sqrt_n;
      return x;
    case SpikeKind::biased: {
      require(prior.c >= -1.0 && prior.c <= 1.0, "biased spike requires c in [-1, 1]");
      const double p_plus = 0.5 * (1.0 + prior.c);
      for (Index i = 0; i < n; ++i) {
        x(i) = (rng.uniform(static_cast<std::uint64_t>(i)) < p_plus ? 1.0 : -1.0) * inv_sqrt_n;
      }
      return x;
    }
    case SpikeKind::unit_sphere: {
      for (Index i = 0; i < n; ++i) x(i) = rng.normal(static_cast<std::uint64_t>(i));
      const double norm = x.norm();
      require(norm > 0.0, "degenerate Gaussian draw");
      return x / norm;
    }
    case SpikeKind::sparse: {
      require(prior.k >= 1 && prior.k <= n, "sparse spike requires 1 <= k <= n");
      // Partial Fisher-Yates: the first k slots of a permutation of 0..n-1.
      std::vector<Index> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), Index{0});
      x.setZero();
      const double amp = 1.0 / std::sqrt(static_cast<double>(prior.k));
      for (Index s = 0; s < prior.k; ++s) {
        const auto r = rng.bits(2 * static_cast<std::uint64_t>(s)) %
                       static_cast<std::uint64_t>(n - s);
        std::swap(perm[static_cast<std::size_t>(s)], perm[static_cast<std::size_t>(s) + r]);
        x(perm[static_cast<std::size_t>(s)]) =
            amp * rng.sign(2 * static_cast<std::uint64_t>(s) + 1);
      }
      return x;
    }
    case SpikeKind::explicit_vector: {
      require(prior.vector.size() == n, "explicit spike has the wrong length");
      const double norm = prior.vector.norm();
      require(std::isfinite(norm) && norm > 0.0, "explicit spike has zero norm");
      require(std::abs(norm - 1.0) <= 1e-6,
              "explicit spike must have unit norm (within 1e-6)");
      return prior.vector / norm;
    }
  }
  throw std::invalid_argument("unknown spike prior");
}

DataMatrix assemble(const Eigen::VectorXd& x, double lambda, const DataMatrix& h) {
  require(x.size() == h.n(), "spike and noise dimensions differ");
  require(lambda >= 0.0, "lambda must be nonnegative");
  if (lambda == 0.0) return h;
  const double s = std::sqrt(lambda);
  const Index n = h.n();
  // Explicit loops keep the update exactly symmetric entry by entry.
  if (h.is_complex()) {
    Eigen::MatrixXcd m = h.complex_entries();
    for (Index j = 0; j < n; ++j) {
      m(j, j) += s * (x(j) * x(j));
      for (Index i = 0; i < j; ++i) {
        m(i, j) += s * (x(i) * x(j));
        m(j, i) = std::conj(m(i, j));
      }
    }
    return DataMatrix::hermitian(std::move(m));
  }
  Eigen::MatrixXd m = h.real_entries();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      m(i, j) += s * (x(i) * x(j));
      m(j, i) = m(i, j);
    }
  }
  return DataMatrix::real(std::move(m));
}

}  // namespace spikedet
