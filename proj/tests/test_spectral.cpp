#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "spikedet/spectral.hpp"

using namespace spikedet;

TEST_CASE("eigenvalues of a diagonal matrix come back sorted descending") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a.diagonal() << 0.5, -1.0, 3.0, 2.0;
  const auto spec = eigvals_sym(DataMatrix::real(a));
  REQUIRE(spec.n() == 4);
  CHECK(spec.eigvals[0] == 3.0);
  CHECK(spec.eigvals[1] == 2.0);
  CHECK(spec.eigvals[2] == 0.5);
  CHECK(spec.eigvals[3] == -1.0);
}

TEST_CASE("2x2 closed form, real and Hermitian") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 2.0, 2.0, -2.0;  // eigenvalues 2 and -3
  const auto s = eigvals_sym(DataMatrix::real(a));
  CHECK(s.eigvals[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s.eigvals[1] == doctest::Approx(-3.0).epsilon(1e-14));

  Eigen::MatrixXcd z(2, 2);
  z << 0.0, std::complex<double>(0.0, -1.0), std::complex<double>(0.0, 1.0), 0.0;  // Pauli-y
  const auto sz = eigvals_sym(DataMatrix::hermitian(z));
  CHECK(sz.eigvals[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sz.eigvals[1] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("eigenvalue sums match traces on a GOE sample") {
  const auto m = sample_noise(128, NoiseSpec::goe(), Seed{21, 0});
  const auto s = eigvals_sym(m);
  const auto tr = traces(m);
  double sum = 0.0, sq = 0.0;
  for (double mu : s.eigvals) {
    sum += mu;
    sq += mu * mu;
  }
  CHECK(sum == doctest::Approx(tr.tr1).epsilon(1e-10));
  CHECK(sq == doctest::Approx(tr.tr2).epsilon(1e-10));
  CHECK(tr.tr1 == doctest::Approx(m.real_entries().trace()));
}

TEST_CASE("log_det_shift agrees with an LU determinant") {
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto m = sample_noise(64, NoiseSpec::goe(), Seed{22, k});
    const double w = 0.05 + 0.09 * static_cast<double>(k);
    const auto ld = log_det_shift(eigvals_sym(m), w);
    const Eigen::MatrixXd shifted =
        (1.0 + w) * Eigen::MatrixXd::Identity(64, 64) - std::sqrt(w) * m.real_entries();
    const auto [ref, sign] = oracle::lu_log_det(shifted);
    if (ld.is_finite()) {
      CHECK(sign == 1);
      CHECK(ld.value() == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("log_det_shift flags the singularity as signal_certain") {
  const double w = 0.25;
  const double edge = std::sqrt(w) + 1.0 / std::sqrt(w);  // 2.5
  SpectrumResult at{{edge, 0.0, -1.0}};
  CHECK(log_det_shift(at, w).kind() == Evaluated::Kind::signal_certain);
  SpectrumResult above{{3.0, 0.0}};
  CHECK(log_det_shift(above, w).kind() == Evaluated::Kind::signal_certain);
  SpectrumResult below{{2.49, 0.0}};
  CHECK(log_det_shift(below, w).is_finite());
  CHECK_THROWS_AS(log_det_shift(below, 0.0), std::domain_error);
  CHECK_THROWS_AS(log_det_shift(below, 1.0), std::domain_error);
}

TEST_CASE("log_abs_det_shift continues past the singularity") {
  const double w = 0.25;
  SpectrumResult s{{3.0, 1.0}};
  // factors: 1.25 - 1.5 = -0.25 and 1.25 - 0.5 = 0.75
  CHECK(log_abs_det_shift(s, w) == doctest::Approx(std::log(0.25) + std::log(0.75)));
  SpectrumResult t{{1.0, -1.0}};
  CHECK(log_abs_det_shift(t, w) == doctest::Approx(log_det_shift(t, w).value()));
}

TEST_CASE("non-finite entries are rejected") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  a(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eigvals_sym(DataMatrix::real(a)), std::invalid_argument);
}

TEST_CASE("Hermitian traces use |M_ij|^2") {
  const auto m = sample_noise(50, NoiseSpec::gue(), Seed{23, 0});
  const auto s = eigvals_sym(m);
  double sq = 0.0;
  for (double mu : s.eigvals) sq += mu * mu;
  CHECK(sq == doctest::Approx(traces(m).tr2).epsilon(1e-10));
}

TEST_CASE("Evaluated only exposes finite values") {
  CHECK(Evaluated::of(1.5).value() == 1.5);
  CHECK_THROWS_AS(Evaluated::signal_certain().value(), std::logic_error);
  CHECK(to_string(Evaluated::Kind::signal_certain) == "signal_certain");
}
