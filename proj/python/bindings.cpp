#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

#include "spikedet/adaptive.hpp"
#include "spikedet/entrywise.hpp"
#include "spikedet/harness.hpp"
#include "spikedet/lss_test.hpp"

namespace py = pybind11;
using namespace spikedet;

namespace {

DataMatrix to_matrix(const Eigen::MatrixXd& m) { return DataMatrix::real(m); }

double value_or_nan(const Evaluated& e) {
  return e.is_finite() ? e.value() : std::numeric_limits<double>::quiet_NaN();
}

py::dict moments_dict(const LimitingMoments& lm) {
  py::dict d;
  d["m0"] = lm.m0;
  d["m_plus"] = lm.m_plus;
  d["v0"] = lm.v0;
  return d;
}

py::dict point_dict(const ErrorCurvePoint& p) {
  py::dict d;
  d["omega"] = p.omega;
  d["type1"] = p.type1;
  d["type2"] = p.type2;
  d["err_empirical"] = p.err_empirical;
  d["err_theory"] = p.err_theory;
  d["stderr"] = p.std_error;
  d["trials"] = p.trials;
  d["reliably_detectable"] = p.reliably_detectable;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Weak detection of a rank-one spike in a Wigner matrix";

  m.def(
      "simulate",
      [](Index n, double lambda, const std::string& noise, const std::string& prior,
         std::uint64_t seed) {
        const Seed root{seed, 0};
        const DataMatrix h = sample_noise(n, parse_noise(noise), derive(root, 0));
        const DataMatrix x =
            lambda == 0.0 ? h : assemble(sample_spike(n, parse_prior(prior), derive(root, 1)), lambda, h);
        if (x.is_complex()) throw std::invalid_argument("complex ensembles are not exposed");
        return Eigen::MatrixXd(x.real_entries());
      },
      py::arg("n"), py::arg("lam") = 0.0, py::arg("noise") = "goe",
      py::arg("prior") = "rademacher", py::arg("seed") = 0);

  m.def(
      "detect",
      [](const Eigen::MatrixXd& mat, double omega, double w2, double w4) {
        const TestReport r = run_test(to_matrix(mat), {omega, w2, w4, false});
        py::dict d;
        d["statistic"] = value_or_nan(r.statistic);
        d["critical"] = r.critical;
        d["reject"] = r.decision == Decision::reject_h0;
        d["signal_certain"] = r.signal_certain;
        d["theoretical_error"] = r.theoretical_error;
        return d;
      },
      py::arg("matrix"), py::arg("omega"), py::arg("w2") = 2.0, py::arg("w4") = 3.0);

  m.def(
      "detect_transformed",
      [](const Eigen::MatrixXd& mat, double omega, const std::string& density, double w2) {
        const DensitySpec d = DensitySpec::by_name(density);
        const TransformedReport r =
            run_transformed_test(to_matrix(mat), d, omega, w2, fisher_functionals(d));
        py::dict out;
        out["statistic"] = value_or_nan(r.statistic);
        out["critical"] = r.critical;
        out["reject"] = r.decision == Decision::reject_h0;
        out["theoretical_error"] = r.theoretical_error;
        return out;
      },
      py::arg("matrix"), py::arg("omega"), py::arg("density"), py::arg("w2") = 1.0);

  m.def(
      "critical_value",
      [](double omega, double w2, double w4, bool complex) {
        return critical_value({omega, w2, w4, complex});
      },
      py::arg("omega"), py::arg("w2") = 2.0, py::arg("w4") = 3.0, py::arg("complex") = false);

  m.def(
      "theoretical_error",
      [](double omega, double w2, double w4, bool complex) {
        return theoretical_error({omega, w2, w4, complex});
      },
      py::arg("omega"), py::arg("w2") = 2.0, py::arg("w4") = 3.0, py::arg("complex") = false);

  m.def(
      "limiting_moments",
      [](double omega, double w2, double w4, bool complex) {
        return moments_dict(limiting_moments({omega, w2, w4, complex}));
      },
      py::arg("omega"), py::arg("w2") = 2.0, py::arg("w4") = 3.0, py::arg("complex") = false);

  m.def(
      "fisher_functionals",
      [](const std::string& density) {
        const FisherFunctionals fi = fisher_functionals(DensitySpec::by_name(density));
        py::dict d;
        d["F"] = fi.F;
        d["Fd"] = fi.Fd;
        d["G"] = fi.G;
        d["w4t"] = fi.w4t;
        return d;
      },
      py::arg("density"));

  m.def(
      "optimize_t",
      [](double w2, double w4) {
        const AdaptiveResult r = optimize_t(SnrPrior::uniform01(), w2, w4);
        return py::make_tuple(r.t_star, r.err_star);
      },
      py::arg("w2") = 2.0, py::arg("w4") = 3.0,
      "Optimal representative SNR and its average error for lambda ~ U(0, 1).");

  m.def(
      "error_curve",
      [](const std::string& config_text) {
        const ExperimentConfig cfg = parse_config(config_text);
        std::vector<ErrorCurvePoint> points;
        {
          py::gil_scoped_release release;
          points = run_detection_experiment(cfg);
        }
        py::list rows;
        for (const auto& p : points) rows.append(point_dict(p));
        return rows;
      },
      py::arg("config_text"));
}
