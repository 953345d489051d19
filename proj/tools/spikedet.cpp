// spikedet: command-line front end.
//
// Exit codes: detect returns 0 (accept H0) or 1 (reject H0); every command
// returns 2 on usage or data errors.

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spikedet/adaptive.hpp"
#include "spikedet/chebyshev.hpp"
#include "spikedet/entrywise.hpp"
#include "spikedet/harness.hpp"
#include "spikedet/io.hpp"
#include "spikedet/lss_test.hpp"

namespace {

using namespace spikedet;
using json = nlohmann::json;

constexpr int kAccept = 0;
constexpr int kReject = 1;
constexpr int kUsage = 2;

// Raised for bad input that CLI11 cannot see (file contents, flag combos).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw UsageError(std::string("bad number in ") + what + ": '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(what) + " is empty");
  return out;
}

double parse_scalar(const std::string& text, const char* what) {
  const auto v = parse_list(text, what);
  if (v.size() != 1) throw UsageError(std::string(what) + " takes one value");
  return v.front();
}

void emit_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open " + path + " for writing");
  out << text;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------- detect

struct DetectArgs {
  std::string matrix;
  double omega = 0.0;
  std::optional<double> w2, w4;
  bool estimate = false;
  bool complex = false;
  std::string density;
};

int run_detect(const DetectArgs& a) {
  DataMatrix m = [&] {
    try {
      return read_matrix(a.matrix);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }();
  if (a.complex && !m.is_complex()) throw UsageError("--complex given but the matrix file is real");
  const bool cplx = m.is_complex();

  double w2 = cplx ? 1.0 : 2.0;
  double w4 = cplx ? 2.0 : 3.0;
  if (a.estimate) {
    const MomentEstimate est = estimate_w2_w4(m);
    w2 = est.w2;
    w4 = est.w4;
  }
  if (a.w2) w2 = *a.w2;
  if (a.w4) w4 = *a.w4;

  json report;
  int code = kAccept;
  if (!a.density.empty()) {
    if (cplx) throw UsageError("--density needs a real matrix");
    const DensitySpec d = [&] {
      try {
        return DensitySpec::by_name(a.density);
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
    }();
    if (!(a.omega > 0.0 && a.omega < 1.0)) throw UsageError("--omega must lie in (0, 1)");
    if (!(w2 > 0.0)) throw UsageError("the transformed test needs w2 > 0");
    const FisherFunctionals fi = fisher_functionals(d);
    if (a.omega * fi.F >= 1.0) {
      throw UsageError("omega * F >= 1 for density '" + d.name +
                       "': the signal is reliably detectable by PCA on the transformed matrix; "
                       "the weak-detection test does not apply");
    }
    const TransformedReport r = run_transformed_test(m, d, a.omega, w2, fi);
    const bool certain = r.statistic.kind() == Evaluated::Kind::signal_certain;
    report = {{"statistic", r.statistic.is_finite() ? json(r.statistic.value()) : json(nullptr)},
              {"critical", r.critical},
              {"decision", std::string(to_string(r.decision))},
              {"signal_certain", certain},
              {"theoretical_error", r.theoretical_error}};
    code = r.decision == Decision::accept_h0 ? kAccept : kReject;
  } else {
    const TestParams p{a.omega, w2, w4, cplx};
    try {
      p.validate();
    } catch (const std::exception& e) {
      throw UsageError(std::string(e.what()) + "; see `spikedet exceptional`");
    }
    const TestReport r = run_test(m, p);
    report = {{"statistic", r.statistic.is_finite() ? json(r.statistic.value()) : json(nullptr)},
              {"critical", r.critical},
              {"decision", std::string(to_string(r.decision))},
              {"signal_certain", r.signal_certain},
              {"theoretical_error", r.theoretical_error}};
    code = r.decision == Decision::accept_h0 ? kAccept : kReject;
  }
  std::cout << report.dump() << '\n';
  return code;
}

// -------------------------------------------------------------- simulate

struct SimulateArgs {
  Index n = 0;
  double lambda = 0.0;
  std::string noise = "goe";
  std::string prior = "rademacher";
  std::uint64_t seed = 0;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  if (a.n < 2) throw UsageError("--n must be at least 2");
  if (!(a.lambda >= 0.0)) throw UsageError("--omega must be nonnegative");
  NoiseSpec noise;
  SpikePrior prior;
  try {
    noise = parse_noise(a.noise);
    prior = parse_prior(a.prior);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  const Seed seed{a.seed, 0};
  const DataMatrix h = sample_noise(a.n, noise, derive(seed, 0));
  const DataMatrix m =
      a.lambda > 0.0 ? assemble(sample_spike(a.n, prior, derive(seed, 1)), a.lambda, h) : h;
  emit_text(format_matrix(m), a.out);
  return 0;
}

// ------------------------------------------------- error-curve / compare

struct CurveArgs {
  std::string config;
  std::string emit;
  std::optional<int> trials;
  std::optional<Index> n;
};

ExperimentConfig load_config(const CurveArgs& a) {
  try {
    ExperimentConfig cfg = read_config(a.config);
    if (a.trials) cfg.trials = *a.trials;
    if (a.n) cfg.n = *a.n;
    if (!a.emit.empty()) cfg.emit = a.emit;
    cfg.validate();
    return cfg;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

int run_error_curve(const CurveArgs& a) {
  const ExperimentConfig cfg = load_config(a);
  emit_text(format_csv(run_detection_experiment(cfg), cfg), cfg.emit);
  return 0;
}

int run_transform_compare(const CurveArgs& a) {
  const ExperimentConfig cfg = load_config(a);
  emit_text(format_comparison_csv(run_transform_comparison(cfg)), cfg.emit);
  return 0;
}

// -------------------------------------------------------------- adaptive

struct AdaptiveArgs {
  std::string prior = "uniform01";
  double w2 = 2.0;
  double w4 = 3.0;
  bool sweep = false;
};

SnrPrior parse_snr_prior(const std::string& s) {
  if (s == "uniform01") return SnrPrior::uniform01();
  if (s.starts_with("point:")) return SnrPrior::point(parse_scalar(s.substr(6), "point prior"));
  if (s.starts_with("discrete:")) {
    // discrete:v1@p1,v2@p2,...
    std::vector<double> values, weights;
    std::stringstream ss(s.substr(9));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto at = item.find('@');
      if (at == std::string::npos) throw UsageError("discrete prior entries are value@weight");
      values.push_back(parse_scalar(item.substr(0, at), "prior value"));
      weights.push_back(parse_scalar(item.substr(at + 1), "prior weight"));
    }
    return SnrPrior::discrete(values, weights);
  }
  throw UsageError("unknown prior '" + s + "' (uniform01, point:l, discrete:v@p,...)");
}

int run_adaptive(const AdaptiveArgs& a) {
  if (a.w4 == 1.0) {
    throw UsageError(
        "w4 = 1 makes the LSS test degenerate; use `spikedet exceptional --case w4one`");
  }
  if (a.w2 == 0.0) {
    throw UsageError(
        "w2 = 0 makes the LSS test degenerate; use `spikedet exceptional --case w2zero`");
  }
  if (!(a.w2 > 0.0 && a.w4 > 1.0)) throw UsageError("need w2 > 0 and w4 > 1");
  SnrPrior prior;
  try {
    prior = parse_snr_prior(a.prior);
    prior.validate();
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  const AdaptiveResult r = optimize_t(prior, a.w2, a.w4);
  char line[160];
  std::snprintf(line, sizeof line, "t_star=%.6f err_star=%.6f non_unimodal=%s", r.t_star,
                r.err_star, r.non_unimodal ? "true" : "false");
  if (a.sweep) {
    std::cout << "t,avg_error\n";
    constexpr int kPoints = 100;
    for (int k = 1; k <= kPoints; ++k) {
      const double t = static_cast<double>(k) / (kPoints + 1);
      std::printf("%.9g,%.9g\n", t, average_error(t, prior, a.w2, a.w4));
    }
    std::cout << "# " << line << '\n';
  } else {
    std::cout << line << '\n';
  }
  return 0;
}

// ------------------------------------------------------------- clt-check

struct CltArgs {
  std::string f;
  double lambda = 0.0;
  double w2 = 2.0;
  double w4 = 3.0;
  bool complex = false;
  int ellmax = 0;
  int show = 12;
};

int run_clt_check(const CltArgs& a) {
  AnalyticFn f;
  std::optional<double> phi_omega_value;
  if (a.f.starts_with("poly:")) {
    f = polynomial(parse_list(a.f.substr(5), "--f poly"));
  } else if (a.f.starts_with("phi:")) {
    const double w = parse_scalar(a.f.substr(4), "--f phi");
    if (!(w > 0.0 && w < 1.0)) throw UsageError("phi:w needs 0 < w < 1");
    f = phi_omega(w, a.w2, a.w4, a.complex);
    phi_omega_value = w;
  } else {
    throw UsageError("--f must be poly:c0,c1,... or phi:w");
  }
  if (!(a.lambda >= 0.0 && a.lambda < 1.0)) throw UsageError("--lambda must lie in [0, 1)");
  if (a.show < 0) throw UsageError("--show must be nonnegative");

  const CltOptions opts{a.ellmax, kDefaultNodes};
  const ChebCoeffs c = chebyshev_coeffs(f, std::max(a.show, 4), kDefaultNodes);
  std::printf("%-4s %-22s%s\n", "ell", "tau", phi_omega_value ? " closed_form" : "");
  for (int l = 0; l <= a.show; ++l) {
    std::printf("%-4d %-22.15g", l, c[l]);
    if (phi_omega_value) {
      // Closed forms of tau_l(phi_w).
      const double w = *phi_omega_value;
      double closed = 0.0;
      if (l == 0) {
        closed = a.complex ? (1.0 / (a.w4 - 1.0) - 1.0) * w : (2.0 / (a.w4 - 1.0) - 1.0) * w;
      } else if (l == 1) {
        closed = (a.complex ? 1.0 : 2.0) * std::sqrt(w) / a.w2;
      } else if (l == 2) {
        closed = w / ((a.complex ? 2.0 : 1.0) * (a.w4 - 1.0));
      } else {
        closed = std::pow(w, 0.5 * l) / l;
      }
      std::printf(" %.15g", closed);
    }
    std::printf("\n");
  }
  std::printf("mean=%.15g\nvariance=%.15g\n", clt_mean(f, a.lambda, a.w2, a.w4, a.complex, opts),
              clt_var(f, a.w2, a.w4, a.complex, opts));
  return 0;
}

// ---------------------------------------------------------- exceptional

struct ExceptionalArgs {
  std::string matrix;
  std::string kind;
  double w2 = 1.0;
};

int run_exceptional(const ExceptionalArgs& a) {
  DataMatrix m = [&] {
    try {
      return read_matrix(a.matrix);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }();
  const Traces tr = traces(m);
  json out;
  if (a.kind == "w2zero") {
    out = {{"case", a.kind}, {"lambda_hat", exceptional_w2_zero(tr.tr1)}};
  } else if (a.kind == "w4one") {
    out = {{"case", a.kind}, {"lambda_hat", exceptional_w4_one(tr.tr2, m.n(), a.w2)}};
  } else if (a.kind == "biased") {
    out = {{"case", a.kind}, {"sum", biased_sum_statistic(m)}};
  } else {
    throw UsageError("--case must be w2zero, w4one or biased");
  }
  std::cout << out.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak detection of a rank-one spike in Wigner matrices"};
  app.require_subcommand(1);

  DetectArgs detect;
  auto* cmd = app.add_subcommand("detect", "Run the LSS test on a matrix file");
  cmd->add_option("--matrix", detect.matrix, "Matrix file")->required();
  cmd->add_option("--omega", detect.omega, "Hypothesized SNR in (0, 1)")->required();
  auto* w2_opt = cmd->add_option("--w2", detect.w2, "Diagonal variance N E[H_ii^2]");
  auto* w4_opt = cmd->add_option("--w4", detect.w4, "Fourth moment N^2 E[H_ij^4]");
  cmd->add_flag("--estimate", detect.estimate, "Estimate w2 and w4 from the data")
      ->excludes(w2_opt)
      ->excludes(w4_opt);
  cmd->add_flag("--complex", detect.complex, "Require a complex Hermitian matrix");
  cmd->add_option("--density", detect.density, "Noise density (gaussian, sech): transformed test");

  SimulateArgs sim;
  auto* scmd = app.add_subcommand("simulate", "Sample a spiked Wigner matrix");
  scmd->add_option("--n", sim.n, "Dimension")->required();
  scmd->add_option("--omega", sim.lambda, "SNR lambda of the planted spike (0 = pure noise)");
  scmd->add_option("--noise", sim.noise, "goe, gue, sech, rademacher[:w2], none");
  scmd->add_option("--prior", sim.prior, "rademacher, sphere, ones, sparse:k, biased:c");
  scmd->add_option("--seed", sim.seed, "Root seed");
  scmd->add_option("--out", sim.out, "Output path (default stdout)");

  CurveArgs curve;
  auto* ecmd = app.add_subcommand("error-curve", "Monte Carlo error curve from a config file");
  CurveArgs compare;
  auto* tcmd =
      app.add_subcommand("transform-compare", "Plain vs transformed test on shared samples");
  for (auto [c, args] : {std::pair{ecmd, &curve}, std::pair{tcmd, &compare}}) {
    c->add_option("--config", args->config, "Config file")->required();
    c->add_option("--emit", args->emit, "Output path, overrides the config");
    c->add_option("--trials", args->trials, "Override trials per hypothesis");
    c->add_option("--n", args->n, "Override the dimension");
  }

  AdaptiveArgs adapt;
  auto* acmd = app.add_subcommand("adaptive", "Representative SNR for an unknown-SNR prior");
  acmd->add_option("--prior", adapt.prior, "uniform01, point:l, discrete:v@p,...");
  acmd->add_option("--w2", adapt.w2, "Diagonal variance");
  acmd->add_option("--w4", adapt.w4, "Fourth moment");
  acmd->add_flag("--sweep", adapt.sweep, "Also print a 100-point (t, avg_error) CSV");

  CltArgs clt;
  auto* ccmd = app.add_subcommand("clt-check", "Chebyshev coefficients and CLT mean/variance");
  ccmd->add_option("--f", clt.f, "poly:c0,c1,... or phi:w")->required();
  ccmd->add_option("--lambda", clt.lambda, "SNR for the mean");
  ccmd->add_option("--w2", clt.w2, "Diagonal variance");
  ccmd->add_option("--w4", clt.w4, "Fourth moment");
  ccmd->add_flag("--complex", clt.complex, "Complex ensemble formulas");
  ccmd->add_option("--ellmax", clt.ellmax, "Series truncation (0 = automatic)");
  ccmd->add_option("--show", clt.show, "Highest ell to print");

  ExceptionalArgs exc;
  auto* xcmd = app.add_subcommand("exceptional", "Estimators for w2 = 0, w4 = 1, biased spikes");
  xcmd->add_option("--matrix", exc.matrix, "Matrix file")->required();
  xcmd->add_option("--case", exc.kind, "w2zero, w4one or biased")->required();
  xcmd->add_option("--w2", exc.w2, "Diagonal variance (w4one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*cmd) return run_detect(detect);
    if (*scmd) return run_simulate(sim);
    if (*ecmd) return run_error_curve(curve);
    if (*tcmd) return run_transform_compare(compare);
    if (*acmd) return run_adaptive(adapt);
    if (*ccmd) return run_clt_check(clt);
    if (*xcmd) return run_exceptional(exc);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
