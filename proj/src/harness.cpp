#include "spikedet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "spikedet/adaptive.hpp"
#include "spikedet/entrywise.hpp"
#include "spikedet/lss_test.hpp"

namespace spikedet {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(worker_threads(), count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Everything a trial needs beyond its seed.
struct Setup {
  double w2 = 0.0, w4 = 0.0;
  std::optional<DensitySpec> density;
  FisherFunctionals fisher;
};

Setup prepare(const ExperimentConfig& cfg, bool need_density) {
  Setup s;
  s.w2 = cfg.noise.w2;
  s.w4 = cfg.noise.w4;
  if (need_density) {
    if (cfg.density) {
      s.density = DensitySpec::by_name(*cfg.density);
    } else if (cfg.noise.family == NoiseFamily::sech) {
      s.density = DensitySpec::sech();
    } else if (cfg.noise.family == NoiseFamily::goe) {
      s.density = DensitySpec::gaussian();
    } else if (cfg.noise.family == NoiseFamily::custom_density) {
      s.density = *cfg.noise.density;
    } else {
      throw std::invalid_argument("transformed mode needs a density for this noise family");
    }
    s.fisher = fisher_functionals(*s.density);
  }
  return s;
}

// Matrix for trial t of hypothesis h (0 = null) in omega slot k.
DataMatrix sample_trial(const ExperimentConfig& cfg, std::uint64_t k, int h, int t,
                        double omega) {
  const Seed trial = derive(cfg.seed, k, static_cast<std::uint64_t>(h),
                            static_cast<std::uint64_t>(t));
  DataMatrix noise = sample_noise(cfg.n, cfg.noise, derive(trial, 0));
  if (h == 0) return noise;
  double lambda = omega;
  if (cfg.mode == ExperimentMode::adaptive) {
    lambda = CounterRng(derive(trial, 2)).uniform(0);
  }
  const Eigen::VectorXd x = sample_spike(cfg.n, cfg.prior, derive(trial, 1));
  return assemble(x, lambda, noise);
}

Decision plain_decision(const DataMatrix& m, const TestParams& p) {
  return decide(statistic_L(eigvals_sym(m), traces(m), p), critical_value(p));
}

void finish(ErrorCurvePoint& pt, int rejects0, int accepts1) {
  const double n = pt.trials;
  pt.type1 = rejects0 / n;
  pt.type2 = accepts1 / n;
  pt.err_empirical = pt.type1 + pt.type2;
  pt.std_error = std::sqrt(pt.type1 * (1.0 - pt.type1) / n + pt.type2 * (1.0 - pt.type2) / n);
}

ErrorCurvePoint degenerate_row(double omega, int trials) {
  // omega = 0: L = 0 = m_w, so every trial accepts H0.
  ErrorCurvePoint pt;
  pt.omega = omega;
  pt.trials = trials;
  pt.err_theory = 1.0;
  finish(pt, 0, trials);
  return pt;
}

ErrorCurvePoint reliably_detectable_row(double omega, int trials) {
  ErrorCurvePoint pt;
  pt.omega = omega;
  pt.trials = trials;
  pt.type1 = pt.type2 = pt.err_empirical = pt.err_theory = pt.std_error = kNaN;
  pt.reliably_detectable = true;
  return pt;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& s, std::string_view what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw std::invalid_argument("bad number for " + std::string(what) + ": '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s, std::string_view what) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || s[0] == '-') {
    throw std::invalid_argument("bad integer for " + std::string(what) + ": '" + s + "'");
  }
  return v;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::string_view to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::plain: return "plain";
    case ExperimentMode::transformed: return "transformed";
    case ExperimentMode::adaptive: return "adaptive";
  }
  return "plain";
}

unsigned worker_threads() {
  if (const char* env = std::getenv("SWD_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void ExperimentConfig::validate() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (trials < 100) throw std::invalid_argument("trials must be at least 100");
  if (omegas.empty()) throw std::invalid_argument("omegas must not be empty");
  for (const double w : omegas) {
    if (!(w >= 0.0 && w < 1.0)) throw std::invalid_argument("omegas must lie in [0, 1)");
  }
  noise.validate();
  if (noise.family == NoiseFamily::none) throw std::invalid_argument("experiments need noise");
  if (mode == ExperimentMode::transformed && noise.complex) {
    throw std::invalid_argument("transformed mode needs a real ensemble");
  }
  if (mode != ExperimentMode::transformed && !(noise.w2 > 0.0 && noise.w4 > 1.0)) {
    throw std::invalid_argument("the LSS test needs w2 > 0 and w4 > 1");
  }
  if (mode == ExperimentMode::adaptive && noise.complex) {
    throw std::invalid_argument("adaptive mode is defined for real ensembles");
  }
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto noise_eq = [](const NoiseSpec& x, const NoiseSpec& y) {
    return x.family == y.family && x.w2 == y.w2 && x.w3 == y.w3 && x.w4 == y.w4 &&
           x.complex == y.complex && x.density == y.density;
  };
  const auto prior_eq = [](const SpikePrior& x, const SpikePrior& y) {
    return x.kind == y.kind && x.k == y.k && x.c == y.c && x.vector == y.vector &&
           x.delocalization_exponent == y.delocalization_exponent;
  };
  return a.n == b.n && a.omegas == b.omegas && a.trials == b.trials && a.seed == b.seed &&
         noise_eq(a.noise, b.noise) && prior_eq(a.prior, b.prior) && a.mode == b.mode &&
         a.emit == b.emit && a.density == b.density;
}

std::vector<ErrorCurvePoint> run_detection_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool transformed = cfg.mode == ExperimentMode::transformed;
  const Setup setup = prepare(cfg, transformed);
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<ErrorCurvePoint> out;

  for (std::size_t k = 0; k < cfg.omegas.size(); ++k) {
    const double omega = cfg.omegas[k];
    if (omega == 0.0) {
      out.push_back(degenerate_row(omega, cfg.trials));
      continue;
    }
    if (transformed && omega * setup.fisher.F >= 1.0) {
      out.push_back(reliably_detectable_row(omega, cfg.trials));
      continue;
    }
    const TestParams params{omega, setup.w2, setup.w4, cfg.noise.complex};
    std::vector<unsigned char> rejected(2 * trials, 0);
    parallel_for(2 * trials, [&](std::size_t i) {
      const int h = static_cast<int>(i / trials);
      const int t = static_cast<int>(i % trials);
      const DataMatrix m = sample_trial(cfg, k, h, t, omega);
      const Decision d =
          transformed ? run_transformed_test(m, *setup.density, omega, setup.w2, setup.fisher).decision
                      : plain_decision(m, params);
      rejected[i] = d == Decision::reject_h0;
    });
    int rejects0 = 0, accepts1 = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      rejects0 += rejected[t];
      accepts1 += !rejected[trials + t];
    }
    ErrorCurvePoint pt;
    pt.omega = omega;
    pt.trials = cfg.trials;
    switch (cfg.mode) {
      case ExperimentMode::plain: pt.err_theory = theoretical_error(params); break;
      case ExperimentMode::transformed:
        pt.err_theory = theoretical_error_tilde(omega, setup.w2, setup.fisher);
        break;
      case ExperimentMode::adaptive:
        pt.err_theory = average_error(omega, SnrPrior::uniform01(), setup.w2, setup.w4);
        break;
    }
    finish(pt, rejects0, accepts1);
    out.push_back(pt);
  }
  return out;
}

std::vector<ComparisonPoint> run_transform_comparison(const ExperimentConfig& cfg) {
  ExperimentConfig plain_cfg = cfg;
  plain_cfg.mode = ExperimentMode::plain;
  plain_cfg.validate();
  const Setup setup = prepare(cfg, true);
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<ComparisonPoint> out;

  for (std::size_t k = 0; k < cfg.omegas.size(); ++k) {
    const double omega = cfg.omegas[k];
    ComparisonPoint row;
    if (omega == 0.0) {
      row.plain = row.transformed = degenerate_row(omega, cfg.trials);
      out.push_back(row);
      continue;
    }
    const TestParams params{omega, setup.w2, setup.w4, false};
    const bool pca_regime = omega * setup.fisher.F >= 1.0;
    // Two flags per trial: bit 0 plain rejects, bit 1 transformed rejects.
    std::vector<unsigned char> rejected(2 * trials, 0);
    parallel_for(2 * trials, [&](std::size_t i) {
      const int h = static_cast<int>(i / trials);
      const int t = static_cast<int>(i % trials);
      const DataMatrix m = sample_trial(plain_cfg, k, h, t, omega);
      unsigned char flags = plain_decision(m, params) == Decision::reject_h0;
      if (!pca_regime &&
          run_transformed_test(m, *setup.density, omega, setup.w2, setup.fisher).decision ==
              Decision::reject_h0) {
        flags |= 2;
      }
      rejected[i] = flags;
    });
    int r0[2] = {0, 0}, a1[2] = {0, 0};
    for (std::size_t t = 0; t < trials; ++t) {
      for (int b = 0; b < 2; ++b) {
        r0[b] += (rejected[t] >> b) & 1;
        a1[b] += !((rejected[trials + t] >> b) & 1);
      }
    }
    row.plain.omega = omega;
    row.plain.trials = cfg.trials;
    row.plain.err_theory = theoretical_error(params);
    finish(row.plain, r0[0], a1[0]);
    if (pca_regime) {
      row.transformed = reliably_detectable_row(omega, cfg.trials);
    } else {
      row.transformed.omega = omega;
      row.transformed.trials = cfg.trials;
      row.transformed.err_theory = theoretical_error_tilde(omega, setup.w2, setup.fisher);
      finish(row.transformed, r0[1], a1[1]);
    }
    out.push_back(row);
  }
  return out;
}

StatisticSamples histogram_L(const ExperimentConfig& cfg, double omega) {
  cfg.validate();
  if (!(omega > 0.0 && omega < 1.0)) throw std::invalid_argument("omega must lie in (0, 1)");
  const bool transformed = cfg.mode == ExperimentMode::transformed;
  const Setup setup = prepare(cfg, transformed);
  const TestParams params{omega, setup.w2, setup.w4, cfg.noise.complex};
  const auto trials = static_cast<std::size_t>(cfg.trials);
  const std::uint64_t slot = std::bit_cast<std::uint64_t>(omega);

  if (transformed && omega * setup.fisher.F >= 1.0) {
    throw std::domain_error("omega * F >= 1: the transformed statistic is not defined");
  }
  std::vector<double> values(2 * trials, 0.0);
  std::vector<unsigned char> certain(2 * trials, 0);
  parallel_for(2 * trials, [&](std::size_t i) {
    const int h = static_cast<int>(i / trials);
    const int t = static_cast<int>(i % trials);
    DataMatrix m = sample_trial(cfg, slot, h, t, omega);
    if (transformed) m = transform(m, *setup.density, setup.w2, setup.fisher);
    const SpectrumResult spec = eigvals_sym(m);
    const Traces tr = traces(m);
    const double s = transformed ? omega * setup.fisher.F : omega;
    certain[i] = !log_det_shift(spec, s).is_finite();
    values[i] = transformed ? statistic_Ltilde_real_part(spec, tr, omega, setup.w2, setup.fisher)
                            : statistic_L_real_part(spec, tr, params);
  });

  const auto moments = [](const std::vector<double>& v, double& mean, double& var) {
    mean = var = kNaN;
    if (v.empty()) return;
    double m = 0.0;
    for (const double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (const double x : v) ss += (x - m) * (x - m);
    mean = m;
    var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
  };
  StatisticSamples s;
  std::vector<double> bulk0, bulk1;
  for (std::size_t i = 0; i < 2 * trials; ++i) {
    const bool alt = i >= trials;
    (alt ? s.h1 : s.h0).push_back(values[i]);
    if (certain[i]) {
      ++(alt ? s.signal_certain1 : s.signal_certain0);
    } else {
      (alt ? bulk1 : bulk0).push_back(values[i]);
    }
  }
  moments(s.h0, s.mean0, s.var0);
  moments(s.h1, s.mean1, s.var1);
  moments(bulk0, s.bulk_mean0, s.bulk_var0);
  moments(bulk1, s.bulk_mean1, s.bulk_var1);
  return s;
}

std::string format_csv(const std::vector<ErrorCurvePoint>& points, const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "omega,type1,type2,err_empirical,err_theory,stderr,trials,n,seed,mode\n";
  for (const auto& p : points) {
    os << fmt("%.9g", p.omega) << ',' << fmt("%.9g", p.type1) << ',' << fmt("%.9g", p.type2)
       << ',' << fmt("%.9g", p.err_empirical) << ',' << fmt("%.9g", p.err_theory) << ','
       << fmt("%.9g", p.std_error) << ',' << p.trials << ',' << cfg.n << ',' << cfg.seed.root
       << ',' << (p.reliably_detectable ? std::string_view("reliably_detectable") : to_string(cfg.mode))
       << '\n';
  }
  return os.str();
}

void write_csv(const std::vector<ErrorCurvePoint>& points, const ExperimentConfig& cfg,
               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << format_csv(points, cfg);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string format_comparison_csv(const std::vector<ComparisonPoint>& points) {
  std::ostringstream os;
  os << "omega,plain_empirical,plain_theory,plain_stderr,transformed_empirical,"
        "transformed_theory,transformed_stderr,tag\n";
  for (const auto& p : points) {
    os << fmt("%.9g", p.plain.omega) << ',' << fmt("%.9g", p.plain.err_empirical) << ','
       << fmt("%.9g", p.plain.err_theory) << ',' << fmt("%.9g", p.plain.std_error) << ','
       << fmt("%.9g", p.transformed.err_empirical) << ','
       << fmt("%.9g", p.transformed.err_theory) << ',' << fmt("%.9g", p.transformed.std_error)
       << ',' << (p.transformed.reliably_detectable ? "ReliablyDetectable" : "weak") << '\n';
  }
  return os.str();
}

NoiseSpec parse_noise(std::string_view name) {
  const std::string s = trim(name);
  if (s == "goe") return NoiseSpec::goe();
  if (s == "gue") return NoiseSpec::gue();
  if (s == "sech") return NoiseSpec::sech();
  if (s == "none") return NoiseSpec::none();
  if (s == "rademacher") return NoiseSpec::rademacher();
  if (s.starts_with("rademacher:")) {
    return NoiseSpec::rademacher(parse_double(s.substr(11), "rademacher w2"));
  }
  throw std::invalid_argument("unknown noise '" + s +
                              "' (goe, gue, sech, rademacher[:w2], none)");
}

std::string format_noise(const NoiseSpec& spec) {
  switch (spec.family) {
    case NoiseFamily::goe: return "goe";
    case NoiseFamily::gue: return "gue";
    case NoiseFamily::sech: return "sech";
    case NoiseFamily::none: return "none";
    case NoiseFamily::rademacher_offdiag: return "rademacher:" + fmt("%.17g", spec.w2);
    case NoiseFamily::custom_density: break;
  }
  throw std::invalid_argument("custom-density noise has no config spelling");
}

SpikePrior parse_prior(std::string_view name) {
  const std::string s = trim(name);
  if (s == "rademacher") return SpikePrior::rademacher();
  if (s == "sphere") return SpikePrior::sphere();
  if (s == "ones") return SpikePrior::ones();
  if (s.starts_with("sparse:")) {
    return SpikePrior::sparse(static_cast<Index>(parse_u64(s.substr(7), "sparse k")));
  }
  if (s.starts_with("biased:")) return SpikePrior::biased(parse_double(s.substr(7), "bias c"));
  throw std::invalid_argument("unknown prior '" + s +
                              "' (rademacher, sphere, ones, sparse:k, biased:c)");
}

std::string format_prior(const SpikePrior& prior) {
  switch (prior.kind) {
    case SpikeKind::rademacher_iid: return "rademacher";
    case SpikeKind::unit_sphere: return "sphere";
    case SpikeKind::all_ones: return "ones";
    case SpikeKind::sparse: return "sparse:" + std::to_string(prior.k);
    case SpikeKind::biased: return "biased:" + fmt("%.17g", prior.c);
    case SpikeKind::explicit_vector: break;
  }
  throw std::invalid_argument("explicit spikes have no config spelling");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key == "n") {
      cfg.n = static_cast<Index>(parse_u64(value, key));
    } else if (key == "omegas") {
      cfg.omegas.clear();
      std::istringstream list(value);
      std::string item;
      while (std::getline(list, item, ',')) cfg.omegas.push_back(parse_double(trim(item), key));
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(parse_u64(value, key));
    } else if (key == "seed") {
      cfg.seed.root = parse_u64(value, key);
    } else if (key == "stream") {
      cfg.seed.stream = parse_u64(value, key);
    } else if (key == "noise") {
      cfg.noise = parse_noise(value);
    } else if (key == "prior") {
      cfg.prior = parse_prior(value);
    } else if (key == "mode") {
      if (value == "plain") {
        cfg.mode = ExperimentMode::plain;
      } else if (value == "transformed") {
        cfg.mode = ExperimentMode::transformed;
      } else if (value == "adaptive") {
        cfg.mode = ExperimentMode::adaptive;
      } else {
        throw std::invalid_argument("unknown mode '" + value + "'");
      }
    } else if (key == "emit") {
      cfg.emit = value;
    } else if (key == "density") {
      cfg.density = value;
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "n=" << cfg.n << "\nomegas=";
  for (std::size_t i = 0; i < cfg.omegas.size(); ++i) {
    os << (i ? "," : "") << fmt("%.17g", cfg.omegas[i]);
  }
  os << "\ntrials=" << cfg.trials << "\nseed=" << cfg.seed.root << "\nstream=" << cfg.seed.stream
     << "\nnoise=" << format_noise(cfg.noise) << "\nprior=" << format_prior(cfg.prior)
     << "\nmode=" << to_string(cfg.mode) << '\n';
  if (!cfg.emit.empty()) os << "emit=" << cfg.emit << '\n';
  if (cfg.density) os << "density=" << *cfg.density << '\n';
  return os.str();
}

}  // namespace spikedet
