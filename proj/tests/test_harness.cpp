#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spikedet/harness.hpp"
#include "spikedet/lss_test.hpp"

using namespace spikedet;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n = 48;
  cfg.trials = 150;
  cfg.omegas = {0.0, 0.3, 0.6};
  cfg.seed = {77, 0};
  return cfg;
}

struct ThreadsGuard {
  explicit ThreadsGuard(const char* v) { setenv("SWD_THREADS", v, 1); }
  ~ThreadsGuard() { unsetenv("SWD_THREADS"); }
};

}  // namespace

TEST_CASE("error curves are reproducible byte for byte and thread-count independent") {
  const auto cfg = small_config();
  std::string one, three;
  {
    ThreadsGuard g("1");
    one = format_csv(run_detection_experiment(cfg), cfg);
  }
  {
    ThreadsGuard g("3");
    three = format_csv(run_detection_experiment(cfg), cfg);
  }
  CHECK(one == three);
  CHECK(one == format_csv(run_detection_experiment(cfg), cfg));
  auto other = cfg;
  other.seed.root = 78;
  CHECK(one != format_csv(run_detection_experiment(other), other));
}

TEST_CASE("error curve rows are internally consistent") {
  const auto cfg = small_config();
  const auto pts = run_detection_experiment(cfg);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].type1 == 0.0);
  CHECK(pts[0].type2 == 1.0);
  CHECK(pts[0].err_theory == 1.0);
  for (const auto& p : pts) {
    CHECK(p.err_empirical == p.type1 + p.type2);
    CHECK(p.type1 >= 0.0);
    CHECK(p.type2 <= 1.0);
    CHECK(p.std_error == doctest::Approx(std::sqrt(p.type1 * (1 - p.type1) / p.trials +
                                                   p.type2 * (1 - p.type2) / p.trials)));
    CHECK(p.trials == 150);
  }
  CHECK(pts[2].err_theory == doctest::Approx(theoretical_error({0.6, 2.0, 3.0, false})));
}

TEST_CASE("near-zero omega behaves like random guessing") {
  auto cfg = small_config();
  cfg.omegas = {0.01};
  cfg.trials = 400;
  const auto p = run_detection_experiment(cfg).front();
  CHECK(std::abs(p.err_empirical - 1.0) <= 3.0 * p.std_error + 0.02);
}

TEST_CASE("CSV schema") {
  auto cfg = small_config();
  CHECK(format_csv({}, cfg) == "omega,type1,type2,err_empirical,err_theory,stderr,trials,n,seed,mode\n");
  ErrorCurvePoint p;
  p.omega = 0.5;
  p.type1 = 0.25;
  p.type2 = 0.5;
  p.err_empirical = 0.75;
  p.err_theory = 0.768488555055044;
  p.std_error = 0.0125;
  p.trials = 100;
  const std::string csv = format_csv({p}, cfg);
  CHECK(csv.substr(csv.find('\n') + 1) == "0.5,0.25,0.5,0.75,0.768488555,0.0125,100,48,77,plain\n");

  const auto path = std::filesystem::temp_directory_path() / "spikedet_curve.csv";
  write_csv({p}, cfg, path);
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == csv);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_csv({p}, cfg, "/nonexistent-dir/x.csv"), std::runtime_error);
}

TEST_CASE("config round trip and validation") {
  auto cfg = small_config();
  cfg.noise = NoiseSpec::sech();
  cfg.prior = SpikePrior::sparse(7);
  cfg.mode = ExperimentMode::transformed;
  cfg.density = "sech";
  cfg.emit = "out.csv";
  CHECK(parse_config(format_config(cfg)) == cfg);

  auto b = small_config();
  b.noise = NoiseSpec::gue();
  b.prior = SpikePrior::biased(0.25);
  b.omegas = {0.1, 1.0 / 3.0};
  CHECK(parse_config(format_config(b)) == b);
  b.noise = NoiseSpec::rademacher(0.5);
  CHECK_THROWS_AS(parse_config(format_config(b)), std::invalid_argument);

  CHECK(parse_config("# comment\nn = 64\nomegas=0.1, 0.2\ntrials=100\n").n == 64);
  CHECK_THROWS_AS(parse_config("omegas=0.1\ntrials=99\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("omegas=1.0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("omegas=\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("omegas=0.1\nbogus=1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("omegas=0.1\nnoise=laplace\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("omegas=0.1\nmode=fancy\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("omegas=0.1\njust a line\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("omegas=0.1\nnoise=gue\nmode=transformed\n"), std::invalid_argument);
  CHECK_THROWS_AS(read_config("/nonexistent/cfg"), std::runtime_error);
}

TEST_CASE("bundled configs parse") {
  const auto goe = read_config(SPIKEDET_SOURCE_DIR "/configs/goe.cfg");
  CHECK(goe.omegas.size() == 8);
  CHECK(goe.mode == ExperimentMode::plain);
  const auto sech = read_config(SPIKEDET_SOURCE_DIR "/configs/sech.cfg");
  CHECK(sech.mode == ExperimentMode::transformed);
  CHECK(sech.noise.family == NoiseFamily::sech);
}

TEST_CASE("transformed rows with omega F >= 1 are tagged, not simulated") {
  auto cfg = small_config();
  cfg.noise = NoiseSpec::sech();
  cfg.mode = ExperimentMode::transformed;
  cfg.omegas = {0.5, 0.9};
  const auto pts = run_detection_experiment(cfg);
  CHECK_FALSE(pts[0].reliably_detectable);
  CHECK(pts[1].reliably_detectable);
  CHECK(std::isnan(pts[1].err_empirical));
  const std::string csv = format_csv(pts, cfg);
  CHECK(csv.find("reliably_detectable") != std::string::npos);

  const auto cmp = run_transform_comparison(cfg);
  CHECK(format_comparison_csv(cmp).find("ReliablyDetectable") != std::string::npos);
  CHECK(std::isfinite(cmp[1].plain.err_empirical));
}

TEST_CASE("Gaussian transform comparison: both columns coincide") {
  auto cfg = small_config();
  cfg.mode = ExperimentMode::transformed;
  cfg.density = "gaussian";
  cfg.omegas = {0.4};
  const auto row = run_transform_comparison(cfg).front();
  CHECK(std::abs(row.plain.err_empirical - row.transformed.err_empirical) <= row.plain.std_error);
}

TEST_CASE("adaptive mode uses the uniform-prior average error") {
  auto cfg = small_config();
  cfg.mode = ExperimentMode::adaptive;
  cfg.omegas = {0.67};
  const auto p = run_detection_experiment(cfg).front();
  CHECK(p.err_theory == doctest::Approx(0.7716).epsilon(0.002));
}

TEST_CASE("histogram samples separate more at larger omega") {
  auto cfg = small_config();
  cfg.n = 64;
  cfg.trials = 300;
  const auto a = histogram_L(cfg, 0.4);
  const auto b = histogram_L(cfg, 0.5);
  CHECK(a.h0.size() == 300);
  CHECK(a.h1.size() == 300);
  CHECK(b.mean1 - b.mean0 > a.mean1 - a.mean0);
  if (a.signal_certain0 == 0) {
    CHECK(a.bulk_mean0 == doctest::Approx(a.mean0));
  }
  CHECK_THROWS_AS(histogram_L(cfg, 1.0), std::invalid_argument);
}

TEST_CASE("name parsers") {
  CHECK(parse_noise("goe").family == NoiseFamily::goe);
  CHECK(parse_noise("rademacher:0.25").w2 == 0.25);
  CHECK(format_noise(parse_noise("rademacher:0.25")) == "rademacher:0.25");
  CHECK(parse_prior("sparse:12").k == 12);
  CHECK(parse_prior("biased:0.9").c == 0.9);
  CHECK(format_prior(SpikePrior::sphere()) == "sphere");
  CHECK_THROWS_AS(parse_prior("sparse:-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_noise("rademacher:x"), std::invalid_argument);
  CHECK_THROWS_AS(format_prior(SpikePrior::from_vector(Eigen::VectorXd::Ones(2))), std::invalid_argument);
}

TEST_CASE("worker thread count") {
  {
    ThreadsGuard g("5");
    CHECK(worker_threads() == 5);
  }
  {
    ThreadsGuard g("0");
    CHECK(worker_threads() >= 1);
  }
}
