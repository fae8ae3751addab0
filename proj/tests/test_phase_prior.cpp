#include "doctest.h"

#include "aniso/frame.hpp"
#include "aniso/phase_prior.hpp"
#include "aniso/synthetic.hpp"
#include "phase_oracle.hpp"
#include "test_support.hpp"

using namespace aniso;
using aniso::testing::error_code;

namespace {

Vec random_phases(Index m, Rng& rng) {
  std::uniform_real_distribution<double> unif(-kPi, kPi);
  Vec v(m);
  for (Index k = 0; k < m; ++k) v[k] = unif(rng);
  return v;
}

CircularStats stats_from_magnitudes(const Mat& mag) {
  const Index m = mag.rows();
  CircularStats s;
  s.psi_bar = Vec::Zero(m);
  s.anchor_mag = Vec::Zero(m);
  s.alpha_w = Vec::Constant(m, 1.0 / static_cast<double>(m));
  s.m_matrix = mag.cast<std::complex<double>>();
  return s;
}

PhasePotential random_potential(Index m, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PhasePotential p;
  p.alpha = Vec(m);
  for (Index k = 0; k < m; ++k) p.alpha[k] = unif(rng);
  p.psi_bar = random_phases(m, rng);
  p.graph.m = m;
  for (Index k = 0; k < m; ++k)
    for (Index l = k + 1; l < m; ++l)
      if (unif(rng) < 0.5) p.graph.edges.push_back({k, l, unif(rng), kPi * (2.0 * unif(rng) - 1.0)});
  return p;
}

}  // namespace

TEST_CASE("circular statistics") {
  Rng rng = make_rng(11);
  SUBCASE("locked phases") {
    Mat theta(500, 3);
    for (Index i = 0; i < 500; ++i) {
      const Vec v = random_phases(1, rng);
      theta.row(i) << v[0], v[0], wrap(v[0] + 1.0);
    }
    const CircularStats s = circular_stats(theta, Mat::Ones(500, 3));
    CHECK(std::abs(s.m_matrix(0, 1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(std::arg(s.m_matrix(0, 1))) < 1e-12);
    CHECK(std::arg(s.m_matrix(2, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("independent uniform phases decorrelate") {
    Mat theta(10000, 5);
    for (Index i = 0; i < 10000; ++i) theta.row(i) = random_phases(5, rng).transpose();
    const CircularStats s = circular_stats(theta, Mat::Ones(10000, 5));
    for (Index k = 0; k < 5; ++k) {
      CHECK(s.m_matrix(k, k) == std::complex<double>(1.0, 0.0));
      for (Index l = 0; l < 5; ++l) {
        if (k != l) CHECK(std::abs(s.m_matrix(k, l)) < 0.05);
        CHECK(std::abs(s.m_matrix(l, k) - std::conj(s.m_matrix(k, l))) < 1e-15);
      }
    }
    CHECK(s.alpha_w.sum() >= 1.0 - 1e-6);
    CHECK(s.alpha_w.sum() <= 1.0);
  }
  SUBCASE("equal block energies give equal weights") {
    Mat theta(100, 4);
    for (Index i = 0; i < 100; ++i) theta.row(i) = random_phases(4, rng).transpose();
    const CircularStats s = circular_stats(theta, Mat::Constant(100, 4, 0.3));
    for (Index k = 0; k < 4; ++k) CHECK(s.alpha_w[k] == doctest::Approx(0.25).epsilon(1e-9));
  }
  SUBCASE("needs two samples") {
    CHECK(error_code([] { circular_stats(Mat::Zero(1, 3), Mat::Ones(1, 3)); }) == Errc::InsufficientSamples);
  }
}

TEST_CASE("dependency graph") {
  auto edge_set = [](const DependencyGraph& g) {
    std::vector<std::pair<Index, Index>> out;
    for (const Edge& e : g.edges) {
      CHECK(e.k < e.l);
      out.emplace_back(e.k, e.l);
    }
    return out;
  };
  SUBCASE("m = 3, p = 2 is complete") {
    Mat mag(3, 3);
    mag << 1, 0.2, 0.3, 0.2, 1, 0.4, 0.3, 0.4, 1;
    const auto edges = edge_set(build_graph(stats_from_magnitudes(mag), 2));
    CHECK(edges == std::vector<std::pair<Index, Index>>{{0, 1}, {0, 2}, {1, 2}});
  }
  SUBCASE("planted chain with p = 1") {
    const Index m = 7;
    Rng rng = make_rng(12);
    std::uniform_real_distribution<double> weak(0.0, 0.1);
    Mat mag = Mat::Identity(m, m);
    for (Index k = 0; k < m; ++k)
      for (Index l = k + 1; l < m; ++l) mag(k, l) = mag(l, k) = l == k + 1 ? 0.9 : weak(rng);
    const auto edges = edge_set(build_graph(stats_from_magnitudes(mag), 1));
    std::vector<std::pair<Index, Index>> chain;
    for (Index k = 0; k + 1 < m; ++k) chain.emplace_back(k, k + 1);
    CHECK(edges == chain);
  }
  SUBCASE("p = m - 1 is complete, out-of-range p rejected") {
    const Index m = 5;
    const CircularStats s = stats_from_magnitudes(Mat::Identity(m, m));
    CHECK(build_graph(s, m - 1).edges.size() == static_cast<std::size_t>(m * (m - 1) / 2));
    CHECK(error_code([&] { build_graph(s, 0); }) == Errc::InvalidInput);
    CHECK(error_code([&] { build_graph(s, m); }) == Errc::InvalidInput);
  }
  SUBCASE("ties go to the smaller index") {
    const CircularStats s = stats_from_magnitudes(Mat::Identity(4, 4));
    const auto edges = edge_set(build_graph(s, 1));
    CHECK(edges == std::vector<std::pair<Index, Index>>{{0, 1}, {0, 2}, {0, 3}});
  }
}

TEST_CASE("drift is the gradient of the periodic potential") {
  Rng rng = make_rng(13);
  SUBCASE("finite differences at 50 points") {
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const PhasePotential p = random_potential(6, rng);
      const Vec phi = random_phases(6, rng);
      const Vec g = p.drift(phi);
      const double h = 1e-6;
      Vec fd(6);
      for (Index k = 0; k < 6; ++k) {
        Vec up = phi, down = phi;
        up[k] += h;
        down[k] -= h;
        fd[k] = (p.value(up) - p.value(down)) / (2 * h);
      }
      worst = std::max(worst, (fd - g).norm() / std::max(g.norm(), 1e-8));
    }
    CHECK(worst < 1e-5);
  }
  SUBCASE("hessian matches differences of the drift") {
    const PhasePotential p = random_potential(5, rng);
    const Vec phi = random_phases(5, rng);
    const Mat hess = p.hessian(phi);
    const double h = 1e-6;
    Mat fd(5, 5);
    for (Index k = 0; k < 5; ++k) {
      Vec up = phi, down = phi;
      up[k] += h;
      down[k] -= h;
      fd.col(k) = (p.drift(up) - p.drift(down)) / (2 * h);
    }
    CHECK((fd - hess).norm() < 1e-6 * std::max(1.0, hess.norm()));
    CHECK((hess - hess.transpose()).norm() == 0.0);
  }
  SUBCASE("zero at a consistent minimum") {
    PhasePotential p;
    p.alpha = Vec::Constant(3, 0.4);
    p.psi_bar = Vec(3);
    p.psi_bar << 0.3, -1.2, 2.5;
    p.graph.m = 3;
    p.graph.edges = {{0, 1, 0.7, p.psi_bar[0] - p.psi_bar[1]}, {1, 2, 0.2, p.psi_bar[1] - p.psi_bar[2]}};
    CHECK(p.drift(p.psi_bar).norm() < 1e-15);
  }
  SUBCASE("single anchor, no edges") {
    CircularStats s;
    s.psi_bar = Vec(3);
    s.psi_bar << 0.5, 1.0, -1.0;
    s.alpha_w = Vec::Unit(3, 0);
    s.anchor_mag = Vec::Ones(3);
    s.m_matrix = CMat::Identity(3, 3);
    const Vec phi = random_phases(3, rng);
    const Vec g = drift(phi, s, DependencyGraph{3, {}});
    CHECK(g[0] == doctest::Approx(std::sin(phi[0] - 0.5)));
    CHECK(g[1] == 0.0);
    CHECK(g[2] == 0.0);
  }
}

TEST_CASE("wrapped gaussian score") {
  Rng rng = make_rng(14);
  SUBCASE("matches numerical differentiation of the dense log density") {
    for (double sigma : {0.05, 0.3, 1.0, 2.0}) {
      double worst = 0.0;
      for (int i = 0; i < 100; ++i) {
        // Points concentrated where the density is non-negligible for small sigma.
        const double diff = sigma < 0.2 ? std::normal_distribution<double>(0.0, 3 * sigma)(rng)
                                        : random_phases(1, rng)[0];
        const double h = 1e-6;
        const double fd = (testing::dense_wrapped_log_density(diff + h, sigma) -
                           testing::dense_wrapped_log_density(diff - h, sigma)) /
                          (2 * h);
        worst = std::max(worst, std::abs(fd - wrapped_gaussian_score_1d(diff, sigma)));
      }
      CAPTURE(sigma);
      CHECK(worst < 1e-6);
    }
  }
  SUBCASE("gaussian limit near the mode") {
    const double sigma = 0.05;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double diff = std::normal_distribution<double>(0.0, sigma)(rng);
      const double expected = -diff / (2 * sigma * sigma);
      worst = std::max(worst, std::abs(wrapped_gaussian_score_1d(diff, sigma) - expected) / std::abs(expected));
    }
    CHECK(worst < 1e-6);
  }
  SUBCASE("flat for large sigma") {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, std::abs(wrapped_gaussian_score_1d(random_phases(1, rng)[0], 20.0)));
    CHECK(worst < 1e-12);
  }
  SUBCASE("truncation drops less than 1e-12 of the sum") {
    for (double sigma : {0.05, 0.3, 1.0, 2.0, 3.0, 5.0}) {
      const int j = wrapped_truncation(sigma);
      CHECK(j >= 3);
      for (double diff : {-kPi, -1.0, 0.0, 2.0, 3.1}) {
        const double kept = wrapped_gaussian_log_density_1d(diff, sigma);
        const double full = testing::dense_wrapped_log_density(diff, sigma, 200);
        CAPTURE(sigma);
        CHECK(-std::expm1(kept - full) < 1e-12);
      }
    }
  }
  SUBCASE("score has zero mean under its own density") {
    const double sigma = 0.8;
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0) * sigma);
    const Vec mu = Vec::Constant(1, 0.4);
    double sum = 0.0, sum2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const Vec x = Vec::Constant(1, wrap(0.4 + normal(rng)));
      const double s = wrapped_gaussian_score(x, mu, sigma)[0];
      sum += s;
      sum2 += s * s;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean) < 3 * se);
  }
  SUBCASE("rejects non-positive sigma") {
    CHECK(error_code([] { wrapped_gaussian_score_1d(0.1, 0.0); }) == Errc::InvalidInput);
  }
}

TEST_CASE("training pairs") {
  Rng rng = make_rng(15);
  const PhasePotential p = random_potential(4, rng);
  SUBCASE("no drift and tiny noise returns the input") {
    const NoiseSchedule s{1e-12, 1e-12, 1e-300};
    const Vec phi = random_phases(4, rng);
    const TrainingPair tp = make_training_pair(phi, p, s, rng);
    CHECK((tp.phi_tilde - phi).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("outputs wrapped, noise moments match 2 sigma^2") {
    const NoiseSchedule s{0.05, 0.05, 0.1};
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const TrainingPair tp = make_training_pair(random_phases(4, rng), p, s, rng);
      CHECK((tp.phi_tilde.array() >= -kPi).all());
      CHECK((tp.phi_tilde.array() < kPi).all());
      CHECK(s.lambda(tp.t) == 2.0 * tp.sigma * tp.sigma);
      for (Index k = 0; k < 4; ++k) {
        const double e = wrap(tp.phi_tilde[k] - tp.mu_phi[k]);
        sum += e;
        sum2 += e * e;
      }
    }
    const double count = 4.0 * n;
    const double var = 2 * 0.05 * 0.05;
    CHECK(std::abs(sum / count) < 3 * std::sqrt(var / count));
    CHECK(sum2 / count == doctest::Approx(var).epsilon(0.03));
  }
  SUBCASE("schedule validation and geometric interpolation") {
    const NoiseSchedule s;
    CHECK(s.sigma(0.0) == doctest::Approx(0.05));
    CHECK(s.sigma(1.0) == doctest::Approx(1.5));
    CHECK(s.sigma(0.5) == doctest::Approx(std::sqrt(0.05 * 1.5)));
    CHECK(error_code([] { NoiseSchedule{0.5, 0.1, 0.1}.validate(); }) == Errc::InvalidConfig);
    CHECK(error_code([] { NoiseSchedule{0.05, 1.5, 0.0}.validate(); }) == Errc::InvalidConfig);
  }
}

TEST_CASE("score net backward matches central differences") {
  Rng rng = make_rng(16);
  const Index m = 3;
  ScoreNet net(m, 6, NoiseSchedule{}, rng);
  Mat phi(m, 4), log_rho = gaussian_matrix(m, 4, rng);
  for (Index i = 0; i < 4; ++i) phi.col(i) = random_phases(m, rng);
  Vec t(4);
  t << 0.1, 0.4, 0.6, 0.95;
  const Mat target = gaussian_matrix(m, 4, rng);
  auto loss = [&](const ScoreNet& nn, const Mat& ph, const Mat& lr) {
    return 0.5 * (nn.evaluate(ph, t, lr) - target).squaredNorm();
  };
  const ScoreNet::Pass pass = net.forward(phi, t, log_rho);
  Mlp<double>::Grads grads;
  grads.zero_like(net.mlp());
  Mat g_phi, g_rho;
  net.backward(pass, pass.score - target, &grads, &g_phi, &g_rho);
  const double h = 1e-6;
  double worst = 0.0;
  for (Index k = 0; k < m; ++k) {
    for (Index i = 0; i < 4; ++i) {
      Mat up = phi, down = phi;
      up(k, i) += h;
      down(k, i) -= h;
      worst = std::max(worst, std::abs((loss(net, up, log_rho) - loss(net, down, log_rho)) / (2 * h) - g_phi(k, i)));
      up = log_rho;
      down = log_rho;
      up(k, i) += h;
      down(k, i) -= h;
      worst = std::max(worst, std::abs((loss(net, phi, up) - loss(net, phi, down)) / (2 * h) - g_rho(k, i)));
    }
  }
  auto& w = net.mlp().layers()[1].w;
  for (Index i = 0; i < w.rows(); ++i) {
    const double keep = w(i, 0);
    w(i, 0) = keep + h;
    const double up = loss(net, phi, log_rho);
    w(i, 0) = keep - h;
    const double down = loss(net, phi, log_rho);
    w(i, 0) = keep;
    worst = std::max(worst, std::abs((up - down) / (2 * h) - grads.dw[1](i, 0)));
  }
  CHECK(worst < 1e-6);
  CHECK(net.input_width() == 3 * m + 16);
}

namespace {

PhasePlantSpec small_plant(double kappa, std::uint64_t seed) {
  PhasePlantSpec s;
  s.m = 4;
  s.n = 4000;
  s.anchors = Vec(4);
  s.anchors << 0.5, -2.0, 1.7, 3.0;
  s.kappa = Vec::Constant(4, kappa);
  s.burn_in = 2000;
  s.seed = seed;
  return s;
}

PriorConfig small_config() {
  PriorConfig c;
  c.p = 1;
  c.steps = 3000;
  c.batch = 128;
  c.mixing = MixingMode::FixedIdentity;
  c.validation_size = 512;
  c.seed = 21;
  return c;
}

// Mean norm of the trained score at mid-schedule on noised held-out points,
// with the mean cosine against the importance-sampled oracle.
std::pair<double, double> mid_schedule_scores(const TrainedPrior& prior, const PhasePlantSpec& plant, Rng& rng) {
  PhasePlantSpec held = plant;
  held.seed = plant.seed + 1000;
  held.n = 60;
  const PhaseCorpus corpus = planted_phase_corpus(held);
  const testing::PlantedScoreOracle oracle(plant, prior.potential, prior.schedule.tau);
  const double sigma = prior.schedule.sigma(0.5);
  double norm = 0.0, cos = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < held.n; ++i) {
    Vec eps(plant.m);
    for (Index k = 0; k < plant.m; ++k) eps[k] = normal(rng);
    const TrainingPair tp = make_training_pair(corpus.theta.row(i).transpose(), prior.potential, prior.schedule, 0.5, eps);
    const Vec s = prior.net.evaluate(tp.phi_tilde, 0.5, Vec::Zero(plant.m));
    norm += s.norm();
    cos += testing::cosine(s, oracle.score(tp.phi_tilde, sigma, 2000, rng));
  }
  return {norm / static_cast<double>(held.n), cos / static_cast<double>(held.n)};
}

}  // namespace

TEST_CASE("stage I training on small planted priors") {
  Rng rng = make_rng(17);
  const PhasePlantSpec strong = small_plant(20.0, 1);
  const TrainedPrior prior = train_phase_prior(planted_phase_corpus(strong).coeffs(), small_config());
  const auto [strong_norm, strong_cos] = mid_schedule_scores(prior, strong, rng);
  CHECK(strong_cos > 0.9);
  CHECK(prior.log.final_validation_loss < 0.5 * prior.log.initial_validation_loss);

  SUBCASE("null prior has a much smaller score") {
    const PhasePlantSpec null_plant = small_plant(0.0, 2);
    const TrainedPrior null_prior = train_phase_prior(planted_phase_corpus(null_plant).coeffs(), small_config());
    const auto [null_norm, null_cos] = mid_schedule_scores(null_prior, null_plant, rng);
    CAPTURE(null_norm);
    CAPTURE(strong_norm);
    CHECK(null_norm <= 0.1 * strong_norm);
  }
  SUBCASE("deterministic and round-trips through disk") {
    const TrainedPrior again = train_phase_prior(planted_phase_corpus(strong).coeffs(), small_config());
    CHECK(weights_hash(again.net) == weights_hash(prior.net));
    testing::TempDir dir("prior");
    save_prior(prior, dir / "prior");
    const TrainedPrior loaded = load_prior(dir / "prior");
    CHECK(weights_hash(loaded.net) == weights_hash(prior.net));
    const Mat phi = gaussian_matrix(4, 5, rng);
    const Vec t = Vec::LinSpaced(5, 0.0, 1.0);
    CHECK(loaded.net.evaluate(phi, t, Mat::Zero(4, 5)) == prior.net.evaluate(phi, t, Mat::Zero(4, 5)));
    CHECK(loaded.potential.alpha == prior.potential.alpha);
    CHECK(loaded.potential.graph.edges.size() == prior.potential.graph.edges.size());
    auto bytes = read_file(dir / "prior.bin");
    bytes[bytes.size() - 3] ^= 0x40;
    write_file(dir / "prior.bin", bytes);
    CHECK(error_code([&] { load_prior(dir / "prior"); }) == Errc::FormatError);
  }
}

TEST_CASE("stage I with learned mixing") {
  const PhasePlantSpec plant = small_plant(5.0, 3);
  PriorConfig cfg = small_config();
  cfg.mixing = MixingMode::Learned;
  cfg.steps = 400;
  const Mat coeffs = planted_phase_corpus(plant).coeffs();
  const TrainedPrior a = train_phase_prior(coeffs, cfg);
  const TrainedPrior b = train_phase_prior(coeffs, cfg);
  CHECK(weights_hash(a.net) == weights_hash(b.net));
  CHECK(a.mixing.skew_params == b.mixing.skew_params);
  CHECK(a.mixing.skew_params.norm() > 0.0);
  const Mat r = a.mixing.matrix();
  CHECK((r.transpose() * r - Mat::Identity(8, 8)).norm() < 1e-12);
  CHECK(a.log.epochs >= 2);
}

TEST_CASE("stage I rejects bad inputs") {
  const Mat coeffs = Mat::Ones(10, 6);
  PriorConfig cfg = small_config();
  cfg.p = 3;
  CHECK(error_code([&] { train_phase_prior(coeffs, cfg); }) == Errc::InvalidConfig);
  cfg.p = 1;
  CHECK(error_code([&] { train_phase_prior(Mat::Ones(10, 5), cfg); }) == Errc::InvalidInput);
  Mat bad = Mat::Ones(10, 6);
  bad(3, 2) = std::numeric_limits<double>::quiet_NaN();
  cfg.steps = 5;
  CHECK(error_code([&] { train_phase_prior(bad, cfg); }) == Errc::TrainingDiverged);
  CHECK(mixing_mode_from_string(to_string(MixingMode::Learned)) == MixingMode::Learned);
  CHECK(error_code([] { mixing_mode_from_string("spin"); }) == Errc::InvalidConfig);
}
