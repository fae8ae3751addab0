#include "aniso/phase_prior.hpp"

#include "aniso/error.hpp"
#include "aniso/numerics.hpp"

#include "json.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace aniso {

CircularStats circular_stats(const Mat& theta, const Mat& rho, double eps) {
  const Index n = theta.rows();
  const Index m = theta.cols();
  require(n >= 2, Errc::InsufficientSamples, "circular statistics need at least 2 samples");
  require(rho.rows() == n && rho.cols() == m, Errc::InvalidInput, "theta and rho shapes differ");
  CMat e(n, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) e(i, j) = std::polar(1.0, theta(i, j));

  CircularStats s;
  s.psi_bar.resize(m);
  s.anchor_mag.resize(m);
  const Eigen::VectorXcd mean = e.colwise().mean().transpose();
  for (Index k = 0; k < m; ++k) {
    s.anchor_mag[k] = std::abs(mean[k]);
    s.psi_bar[k] = wrap(std::arg(mean[k]));
  }
  CMat mm = (e.transpose() * e.conjugate()) / static_cast<double>(n);
  mm = 0.5 * (mm + mm.adjoint().eval());
  for (Index k = 0; k < m; ++k) {
    mm(k, k) = 1.0;
    for (Index l = 0; l < m; ++l) {
      const double a = std::abs(mm(k, l));
      if (a > 1.0) mm(k, l) /= a;
    }
  }
  s.m_matrix = std::move(mm);
  const Vec energy = rho.array().square().colwise().mean().transpose();
  s.alpha_w = energy / (energy.sum() + eps);
  return s;
}

DependencyGraph build_graph(const CircularStats& stats, Index p) {
  const Index m = stats.m();
  require(p >= 1 && p <= m - 1, Errc::InvalidInput,
          "top-p must satisfy 1 <= p <= m - 1 (p=" + std::to_string(p) + ", m=" + std::to_string(m) + ")");
  std::set<std::pair<Index, Index>> pairs;
  std::vector<Index> others;
  for (Index k = 0; k < m; ++k) {
    others.clear();
    for (Index l = 0; l < m; ++l)
      if (l != k) others.push_back(l);
    std::stable_sort(others.begin(), others.end(), [&](Index a, Index b) {
      return std::abs(stats.m_matrix(k, a)) > std::abs(stats.m_matrix(k, b));
    });
    for (Index j = 0; j < p; ++j) pairs.emplace(std::min(k, others[j]), std::max(k, others[j]));
  }
  DependencyGraph g;
  g.m = m;
  for (const auto& [k, l] : pairs)
    g.edges.push_back({k, l, std::abs(stats.m_matrix(k, l)), wrap(std::arg(stats.m_matrix(k, l)))});
  return g;
}

double PhasePotential::value(const Vec& phi) const {
  double v = 0.0;
  for (Index k = 0; k < m(); ++k) v += alpha[k] * (1.0 - std::cos(phi[k] - psi_bar[k]));
  for (const Edge& e : graph.edges) v += e.coupling * (1.0 - std::cos(phi[e.k] - phi[e.l] - e.offset));
  return v;
}

Vec PhasePotential::drift(const Vec& phi) const {
  Vec g(m());
  for (Index k = 0; k < m(); ++k) g[k] = alpha[k] * std::sin(phi[k] - psi_bar[k]);
  for (const Edge& e : graph.edges) {
    const double s = e.coupling * std::sin(phi[e.k] - phi[e.l] - e.offset);
    g[e.k] += s;
    g[e.l] -= s;
  }
  return g;
}

Mat PhasePotential::hessian(const Vec& phi) const {
  Mat h = Mat::Zero(m(), m());
  for (Index k = 0; k < m(); ++k) h(k, k) = alpha[k] * std::cos(phi[k] - psi_bar[k]);
  for (const Edge& e : graph.edges) {
    const double c = e.coupling * std::cos(phi[e.k] - phi[e.l] - e.offset);
    h(e.k, e.k) += c;
    h(e.l, e.l) += c;
    h(e.k, e.l) -= c;
    h(e.l, e.k) -= c;
  }
  return h;
}

void NoiseSchedule::validate() const {
  require(sigma_min > 0.0 && sigma_min <= sigma_max, Errc::InvalidConfig,
          "noise schedule needs 0 < sigma_min <= sigma_max");
  require(tau > 0.0, Errc::InvalidConfig, "drift step tau must be positive");
}

double NoiseSchedule::sigma(double t) const { return sigma_min * std::pow(sigma_max / sigma_min, t); }

int wrapped_truncation(double sigma) {
  const int base = std::max(3, static_cast<int>(std::ceil(6.0 * sigma / kTwoPi)) + 1);
  // Dropped translates satisfy |x + 2 pi j| >= (2J + 1) pi while the nearest
  // retained one is within pi; exp(-30) keeps the ratio below 1e-12.
  const double need = (std::sqrt(1.0 + 120.0 * sigma * sigma / (kPi * kPi)) - 1.0) / 2.0;
  return std::max(base, static_cast<int>(std::ceil(need)));
}

namespace {

template <typename Fn>
void for_translates(double diff, double sigma, int truncation, Fn&& fn) {
  const int j_max = truncation > 0 ? truncation : wrapped_truncation(sigma);
  const double x = wrap(diff);
  for (int j = -j_max; j <= j_max; ++j) fn(x + kTwoPi * j);
}

}  // namespace

double wrapped_gaussian_score_1d(double diff, double sigma, int truncation) {
  require(sigma > 0.0, Errc::InvalidInput, "wrapped Gaussian needs sigma > 0");
  const double inv = 1.0 / (4.0 * sigma * sigma);
  double top = -std::numeric_limits<double>::infinity();
  for_translates(diff, sigma, truncation, [&](double u) { top = std::max(top, -u * u * inv); });
  double num = 0.0;
  double den = 0.0;
  for_translates(diff, sigma, truncation, [&](double u) {
    const double w = std::exp(-u * u * inv - top);
    num += w * (-u / (2.0 * sigma * sigma));
    den += w;
  });
  return num / den;
}

double wrapped_gaussian_log_density_1d(double diff, double sigma, int truncation) {
  require(sigma > 0.0, Errc::InvalidInput, "wrapped Gaussian needs sigma > 0");
  const double inv = 1.0 / (4.0 * sigma * sigma);
  double top = -std::numeric_limits<double>::infinity();
  for_translates(diff, sigma, truncation, [&](double u) { top = std::max(top, -u * u * inv); });
  double sum = 0.0;
  for_translates(diff, sigma, truncation, [&](double u) { sum += std::exp(-u * u * inv - top); });
  return top + std::log(sum) - 0.5 * std::log(4.0 * kPi * sigma * sigma);
}

Vec wrapped_gaussian_score(const Vec& phi_tilde, const Vec& mu, double sigma, int truncation) {
  require(sigma > 0.0, Errc::InvalidInput, "wrapped Gaussian needs sigma > 0");
  require(phi_tilde.size() == mu.size(), Errc::InvalidInput, "score: size mismatch");
  Vec s(phi_tilde.size());
  for (Index k = 0; k < s.size(); ++k) s[k] = wrapped_gaussian_score_1d(phi_tilde[k] - mu[k], sigma, truncation);
  return s;
}

TrainingPair make_training_pair(const Vec& phi, const PhasePotential& potential, const NoiseSchedule& schedule,
                                double t, const Vec& eps) {
  TrainingPair out;
  out.t = t;
  out.sigma = schedule.sigma(t);
  out.mu_phi = wrap_all(phi - schedule.tau * potential.drift(phi));
  out.phi_tilde = wrap_all(out.mu_phi + std::sqrt(2.0) * out.sigma * eps);
  return out;
}

TrainingPair make_training_pair(const Vec& phi, const PhasePotential& potential, const NoiseSchedule& schedule,
                                Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double t = unif(rng);
  Vec eps(phi.size());
  for (Index k = 0; k < eps.size(); ++k) eps[k] = normal(rng);
  return make_training_pair(phi, potential, schedule, t, eps);
}

// ---- ScoreNet ---------------------------------------------------------------

ScoreNet::ScoreNet(Index m, Index hidden, const NoiseSchedule& schedule, Rng& rng)
    : m_(m), schedule_(schedule), net_({3 * m + 2 * kTimeFrequencies, hidden, hidden, m}, rng) {}

ScoreNet::ScoreNet(Mlp<double> net, const NoiseSchedule& schedule)
    : m_(net.output_width()), schedule_(schedule), net_(std::move(net)) {
  require(net_.input_width() == input_width(), Errc::FormatError, "score net input width mismatch");
}

Mat ScoreNet::features(const Mat& phi_tilde, const Vec& t, const Mat& log_rho) const {
  const Index b = phi_tilde.cols();
  require(phi_tilde.rows() == m_ && log_rho.rows() == m_ && log_rho.cols() == b && t.size() == b,
          Errc::InvalidInput, "score net input shape mismatch");
  Mat f(input_width(), b);
  f.topRows(m_) = phi_tilde.array().sin();
  f.middleRows(m_, m_) = phi_tilde.array().cos();
  for (int j = 0; j < kTimeFrequencies; ++j) {
    const double w = 0.5 * kPi * (j + 1);
    f.row(2 * m_ + 2 * j) = (w * t.array()).sin().transpose();
    f.row(2 * m_ + 2 * j + 1) = (w * t.array()).cos().transpose();
  }
  f.bottomRows(m_) = log_rho;
  return f;
}

ScoreNet::Pass ScoreNet::forward(const Mat& phi_tilde, const Vec& t, const Mat& log_rho) const {
  Pass pass;
  pass.phi_tilde = phi_tilde;
  pass.out_scale.resize(t.size());
  for (Index i = 0; i < t.size(); ++i) pass.out_scale[i] = 1.0 / (std::sqrt(2.0) * schedule_.sigma(t[i]));
  pass.score = net_.forward(features(phi_tilde, t, log_rho), &pass.cache) * pass.out_scale.asDiagonal();
  return pass;
}

Mat ScoreNet::evaluate(const Mat& phi_tilde, const Vec& t, const Mat& log_rho) const {
  Vec scale(t.size());
  for (Index i = 0; i < t.size(); ++i) scale[i] = 1.0 / (std::sqrt(2.0) * schedule_.sigma(t[i]));
  return net_.forward(features(phi_tilde, t, log_rho)) * scale.asDiagonal();
}

Vec ScoreNet::evaluate(const Vec& phi_tilde, double t, const Vec& log_rho) const {
  return evaluate(Mat(phi_tilde), Vec::Constant(1, t), Mat(log_rho)).col(0);
}

void ScoreNet::backward(const Pass& pass, const Mat& grad_score, Mlp<double>::Grads* grads, Mat* grad_phi,
                        Mat* grad_log_rho) const {
  const Mat grad_in = net_.backward(pass.cache, grad_score * pass.out_scale.asDiagonal(), grads);
  if (grad_phi) {
    *grad_phi = grad_in.topRows(m_).cwiseProduct(Mat(pass.phi_tilde.array().cos())) -
                grad_in.middleRows(m_, m_).cwiseProduct(Mat(pass.phi_tilde.array().sin()));
  }
  if (grad_log_rho) *grad_log_rho = grad_in.bottomRows(m_);
}

std::string to_string(MixingMode mode) { return mode == MixingMode::Learned ? "learned" : "fixed-identity"; }

MixingMode mixing_mode_from_string(const std::string& name) {
  if (name == "learned") return MixingMode::Learned;
  if (name == "fixed-identity") return MixingMode::FixedIdentity;
  fail(Errc::InvalidConfig, "unknown mixing mode '" + name + "' (expected learned | fixed-identity)");
}

// ---- training ---------------------------------------------------------------

void coeffs_to_polar(const Mat& coeffs, double eps_polar, Mat& theta, Mat& rho) {
  const Index m = coeffs.cols() / 2;
  theta.resize(coeffs.rows(), m);
  rho.resize(coeffs.rows(), m);
  for (Index k = 0; k < m; ++k) {
    for (Index i = 0; i < coeffs.rows(); ++i) {
      const double a = coeffs(i, 2 * k);
      const double b = coeffs(i, 2 * k + 1);
      rho(i, k) = std::sqrt(a * a + b * b + eps_polar);
      theta(i, k) = wrap(std::atan2(b, a));
    }
  }
}

namespace {

struct BatchTargets {
  Mat phi_tilde;
  Mat target;
  Vec lambda;
};

BatchTargets make_targets(const Mat& phi, const Vec& t, const Mat& eps, const PhasePotential& potential,
                          const NoiseSchedule& schedule) {
  const Index b = phi.cols();
  BatchTargets out{Mat(phi.rows(), b), Mat(phi.rows(), b), Vec(b)};
  for (Index i = 0; i < b; ++i) {
    const TrainingPair tp = make_training_pair(phi.col(i), potential, schedule, t[i], eps.col(i));
    out.phi_tilde.col(i) = tp.phi_tilde;
    out.target.col(i) = wrapped_gaussian_score(tp.phi_tilde, tp.mu_phi, tp.sigma);
    out.lambda[i] = 2.0 * tp.sigma * tp.sigma;
  }
  return out;
}

double weighted_loss(const Mat& score, const BatchTargets& bt) {
  double loss = 0.0;
  for (Index i = 0; i < score.cols(); ++i) loss += bt.lambda[i] * (score.col(i) - bt.target.col(i)).squaredNorm();
  return loss / static_cast<double>(score.cols());
}

}  // namespace

double prior_loss(const ScoreNet& net, const PhasePotential& potential, const ValidationBatch& batch) {
  const BatchTargets bt = make_targets(batch.phi, batch.t, batch.eps, potential, net.schedule());
  return weighted_loss(net.evaluate(bt.phi_tilde, batch.t, batch.log_rho), bt);
}

TrainedPrior train_phase_prior(const Mat& coeffs, const PriorConfig& cfg) {
  const Index n = coeffs.rows();
  const Index r = coeffs.cols();
  require(r >= 4 && r % 2 == 0, Errc::InvalidInput, "phase prior needs an even number (>= 4) of coefficients");
  require(n >= 2, Errc::InsufficientSamples, "phase prior needs at least 2 image samples");
  const Index m = r / 2;
  cfg.schedule.validate();
  require(cfg.p >= 1 && cfg.p <= m - 1, Errc::InvalidConfig, "top-p must satisfy 1 <= p <= m - 1");
  require(cfg.batch >= 1 && cfg.steps >= 0 && cfg.lr > 0.0, Errc::InvalidConfig, "invalid optimizer settings");
  require(cfg.validation_size >= 1, Errc::InvalidConfig, "validation_size must be positive");

  const Index hidden = cfg.hidden > 0 ? cfg.hidden : 4 * m;
  Rng init_rng = make_rng(cfg.seed, 1);
  TrainedPrior out;
  out.schedule = cfg.schedule;
  out.net = ScoreNet(m, hidden, cfg.schedule, init_rng);
  out.mixing = MixingRotation::identity(r);
  const bool learned = cfg.mixing == MixingMode::Learned;

  Mat rotation = Mat::Identity(r, r);
  Mat theta, rho, coeffs_mixed;
  auto refresh = [&]() {
    coeffs_mixed = learned ? Mat(coeffs * rotation) : coeffs;
    coeffs_to_polar(coeffs_mixed, cfg.eps_polar, theta, rho);
    const CircularStats stats = circular_stats(theta, rho, cfg.eps_polar);
    out.potential = PhasePotential::from(stats, build_graph(stats, cfg.p));
  };
  refresh();

  // Fixed validation draws: rows, times and noise from their own stream.
  Rng val_rng = make_rng(cfg.seed, 2);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Index> val_rows(static_cast<std::size_t>(cfg.validation_size));
  ValidationBatch val{Mat(m, cfg.validation_size), Mat(m, cfg.validation_size), Vec(cfg.validation_size),
                      Mat(m, cfg.validation_size)};
  for (Index i = 0; i < cfg.validation_size; ++i) {
    val_rows[static_cast<std::size_t>(i)] = pick(val_rng);
    val.t[i] = unif(val_rng);
    for (Index k = 0; k < m; ++k) val.eps(k, i) = normal(val_rng);
  }
  auto fill_validation = [&]() {
    for (Index i = 0; i < cfg.validation_size; ++i) {
      const Index row = val_rows[static_cast<std::size_t>(i)];
      val.phi.col(i) = theta.row(row).transpose();
      val.log_rho.col(i) = rho.row(row).array().log().transpose();
    }
  };
  fill_validation();
  out.log.initial_validation_loss = prior_loss(out.net, out.potential, val);

  Adam<double> adam(out.net.mlp(), cfg.lr);
  VectorAdam skew_adam(MixingRotation::param_count(r), cfg.lr * cfg.mixing_lr_ratio);
  Mlp<double>::Grads grads;
  Rng order_rng = make_rng(cfg.seed, 3);
  Rng noise_rng = make_rng(cfg.seed, 4);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  Index step = 0;
  while (step < cfg.steps) {
    std::shuffle(order.begin(), order.end(), order_rng);
    Mat grad_rotation = Mat::Zero(r, r);
    double epoch_loss = 0.0;
    Index epoch_steps = 0;
    for (Index start = 0; start < n && step < cfg.steps; start += cfg.batch, ++step, ++epoch_steps) {
      const Index b = std::min(cfg.batch, n - start);
      Mat phi(m, b), log_rho(m, b), eps(m, b);
      Vec t(b);
      for (Index i = 0; i < b; ++i) {
        const Index row = order[static_cast<std::size_t>(start + i)];
        phi.col(i) = theta.row(row).transpose();
        log_rho.col(i) = rho.row(row).array().log().transpose();
        t[i] = unif(noise_rng);
        for (Index k = 0; k < m; ++k) eps(k, i) = normal(noise_rng);
      }
      const BatchTargets bt = make_targets(phi, t, eps, out.potential, cfg.schedule);
      const ScoreNet::Pass pass = out.net.forward(bt.phi_tilde, t, log_rho);
      const double loss = weighted_loss(pass.score, bt);
      require(std::isfinite(loss), Errc::TrainingDiverged,
              "Stage I loss became non-finite at step " + std::to_string(step));
      epoch_loss += loss;

      Mat grad_score = pass.score - bt.target;
      for (Index i = 0; i < b; ++i) grad_score.col(i) *= 2.0 * bt.lambda[i] / static_cast<double>(b);
      grads.zero_like(out.net.mlp());
      Mat grad_phi_tilde, grad_log_rho;
      out.net.backward(pass, grad_score, &grads, learned ? &grad_phi_tilde : nullptr,
                       learned ? &grad_log_rho : nullptr);
      adam.step(out.net.mlp(), grads);

      if (learned) {
        // phi_tilde = wrap(phi - tau grad Psi(phi) + noise): d/dphi = I - tau H.
        for (Index i = 0; i < b; ++i) {
          const Index row = order[static_cast<std::size_t>(start + i)];
          const Vec g_phi = grad_phi_tilde.col(i) - cfg.schedule.tau * (out.potential.hessian(phi.col(i)) *
                                                                          grad_phi_tilde.col(i));
          Vec g_c(r);
          for (Index k = 0; k < m; ++k) {
            const double a = coeffs_mixed(row, 2 * k);
            const double bb = coeffs_mixed(row, 2 * k + 1);
            const double s2 = a * a + bb * bb;
            const double rho2 = s2 + cfg.eps_polar;
            const double inv_s2 = s2 > 1e-300 ? 1.0 / s2 : 0.0;
            g_c[2 * k] = g_phi[k] * (-bb * inv_s2) + grad_log_rho(k, i) * a / rho2;
            g_c[2 * k + 1] = g_phi[k] * (a * inv_s2) + grad_log_rho(k, i) * bb / rho2;
          }
          grad_rotation.noalias() += coeffs.row(row).transpose() * g_c.transpose();
        }
      }
    }
    out.log.epoch_losses.push_back(epoch_steps > 0 ? epoch_loss / static_cast<double>(epoch_steps) : 0.0);
    ++out.log.epochs;
    if (learned && epoch_steps > 0) {
      const Vec g = skew_gradient(out.mixing, grad_rotation / static_cast<double>(epoch_steps));
      require(g.allFinite(), Errc::TrainingDiverged, "mixing gradient became non-finite");
      skew_adam.step(out.mixing.skew_params, g);
      rotation = out.mixing.matrix();
      refresh();
      fill_validation();
    }
  }
  out.log.steps = step;
  require(out.net.mlp().all_finite(), Errc::TrainingDiverged, "Stage I weights became non-finite");
  out.net.mlp().freeze_to_f32();
  out.log.final_validation_loss = prior_loss(out.net, out.potential, val);
  return out;
}

std::pair<TrainedPrior, Frame> train_prior(const EmbeddingSet& x_est, const Frame& frame, const PriorConfig& config) {
  require(x_est.d() == frame.d, Errc::InvalidInput, "train_prior: dimension mismatch with frame");
  PriorConfig cfg = config;
  cfg.eps_polar = frame.eps_polar;
  // Sorted rows make the prior independent of image row order.
  TrainedPrior prior = train_phase_prior(rows_in_lexicographic_order(x_est.data()) * frame.q_u, cfg);
  Frame mixed = mix(frame, prior.mixing);
  return {std::move(prior), std::move(mixed)};
}

// ---- serialization ------------------------------------------------------------

namespace {

SectionFile net_sections(const ScoreNet& net) {
  SectionFile file;
  net.mlp().write_sections(file, "score.L");
  return file;
}

}  // namespace

std::string weights_hash(const ScoreNet& net) { return sha256_hex(net_sections(net).encode()); }

void save_prior(const TrainedPrior& prior, const std::filesystem::path& stem) {
  SectionFile file = net_sections(prior.net);
  file.add_vector("alpha", prior.potential.alpha);
  file.add_vector("psi_bar", prior.potential.psi_bar);
  Mat edges(static_cast<Index>(prior.potential.graph.edges.size()), 4);
  for (Index e = 0; e < edges.rows(); ++e) {
    const Edge& ed = prior.potential.graph.edges[static_cast<std::size_t>(e)];
    edges.row(e) << static_cast<double>(ed.k), static_cast<double>(ed.l), ed.coupling, ed.offset;
  }
  file.add("edges", edges);
  file.add_vector("mixing_skew", prior.mixing.skew_params);
  const auto bin = std::filesystem::path(stem.string() + ".bin");
  const auto bytes = file.encode();
  write_file(bin, bytes);

  nlohmann::ordered_json j;
  j["m"] = prior.net.m();
  j["input_width"] = prior.net.input_width();
  j["hidden"] = prior.net.mlp().layers().front().w.rows();
  j["activation"] = "silu";
  j["time_frequencies"] = ScoreNet::kTimeFrequencies;
  j["schedule"] = {{"sigma_min", prior.schedule.sigma_min},
                   {"sigma_max", prior.schedule.sigma_max},
                   {"tau", prior.schedule.tau}};
  j["edges"] = prior.potential.graph.edges.size();
  j["mixing_r"] = prior.mixing.r;
  j["log"] = {{"initial_validation_loss", prior.log.initial_validation_loss},
              {"final_validation_loss", prior.log.final_validation_loss},
              {"steps", prior.log.steps},
              {"epochs", prior.log.epochs}};
  j["sections"] = bin.filename().string();
  j["sha256"] = sha256_hex(bytes);
  write_text(stem.string() + ".json", j.dump(2) + "\n");
}

TrainedPrior load_prior(const std::filesystem::path& stem) {
  const auto meta_bytes = read_file(stem.string() + ".json");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(meta_bytes.begin(), meta_bytes.end());
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::FormatError, stem.string() + ".json: " + e.what());
  }
  const auto bin = std::filesystem::path(stem.string() + ".bin");
  const auto bytes = read_file(bin);
  require(sha256_hex(bytes) == j.value("sha256", std::string()), Errc::FormatError,
          bin.string() + ": hash does not match sidecar");
  const SectionFile file = SectionFile::decode(bytes, bin.string());
  TrainedPrior p;
  try {
    const auto& s = j.at("schedule");
    p.schedule = {s.at("sigma_min").get<double>(), s.at("sigma_max").get<double>(), s.at("tau").get<double>()};
    const auto& lg = j.at("log");
    p.log.initial_validation_loss = lg.at("initial_validation_loss").get<double>();
    p.log.final_validation_loss = lg.at("final_validation_loss").get<double>();
    p.log.steps = lg.at("steps").get<Index>();
    p.log.epochs = lg.at("epochs").get<Index>();
    p.mixing.r = j.at("mixing_r").get<Index>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::FormatError, stem.string() + ".json: " + e.what());
  }
  p.net = ScoreNet(Mlp<double>::read_sections(file, "score.L"), p.schedule);
  p.potential.alpha = file.get_vector("alpha");
  p.potential.psi_bar = file.get_vector("psi_bar");
  const Mat edges = file.get("edges");
  p.potential.graph.m = p.potential.alpha.size();
  for (Index e = 0; e < edges.rows(); ++e)
    p.potential.graph.edges.push_back(
        {static_cast<Index>(edges(e, 0)), static_cast<Index>(edges(e, 1)), edges(e, 2), edges(e, 3)});
  p.mixing.skew_params = file.get_vector("mixing_skew");
  require(p.net.m() == p.potential.m() && p.mixing.skew_params.size() == MixingRotation::param_count(p.mixing.r),
          Errc::FormatError, stem.string() + ": inconsistent prior artifact");
  return p;
}

}  // namespace aniso
