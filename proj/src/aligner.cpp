#include "aniso/aligner.hpp"

#include "aniso/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <numeric>

namespace aniso {

void Bounds::validate() const {
  require(alpha_theta > 0.0 && alpha_rho > 0.0 && alpha_v > 0.0, Errc::InvalidConfig,
          "bounds alpha_theta, alpha_rho, alpha_v must be positive");
  require(alpha_theta < kPi, Errc::InvalidConfig, "alpha_theta must be below pi");
}

double Bounds::kappa() const {
  const double s = std::exp(alpha_rho);
  const double h = std::sin(0.5 * alpha_theta);
  return std::sqrt((s - 1.0) * (s - 1.0) + 4.0 * s * h * h);
}

double Bounds::eps_eff(Index d) const { return kappa() + alpha_v * std::sqrt(static_cast<double>(d)); }

// ---- global initialization -----------------------------------------------------

RadialTransfer fit_radial_transfer(const EmbeddingSet& x_est, const EmbeddingSet& y_est, const Frame& frame) {
  require(x_est.d() == frame.d && y_est.d() == frame.d, Errc::InvalidInput, "radial transfer: dimension mismatch");
  const PolarBatch px = to_polar_rows(frame, x_est.data());
  Mat y_bar = y_est.data();
  y_bar.rowwise() += (frame.mu_i - frame.mu_t).transpose();
  const PolarBatch py = to_polar_rows(frame, y_bar);
  RadialTransfer out;
  for (Index k = 0; k < frame.m; ++k) {
    const Vec rx = px.rho.col(k);
    const Vec ry = py.rho.col(k);
    out.image.emplace_back(std::vector<double>(rx.data(), rx.data() + rx.size()));
    out.text.emplace_back(std::vector<double>(ry.data(), ry.data() + ry.size()));
  }
  return out;
}

InitState global_init(const Mat& y, const Frame& frame, const RadialTransfer& radial) {
  require(y.cols() == frame.d, Errc::InvalidInput, "global_init: dimension mismatch");
  require(radial.m() == frame.m && static_cast<Index>(radial.text.size()) == frame.m, Errc::InvalidConfig,
          "radial transfer has " + std::to_string(radial.m()) + " blocks, frame has " + std::to_string(frame.m));
  Mat y_bar = y;
  y_bar.rowwise() += (frame.mu_i - frame.mu_t).transpose();
  PolarBatch p = to_polar_rows(frame, y_bar);
  InitState s;
  s.theta0 = std::move(p.theta);
  s.rho0.resize(y.rows(), frame.m);
  s.v0.resize(y.rows(), frame.d);
  const VStats& vs = frame.v_stats;
  const Vec d_v = vs.sigma_x.array() / (vs.sigma_y.array() + frame.eps_polar);
  parallel_for(y.rows(), [&](Index lo, Index hi) {
    for (Index i = lo; i < hi; ++i) {
      for (Index k = 0; k < frame.m; ++k) s.rho0(i, k) = radial.apply(k, p.rho(i, k));
      const Vec y_v = frame.project_v(y.row(i).transpose());
      // Diagonal scaling in ambient coordinates leaks slightly into U; project back.
      const Vec v = vs.mu_i + d_v.cwiseProduct(y_v - vs.mu_t);
      s.v0.row(i) = frame.project_v(v).transpose();
    }
  });
  return s;
}

// ---- refinement ------------------------------------------------------------------

RefineNet::RefineNet(Index m, Index d, Index hidden, Rng& rng)
    : m_(m), d_(d), net_({3 * m + d, hidden > 0 ? hidden : 2 * (3 * m + d), hidden > 0 ? hidden : 2 * (3 * m + d),
                          2 * m + d},
                         rng) {
  net_.zero_output_layer();
}

RefineNet::RefineNet(Mlp<double> net, Index m) : m_(m), net_(std::move(net)) {
  d_ = net_.input_width() - 3 * m;
  require(d_ > 0 && net_.output_width() == 2 * m + d_, Errc::FormatError, "refine net shape mismatch");
}

Mat RefineNet::features(const Mat& theta0, const Mat& rho0, const Mat& v0) const {
  const Index b = theta0.cols();
  Mat f(3 * m_ + d_, b);
  f.topRows(m_) = theta0.array().sin();
  f.middleRows(m_, m_) = theta0.array().cos();
  f.middleRows(2 * m_, m_) = rho0.array().log();
  f.bottomRows(d_) = v0;
  return f;
}

Mat RefineNet::features(const InitState& init, Index begin, Index count) const {
  return features(init.theta0.middleRows(begin, count).transpose(), init.rho0.middleRows(begin, count).transpose(),
                  init.v0.middleRows(begin, count).transpose());
}

namespace {

struct BoundedStep {
  Mat theta_hat;    // m x B
  Mat log_rho_hat;  // m x B
  Mat tanh_theta;
  Mat tanh_rho;
};

BoundedStep bounded_phase_radius(const Mat& out, const Mat& theta0, const Mat& rho0, Index m, const Bounds& b) {
  BoundedStep s;
  s.tanh_theta = out.topRows(m).array().tanh();
  s.tanh_rho = out.middleRows(m, m).array().tanh();
  s.theta_hat = wrap_all(theta0 + b.alpha_theta * s.tanh_theta);
  s.log_rho_hat = rho0.array().log().matrix() + b.alpha_rho * s.tanh_rho;
  return s;
}

}  // namespace

Refined refine(const InitState& init, const RefineNet& net, const Frame& frame, const Bounds& bounds) {
  require(init.theta0.cols() == net.m() && init.v0.cols() == net.d() && net.d() == frame.d, Errc::InvalidInput,
          "refine: shape mismatch between init, net and frame");
  const Index n = init.n();
  const Index m = net.m();
  Refined r{Mat(n, m), Mat(n, m), Mat(n, frame.d)};
  parallel_for(n, [&](Index lo, Index hi) {
    for (Index i = lo; i < hi; ++i) {
      const Mat out = net.mlp().forward(net.features(init, i, 1));
      const Vec dt = out.col(0).head(m).array().tanh();
      const Vec dr = out.col(0).segment(m, m).array().tanh();
      const Vec dv = frame.project_v(out.col(0).tail(frame.d));
      for (Index k = 0; k < m; ++k) {
        r.theta(i, k) = wrap(init.theta0(i, k) + bounds.alpha_theta * dt[k]);
        r.rho(i, k) = init.rho0(i, k) * std::exp(bounds.alpha_rho * dr[k]);
      }
      r.v.row(i) = init.v0.row(i) + bounds.alpha_v * dv.array().tanh().matrix().transpose();
    }
  }, 16);
  return r;
}

// ---- losses ------------------------------------------------------------------------

double prior_matching_loss(const PriorMatchBatch& batch, const TrainedPrior& prior, Mat* grad_theta,
                           Mat* grad_log_rho) {
  const Index m = batch.theta_hat.rows();
  const Index b = batch.theta_hat.cols();
  require(m == prior.net.m() && batch.eps.rows() == m && batch.eps.cols() == b && batch.t.size() == b &&
              batch.log_rho_hat.rows() == m && batch.log_rho_hat.cols() == b,
          Errc::InvalidInput, "prior_matching_loss: shape mismatch");
  Mat theta_tilde(m, b), target(m, b);
  Vec lambda(b);
  for (Index i = 0; i < b; ++i) {
    const TrainingPair tp =
        make_training_pair(batch.theta_hat.col(i), prior.potential, prior.schedule, batch.t[i], batch.eps.col(i));
    theta_tilde.col(i) = tp.phi_tilde;
    target.col(i) = wrapped_gaussian_score(tp.phi_tilde, tp.mu_phi, tp.sigma);
    lambda[i] = 2.0 * tp.sigma * tp.sigma;
  }
  const ScoreNet::Pass pass = prior.net.forward(theta_tilde, batch.t, batch.log_rho_hat);
  double loss = 0.0;
  for (Index i = 0; i < b; ++i) loss += lambda[i] * (pass.score.col(i) - target.col(i)).squaredNorm();
  loss /= static_cast<double>(b);
  if (grad_theta || grad_log_rho) {
    Mat grad_score = pass.score - target;
    for (Index i = 0; i < b; ++i) grad_score.col(i) *= 2.0 * lambda[i] / static_cast<double>(b);
    Mat g_tilde, g_rho;
    prior.net.backward(pass, grad_score, nullptr, &g_tilde, &g_rho);
    // The target depends on theta_tilde - mu only, which the noise fixes, so
    // the gradient flows through the score input: d theta_tilde / d theta_hat = I - tau H.
    if (grad_theta) {
      grad_theta->resize(m, b);
      for (Index i = 0; i < b; ++i)
        grad_theta->col(i) = g_tilde.col(i) - prior.schedule.tau *
                                                  (prior.potential.hessian(batch.theta_hat.col(i)) * g_tilde.col(i));
    }
    if (grad_log_rho) *grad_log_rho = std::move(g_rho);
  }
  return loss;
}

double phase_deformation_loss(const Mat& theta_hat, const Mat& theta0, const Mat& rho0, const DependencyGraph& graph,
                              double eps, Mat* grad_theta) {
  require(!graph.edges.empty(), Errc::InvalidConfig, "phase deformation loss needs a non-empty graph");
  const Index b = theta_hat.cols();
  const double inv_e = 1.0 / static_cast<double>(graph.edges.size());
  if (grad_theta) *grad_theta = Mat::Zero(theta_hat.rows(), b);
  double loss = 0.0;
  for (Index i = 0; i < b; ++i) {
    double norm = eps;
    for (const Edge& e : graph.edges) norm += rho0(e.k, i) * rho0(e.l, i);
    for (const Edge& e : graph.edges) {
      const double w = rho0(e.k, i) * rho0(e.l, i) / norm;
      const double dev = (theta_hat(e.k, i) - theta_hat(e.l, i)) - (theta0(e.k, i) - theta0(e.l, i));
      loss += w * (1.0 - std::cos(dev)) * inv_e;
      if (grad_theta) {
        const double g = w * std::sin(dev) * inv_e / static_cast<double>(b);
        (*grad_theta)(e.k, i) += g;
        (*grad_theta)(e.l, i) -= g;
      }
    }
  }
  return loss / static_cast<double>(b);
}

// ---- training ----------------------------------------------------------------------

void AlignConfig::validate() const {
  bounds.validate();
  require(beta >= 0.0, Errc::InvalidConfig, "beta must be >= 0");
  require(steps >= 0 && batch >= 1 && lr > 0.0 && validation_size >= 1 && hidden >= 0, Errc::InvalidConfig,
          "invalid refiner optimizer settings");
}

namespace {

struct ValidationSet {
  InitState init;
  Vec t;
  Mat eps;  // m x B
};

std::pair<double, double> refiner_losses(const RefineNet& net, const ValidationSet& val, const TrainedPrior& prior,
                                         const Bounds& bounds, double eps) {
  const Mat out = net.mlp().forward(net.features(val.init, 0, val.init.n()));
  const Mat theta0 = val.init.theta0.transpose();
  const Mat rho0 = val.init.rho0.transpose();
  const BoundedStep s = bounded_phase_radius(out, theta0, rho0, net.m(), bounds);
  const double l2 = prior_matching_loss({s.theta_hat, s.log_rho_hat, val.t, val.eps}, prior);
  const double lphi = phase_deformation_loss(s.theta_hat, theta0, rho0, prior.potential.graph, eps);
  return {l2, lphi};
}

InitState select_rows(const InitState& s, const std::vector<Index>& rows) {
  InitState out{Mat(rows.size(), s.theta0.cols()), Mat(rows.size(), s.rho0.cols()), Mat(rows.size(), s.v0.cols())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.theta0.row(static_cast<Index>(i)) = s.theta0.row(rows[i]);
    out.rho0.row(static_cast<Index>(i)) = s.rho0.row(rows[i]);
    out.v0.row(static_cast<Index>(i)) = s.v0.row(rows[i]);
  }
  return out;
}

}  // namespace

TrainedRefiner train_refiner(const EmbeddingSet& y_train, const Frame& frame, const TrainedPrior& prior,
                             const RadialTransfer& radial, const AlignConfig& cfg) {
  cfg.validate();
  require(y_train.n() >= 1, Errc::InsufficientSamples, "refiner training needs text rows");
  require(prior.net.m() == frame.m, Errc::InvalidConfig, "prior and frame disagree on the block count");
  const Index m = frame.m;
  const Index n = y_train.n();
  const InitState init = global_init(rows_in_lexicographic_order(y_train.data()), frame, radial);

  Rng init_rng = make_rng(cfg.seed, 11);
  TrainedRefiner out;
  out.bounds = cfg.bounds;
  out.beta = cfg.beta;
  out.net = RefineNet(m, frame.d, cfg.hidden, init_rng);

  Rng val_rng = make_rng(cfg.seed, 12);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Index> val_rows(static_cast<std::size_t>(cfg.validation_size));
  for (auto& r : val_rows) r = pick(val_rng);
  ValidationSet val{select_rows(init, val_rows), Vec(cfg.validation_size), Mat(m, cfg.validation_size)};
  for (Index i = 0; i < cfg.validation_size; ++i) {
    val.t[i] = unif(val_rng);
    for (Index k = 0; k < m; ++k) val.eps(k, i) = normal(val_rng);
  }
  std::tie(out.log.initial_prior_loss, out.log.initial_deformation) =
      refiner_losses(out.net, val, prior, cfg.bounds, frame.eps_polar);

  Adam<double> adam(out.net.mlp(), cfg.lr);
  Mlp<double>::Grads grads;
  Rng order_rng = make_rng(cfg.seed, 13);
  Rng noise_rng = make_rng(cfg.seed, 14);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Index step = 0;
  while (step < cfg.steps) {
    std::shuffle(order.begin(), order.end(), order_rng);
    for (Index start = 0; start < n && step < cfg.steps; start += cfg.batch, ++step) {
      const Index b = std::min(cfg.batch, n - start);
      const std::vector<Index> rows(order.begin() + start, order.begin() + start + b);
      const InitState batch = select_rows(init, rows);
      Vec t(b);
      Mat eps(m, b);
      for (Index i = 0; i < b; ++i) {
        t[i] = unif(noise_rng);
        for (Index k = 0; k < m; ++k) eps(k, i) = normal(noise_rng);
      }
      const Mat theta0 = batch.theta0.transpose();
      const Mat rho0 = batch.rho0.transpose();
      Mlp<double>::Cache cache;
      const Mat net_out = out.net.mlp().forward(out.net.features(batch, 0, b), &cache);
      const BoundedStep s = bounded_phase_radius(net_out, theta0, rho0, m, cfg.bounds);

      Mat g_theta, g_log_rho, g_phi_theta;
      const double l2 = prior_matching_loss({s.theta_hat, s.log_rho_hat, t, eps}, prior, &g_theta, &g_log_rho);
      const double lphi =
          phase_deformation_loss(s.theta_hat, theta0, rho0, prior.potential.graph, frame.eps_polar, &g_phi_theta);
      const double loss = l2 + cfg.beta * lphi;
      require(std::isfinite(loss), Errc::TrainingDiverged,
              "Stage II loss became non-finite at step " + std::to_string(step));
      g_theta += cfg.beta * g_phi_theta;

      Mat grad_out = Mat::Zero(net_out.rows(), b);
      grad_out.topRows(m) =
          (g_theta.array() * cfg.bounds.alpha_theta * (1.0 - s.tanh_theta.array().square())).matrix();
      grad_out.middleRows(m, m) =
          (g_log_rho.array() * cfg.bounds.alpha_rho * (1.0 - s.tanh_rho.array().square())).matrix();
      grads.zero_like(out.net.mlp());
      out.net.mlp().backward(cache, grad_out, &grads);
      adam.step(out.net.mlp(), grads);
    }
  }
  out.log.steps = step;
  require(out.net.mlp().all_finite(), Errc::TrainingDiverged, "Stage II weights became non-finite");
  out.net.mlp().freeze_to_f32();
  std::tie(out.log.final_prior_loss, out.log.final_deformation) =
      refiner_losses(out.net, val, prior, cfg.bounds, frame.eps_polar);
  return out;
}

// ---- reconstruction and calibration ----------------------------------------------------

Mat reconstruct(const Refined& refined, const Frame& frame) {
  const Index n = refined.theta.rows();
  Mat e(n, frame.d);
  parallel_for(n, [&](Index lo, Index hi) {
    for (Index i = lo; i < hi; ++i) {
      const Vec c = polar_to_coeffs(refined.rho.row(i).transpose(), refined.theta.row(i).transpose());
      const Vec pre = frame.q_u * c + refined.v.row(i).transpose();
      const double norm = pre.norm();
      require(norm >= 1e-12, Errc::DegenerateRow, "reconstructed row " + std::to_string(i) + " has zero norm");
      e.row(i) = (pre / norm).transpose();
    }
  });
  return e;
}

Mat centroid_calibrate(const Mat& e_prime, const Vec& mu_i) {
  require(e_prime.rows() >= 1, Errc::InsufficientSamples, "centroid calibration needs at least one row");
  require(e_prime.cols() == mu_i.size(), Errc::InvalidInput, "centroid calibration: dimension mismatch");
  const Vec shift = mu_i - e_prime.colwise().mean().transpose();
  Mat e = e_prime.rowwise() + shift.transpose();
  for (Index i = 0; i < e.rows(); ++i) {
    const double norm = e.row(i).norm();
    require(norm >= 1e-12, Errc::DegenerateRow, "calibrated row " + std::to_string(i) + " has zero norm");
    e.row(i) /= norm;
  }
  return e;
}

AlignTrace align_corpus_traced(const Mat& y, const AlignArtifacts& a) {
  require(y.rows() >= 1, Errc::InsufficientSamples, "align_corpus needs at least one row");
  AlignTrace t;
  t.init = global_init(y, a.frame, a.radial);
  t.refined = refine(t.init, a.refiner.net, a.frame, a.refiner.bounds);
  t.e_prime = reconstruct(t.refined, a.frame);
  t.z = centroid_calibrate(t.e_prime, a.frame.mu_i);
  return t;
}

Mat align_corpus(const Mat& y, const AlignArtifacts& artifacts) { return align_corpus_traced(y, artifacts).z; }

// ---- certificates ------------------------------------------------------------------------

nlohmann::ordered_json Certificates::to_json() const {
  nlohmann::ordered_json j;
  j["samples"] = samples;
  j["theta_violations"] = theta_violations;
  j["rho_violations"] = rho_violations;
  j["v_violations"] = v_violations;
  j["block_violations"] = block_violations;
  j["kappa"] = kappa;
  j["eps_eff"] = eps_eff;
  j["pairs"] = pairs;
  j["max_drift"] = max_drift;
  j["eps_eff_bound"] = eps_eff_bound;
  j["eps_eff_violations"] = eps_eff_violations;
  j["realized_violations"] = realized_violations;
  j["max_realized_eps"] = max_realized_eps;
  j["all_hold"] = all_hold();
  return j;
}

Certificates certify(const InitState& init, const Refined& refined, const Frame& frame, const Bounds& bounds,
                     Index pairs, std::uint64_t seed) {
  const Index n = init.n();
  const Index m = frame.m;
  constexpr double kSlack = 1e-12;
  Certificates c;
  c.samples = n;
  c.kappa = bounds.kappa();
  c.eps_eff = bounds.eps_eff(frame.d);
  c.eps_eff_bound = 2.0 * c.eps_eff + c.eps_eff * c.eps_eff;

  Mat z0(n, frame.d), z(n, frame.d);
  Vec eps_i(n), norm0(n);
  for (Index i = 0; i < n; ++i) {
    const Vec c0 = polar_to_coeffs(init.rho0.row(i).transpose(), init.theta0.row(i).transpose());
    const Vec c1 = polar_to_coeffs(refined.rho.row(i).transpose(), refined.theta.row(i).transpose());
    bool theta_ok = true, rho_ok = true, block_ok = true;
    for (Index k = 0; k < m; ++k) {
      if (std::abs(wrap(refined.theta(i, k) - init.theta0(i, k))) > bounds.alpha_theta + kSlack) theta_ok = false;
      const double ratio = refined.rho(i, k) / init.rho0(i, k);
      if (ratio > std::exp(bounds.alpha_rho) * (1 + kSlack) || ratio < std::exp(-bounds.alpha_rho) * (1 - kSlack))
        rho_ok = false;
      const double move = (c1.segment(2 * k, 2) - c0.segment(2 * k, 2)).norm();
      if (move > init.rho0(i, k) * c.kappa * (1 + kSlack) + kSlack) block_ok = false;
    }
    const Vec dv = refined.v.row(i) - init.v0.row(i);
    c.theta_violations += theta_ok ? 0 : 1;
    c.rho_violations += rho_ok ? 0 : 1;
    c.block_violations += block_ok ? 0 : 1;
    c.v_violations += dv.cwiseAbs().maxCoeff() <= bounds.alpha_v + kSlack ? 0 : 1;
    z0.row(i) = (frame.q_u * c0 + init.v0.row(i).transpose()).transpose();
    z.row(i) = (frame.q_u * c1 + refined.v.row(i).transpose()).transpose();
    eps_i[i] = c.kappa * c0.norm() + dv.norm();
    norm0[i] = z0.row(i).norm();
  }
  c.max_realized_eps = n > 0 ? eps_i.maxCoeff() : 0.0;

  if (n >= 2 && pairs > 0) {
    Rng rng = make_rng(seed, 21);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    for (Index p = 0; p < pairs; ++p) {
      const Index i = pick(rng);
      Index j = pick(rng);
      while (j == i) j = pick(rng);
      const double drift = std::abs(z.row(i).dot(z.row(j)) - z0.row(i).dot(z0.row(j)));
      c.max_drift = std::max(c.max_drift, drift);
      if (drift > c.eps_eff_bound + kSlack) ++c.eps_eff_violations;
      const double realized = eps_i[i] * norm0[j] + norm0[i] * eps_i[j] + eps_i[i] * eps_i[j];
      if (drift > realized * (1 + 1e-9) + kSlack) ++c.realized_violations;
      ++c.pairs;
    }
  }
  return c;
}

// ---- serialization -------------------------------------------------------------------------

void save_refiner(const TrainedRefiner& refiner, const RadialTransfer& radial, const std::filesystem::path& stem) {
  SectionFile file;
  refiner.net.mlp().write_sections(file, "refine.L");
  for (Index k = 0; k < radial.m(); ++k) {
    const auto& xi = radial.image[static_cast<std::size_t>(k)].sorted();
    const auto& yt = radial.text[static_cast<std::size_t>(k)].sorted();
    file.add_vector("radial.x." + std::to_string(k), Eigen::Map<const Vec>(xi.data(), static_cast<Index>(xi.size())));
    file.add_vector("radial.y." + std::to_string(k), Eigen::Map<const Vec>(yt.data(), static_cast<Index>(yt.size())));
  }
  const auto bin = std::filesystem::path(stem.string() + ".bin");
  const auto bytes = file.encode();
  write_file(bin, bytes);

  nlohmann::ordered_json j;
  j["m"] = refiner.net.m();
  j["d"] = refiner.net.d();
  j["hidden"] = refiner.net.mlp().layers().front().w.rows();
  j["activation"] = "silu";
  j["bounds"] = {{"alpha_theta", refiner.bounds.alpha_theta},
                 {"alpha_rho", refiner.bounds.alpha_rho},
                 {"alpha_v", refiner.bounds.alpha_v}};
  j["beta"] = refiner.beta;
  j["radial_blocks"] = radial.m();
  j["log"] = {{"initial_prior_loss", refiner.log.initial_prior_loss},
              {"final_prior_loss", refiner.log.final_prior_loss},
              {"initial_deformation", refiner.log.initial_deformation},
              {"final_deformation", refiner.log.final_deformation},
              {"steps", refiner.log.steps}};
  j["sections"] = bin.filename().string();
  j["sha256"] = sha256_hex(bytes);
  write_text(stem.string() + ".json", j.dump(2) + "\n");
}

std::pair<TrainedRefiner, RadialTransfer> load_refiner(const std::filesystem::path& stem) {
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
  TrainedRefiner r;
  Index m = 0, blocks = 0;
  try {
    m = j.at("m").get<Index>();
    blocks = j.at("radial_blocks").get<Index>();
    const auto& b = j.at("bounds");
    r.bounds = {b.at("alpha_theta").get<double>(), b.at("alpha_rho").get<double>(), b.at("alpha_v").get<double>()};
    r.beta = j.at("beta").get<double>();
    const auto& lg = j.at("log");
    r.log = {lg.at("initial_prior_loss").get<double>(), lg.at("final_prior_loss").get<double>(),
             lg.at("initial_deformation").get<double>(), lg.at("final_deformation").get<double>(),
             lg.at("steps").get<Index>()};
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::FormatError, stem.string() + ".json: " + e.what());
  }
  r.net = RefineNet(Mlp<double>::read_sections(file, "refine.L"), m);
  RadialTransfer radial;
  for (Index k = 0; k < blocks; ++k) {
    const Vec xi = file.get_vector("radial.x." + std::to_string(k));
    const Vec yt = file.get_vector("radial.y." + std::to_string(k));
    radial.image.emplace_back(std::vector<double>(xi.data(), xi.data() + xi.size()));
    radial.text.emplace_back(std::vector<double>(yt.data(), yt.data() + yt.size()));
  }
  return {std::move(r), std::move(radial)};
}

}  // namespace aniso
