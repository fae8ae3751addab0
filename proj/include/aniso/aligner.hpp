#pragma once

#include "aniso/core.hpp"
#include "aniso/frame.hpp"
#include "aniso/mlp.hpp"
#include "aniso/numerics.hpp"
#include "aniso/phase_prior.hpp"
#include "aniso/store.hpp"

#include <filesystem>
#include <vector>

namespace aniso {

/// Hard bounds on the refinement: |dtheta| <= alpha_theta, |d log rho| <= alpha_rho,
/// |dv|_inf <= alpha_v.
struct Bounds {
  double alpha_theta = 0.3;
  double alpha_rho = 0.2;
  double alpha_v = 0.05;

  void validate() const;  // InvalidConfig unless all > 0 and alpha_theta < pi
  /// Largest per-block move relative to rho0:
  /// sqrt((e^a_rho - 1)^2 + 4 e^a_rho sin^2(a_theta / 2)).
  double kappa() const;
  /// kappa + alpha_v sqrt(d).
  double eps_eff(Index d) const;
};

/// Per-block radial quantile transfer rho -> F_x^{-1}(F_y(rho)).
struct RadialTransfer {
  std::vector<Ecdf> image;
  std::vector<Ecdf> text;

  Index m() const { return static_cast<Index>(image.size()); }
  double apply(Index block, double rho) const { return image[block].inv(text[block].eval(rho)); }
};

/// Image radii from x under the (mixed) frame, text radii from the recentred
/// y - mu_t + mu_i. Both sets should be estimation rows.
RadialTransfer fit_radial_transfer(const EmbeddingSet& x_est, const EmbeddingSet& y_est, const Frame& frame);

/// Initial state, one sample per row: theta0, rho0 are n x m, v0 is n x d.
struct InitState {
  Mat theta0;
  Mat rho0;
  Mat v0;

  Index n() const { return theta0.rows(); }
};

/// theta0 and rho from the recentred text, rho0 by radial transfer,
/// v0 = P_V(mu_i,V + D_V (y_V - mu_t,V)) from the raw y. InvalidConfig when
/// the transfer has the wrong block count.
InitState global_init(const Mat& y, const Frame& frame, const RadialTransfer& radial);

/// g(features) -> (dtheta, drho, dv), features [sin theta0; cos theta0; log rho0; v0].
class RefineNet {
 public:
  RefineNet() = default;
  /// hidden = 0 selects 2 (3m + d). The output layer starts at zero.
  RefineNet(Index m, Index d, Index hidden, Rng& rng);
  explicit RefineNet(Mlp<double> net, Index m);

  Index m() const { return m_; }
  Index d() const { return d_; }
  const Mlp<double>& mlp() const { return net_; }
  Mlp<double>& mlp() { return net_; }

  /// Columns are samples.
  Mat features(const Mat& theta0, const Mat& rho0, const Mat& v0) const;
  Mat features(const InitState& init, Index begin, Index count) const;

 private:
  Index m_ = 0;
  Index d_ = 0;
  Mlp<double> net_;
};

struct Refined {
  Mat theta;  // n x m
  Mat rho;    // n x m
  Mat v;      // n x d
};

/// Bounded update; dv is projected onto V before the elementwise tanh.
Refined refine(const InitState& init, const RefineNet& net, const Frame& frame, const Bounds& bounds);

/// Prior-matching loss for one batch (columns are samples). When the
/// gradients are requested they receive dL/dtheta_hat and dL/dlog_rho_hat.
struct PriorMatchBatch {
  Mat theta_hat;    // m x B
  Mat log_rho_hat;  // m x B
  Vec t;
  Mat eps;  // m x B
};
double prior_matching_loss(const PriorMatchBatch& batch, const TrainedPrior& prior, Mat* grad_theta = nullptr,
                           Mat* grad_log_rho = nullptr);

/// Mean over columns of (1/|E|) sum_E w_kl [1 - cos((th_k - th_l) - (th0_k - th0_l))],
/// w_kl = rho0_k rho0_l / (sum_E rho0_u rho0_v + eps). InvalidConfig on an empty graph.
double phase_deformation_loss(const Mat& theta_hat, const Mat& theta0, const Mat& rho0, const DependencyGraph& graph,
                              double eps, Mat* grad_theta = nullptr);

struct AlignConfig {
  Bounds bounds;
  double beta = 0.5;
  Index hidden = 0;  // 0: 2 (3m + d)
  Index steps = 2000;
  Index batch = 128;
  double lr = 1e-3;
  Index validation_size = 512;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RefinerLog {
  double initial_prior_loss = 0.0;
  double final_prior_loss = 0.0;
  double initial_deformation = 0.0;
  double final_deformation = 0.0;
  Index steps = 0;
};

struct TrainedRefiner {
  RefineNet net;
  Bounds bounds;
  double beta = 0.5;
  RefinerLog log;
};

/// Minimizes L_II + beta L_Phi over the refiner weights using unpaired text
/// rows only; the prior is read, never updated. Rows are sorted first, so the
/// result does not depend on their order. TrainingDiverged on a non-finite loss.
TrainedRefiner train_refiner(const EmbeddingSet& y_train, const Frame& frame, const TrainedPrior& prior,
                             const RadialTransfer& radial, const AlignConfig& config);

/// Norm(Q_U c(rho, theta) + v) per row; DegenerateRow for a zero row.
Mat reconstruct(const Refined& refined, const Frame& frame);
/// Norm(e' - mean(e') + mu_i) per row; InsufficientSamples when empty.
Mat centroid_calibrate(const Mat& e_prime, const Vec& mu_i);

struct AlignArtifacts {
  Frame frame;  // mixed frame from Stage I
  TrainedPrior prior;
  RadialTransfer radial;
  TrainedRefiner refiner;
};

struct AlignTrace {
  InitState init;
  Refined refined;
  Mat e_prime;
  Mat z;
};

AlignTrace align_corpus_traced(const Mat& y, const AlignArtifacts& artifacts);
Mat align_corpus(const Mat& y, const AlignArtifacts& artifacts);

/// Per-sample certificates for a refinement.
struct Certificates {
  Index samples = 0;
  Index theta_violations = 0;
  Index rho_violations = 0;
  Index v_violations = 0;
  Index block_violations = 0;
  double kappa = 0.0;
  double eps_eff = 0.0;  // kappa + alpha_v sqrt(d)
  // Unnormalized inner-product drift against the init reconstruction.
  Index pairs = 0;
  double max_drift = 0.0;
  double eps_eff_bound = 0.0;  // 2 eps_eff + eps_eff^2
  Index eps_eff_violations = 0;
  /// Pairwise bound with realized eps_i = kappa ||c0_i|| + ||v_i - v0_i||:
  /// eps_i ||z0_j|| + ||z0_i|| eps_j + eps_i eps_j.
  Index realized_violations = 0;
  double max_realized_eps = 0.0;

  bool all_hold() const {
    return theta_violations == 0 && rho_violations == 0 && v_violations == 0 && block_violations == 0 &&
           eps_eff_violations == 0 && realized_violations == 0;
  }
  nlohmann::ordered_json to_json() const;
};

Certificates certify(const InitState& init, const Refined& refined, const Frame& frame, const Bounds& bounds,
                     Index pairs, std::uint64_t seed);

/// <stem>.bin holds the refiner weights and the radial ECDF knots; <stem>.json
/// the bounds, beta, log and hash.
void save_refiner(const TrainedRefiner& refiner, const RadialTransfer& radial, const std::filesystem::path& stem);
std::pair<TrainedRefiner, RadialTransfer> load_refiner(const std::filesystem::path& stem);

}  // namespace aniso
