#pragma once

#include "aniso/core.hpp"
#include "aniso/frame.hpp"
#include "aniso/mlp.hpp"

#include <complex>
#include <filesystem>
#include <vector>

namespace aniso {

using CMat = Eigen::MatrixXcd;

struct CircularStats {
  Vec psi_bar;     // arg E e^{i theta_k}
  Vec anchor_mag;  // |E e^{i theta_k}|
  Vec alpha_w;     // E rho_k^2 / (sum_u E rho_u^2 + eps)
  CMat m_matrix;   // M_kl = E e^{i (theta_k - theta_l)}

  Index m() const { return psi_bar.size(); }
};

/// theta, rho: n x m. InsufficientSamples when n < 2.
CircularStats circular_stats(const Mat& theta, const Mat& rho, double eps = 1e-12);

struct Edge {
  Index k = 0;  // k < l
  Index l = 0;
  double coupling = 0.0;  // A_kl = |M_kl|
  double offset = 0.0;    // eta_kl = arg M_kl; eta_lk = -eta_kl
};

struct DependencyGraph {
  Index m = 0;
  std::vector<Edge> edges;  // sorted by (k, l), each undirected pair once
};

/// Each node keeps its top-p partners by |M_kl| (ties: smaller index), then
/// the undirected union is taken. InvalidInput unless 1 <= p <= m - 1.
DependencyGraph build_graph(const CircularStats& stats, Index p);

/// Periodic potential
///   Psi(phi) = sum_k alpha_k (1 - cos(phi_k - psi_k))
///            + sum_{(k,l) in E} A_kl (1 - cos(phi_k - phi_l - eta_kl)).
struct PhasePotential {
  Vec alpha;
  Vec psi_bar;
  DependencyGraph graph;

  static PhasePotential from(const CircularStats& stats, DependencyGraph graph) {
    return {stats.alpha_w, stats.psi_bar, std::move(graph)};
  }

  Index m() const { return alpha.size(); }
  double value(const Vec& phi) const;
  Vec drift(const Vec& phi) const;     // gradient of value
  Mat hessian(const Vec& phi) const;   // symmetric m x m
};

inline Vec drift(const Vec& phi, const CircularStats& stats, const DependencyGraph& graph) {
  return PhasePotential::from(stats, graph).drift(phi);
}

struct NoiseSchedule {
  double sigma_min = 0.05;
  double sigma_max = 1.5;
  double tau = 0.1;

  void validate() const;
  /// Geometric interpolation: sigma_min (sigma_max / sigma_min)^t, t in [0, 1].
  double sigma(double t) const;
  double lambda(double t) const { return 2.0 * sigma(t) * sigma(t); }
};

/// Number of 2 pi translates kept on each side of the wrapped Gaussian with
/// variance 2 sigma^2: max(3, ceil(6 sigma / 2 pi) + 1), raised further until
/// the dropped tail is below 1e-12 of the retained sum.
int wrapped_truncation(double sigma);

/// d/dphi_tilde log sum_j N(phi_tilde - mu + 2 pi j; 0, 2 sigma^2), per coordinate.
/// J <= 0 selects wrapped_truncation(sigma). InvalidInput when sigma <= 0.
Vec wrapped_gaussian_score(const Vec& phi_tilde, const Vec& mu, double sigma, int truncation = 0);
double wrapped_gaussian_score_1d(double diff, double sigma, int truncation = 0);
/// log q(diff | 0, sigma) for the same truncated wrapped Gaussian.
double wrapped_gaussian_log_density_1d(double diff, double sigma, int truncation = 0);

struct TrainingPair {
  Vec phi_tilde;
  Vec mu_phi;
  double sigma = 0.0;
  double t = 0.0;
};

/// mu = wrap(phi - tau grad Psi(phi)), phi_tilde = wrap(mu + sqrt(2) sigma_t eps).
/// Draws t ~ U(0, 1) then eps ~ N(0, I) from `rng`.
TrainingPair make_training_pair(const Vec& phi, const PhasePotential& potential, const NoiseSchedule& schedule,
                                Rng& rng);
/// Same with t and eps supplied.
TrainingPair make_training_pair(const Vec& phi, const PhasePotential& potential, const NoiseSchedule& schedule,
                                double t, const Vec& eps);

/// Score network s(phi_tilde, t, log rho). Input features are
/// [sin phi; cos phi; sin(w_j t), cos(w_j t) for 8 frequencies; log rho];
/// two SiLU hidden layers; output scaled by 1 / (sqrt(2) sigma_t).
class ScoreNet {
 public:
  static constexpr int kTimeFrequencies = 8;

  ScoreNet() = default;
  ScoreNet(Index m, Index hidden, const NoiseSchedule& schedule, Rng& rng);
  ScoreNet(Mlp<double> net, const NoiseSchedule& schedule);

  Index m() const { return m_; }
  Index input_width() const { return 3 * m_ + 2 * kTimeFrequencies; }
  const Mlp<double>& mlp() const { return net_; }
  Mlp<double>& mlp() { return net_; }
  const NoiseSchedule& schedule() const { return schedule_; }

  /// Columns are samples: phi_tilde, log_rho are m x B; t has B entries.
  Mat features(const Mat& phi_tilde, const Vec& t, const Mat& log_rho) const;
  Mat evaluate(const Mat& phi_tilde, const Vec& t, const Mat& log_rho) const;
  Vec evaluate(const Vec& phi_tilde, double t, const Vec& log_rho) const;

  struct Pass {
    Mlp<double>::Cache cache;
    Mat phi_tilde;
    Vec out_scale;  // 1 / (sqrt 2 sigma_t) per column
    Mat score;
  };
  Pass forward(const Mat& phi_tilde, const Vec& t, const Mat& log_rho) const;
  /// grad_score is dL/dscore (m x B). Accumulates parameter gradients when
  /// `grads` is set; writes dL/dphi_tilde and dL/dlog_rho when requested.
  void backward(const Pass& pass, const Mat& grad_score, Mlp<double>::Grads* grads, Mat* grad_phi,
                Mat* grad_log_rho) const;

 private:
  Index m_ = 0;
  NoiseSchedule schedule_;
  Mlp<double> net_;
};

enum class MixingMode { Learned, FixedIdentity };
std::string to_string(MixingMode mode);
MixingMode mixing_mode_from_string(const std::string& name);

struct PriorConfig {
  NoiseSchedule schedule;
  Index p = 3;
  Index hidden = 0;  // 0: 4m
  Index steps = 20000;
  Index batch = 256;
  double lr = 1e-3;
  double mixing_lr_ratio = 0.1;
  MixingMode mixing = MixingMode::Learned;
  Index validation_size = 1024;
  double eps_polar = 1e-12;
  std::uint64_t seed = 0;
};

struct PriorTrainingLog {
  double initial_validation_loss = 0.0;
  double final_validation_loss = 0.0;
  Index steps = 0;
  Index epochs = 0;
  std::vector<double> epoch_losses;
};

struct TrainedPrior {
  ScoreNet net;
  PhasePotential potential;
  NoiseSchedule schedule;
  MixingRotation mixing;
  PriorTrainingLog log;
};

/// Denoising score matching on block coefficients c0 (n x 2m) expressed in
/// the unmixed basis. With learned mixing, the rotation R acts as c = c0 R;
/// statistics and graph are refreshed each epoch under the current R and R
/// takes one step per epoch from the epoch-averaged gradient.
/// TrainingDiverged when the loss turns non-finite.
TrainedPrior train_phase_prior(const Mat& coeffs, const PriorConfig& config);

/// Stage I from image estimation rows: returns the prior and the re-mixed frame.
std::pair<TrainedPrior, Frame> train_prior(const EmbeddingSet& x_est, const Frame& frame, const PriorConfig& config);

/// Fixed validation batch loss E[lambda_t ||s - target||^2].
struct ValidationBatch {
  Mat phi;      // m x B clean phases
  Mat log_rho;  // m x B
  Vec t;
  Mat eps;      // m x B
};
double prior_loss(const ScoreNet& net, const PhasePotential& potential, const ValidationBatch& batch);

/// Block coefficients to (theta, rho), both n x m.
void coeffs_to_polar(const Mat& coeffs, double eps_polar, Mat& theta, Mat& rho);

void save_prior(const TrainedPrior& prior, const std::filesystem::path& stem);
TrainedPrior load_prior(const std::filesystem::path& stem);
/// sha256 of the serialized score-net weights; identical iff weights are identical.
std::string weights_hash(const ScoreNet& net);

}  // namespace aniso
