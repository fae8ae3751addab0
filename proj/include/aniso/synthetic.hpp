#pragma once

#include "aniso/core.hpp"
#include "aniso/phase_prior.hpp"
#include "aniso/store.hpp"

#include "json.hpp"

#include <optional>
#include <vector>

namespace aniso {

/// Planted two-modality corpus. With a Haar basis B split into consecutive
/// column groups [shared | text residual | image-only | rest]:
///   x = mu_x + B_s D_s z + B_w D_w h + sigma xi_x
///   y = mu_y + B_s D_s z + B_u D_u g + sigma xi_y
/// z, g, h, xi iid standard normal; rows are L2-normalized afterwards.
/// The means lie in the "rest" columns, so they are orthogonal to every
/// planted direction.
struct PlantSpec {
  Index n = 20000;
  Index d = 256;
  Index shared_dim = 60;           // r_true
  double shared_energy = 0.3;      // trace of the shared part
  double spectrum_decay = 0.5;     // lambda_j proportional to j^-decay
  double mean_norm = 0.84;
  double centroid_offset = 0.4;    // delta = ||mu_x - mu_y||
  Index residual_dims = 4;         // K
  std::optional<double> target_anisotropy = 25.0;  // solve equal energies for this raw A_r
  std::vector<double> residual_energies;            // used when target_anisotropy is unset
  double iso_noise = 0.0055;       // sigma, per coordinate and modality
  Index image_only_dims = 40;
  double image_only_energy = 3.6e-4;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static PlantSpec from_json(const nlohmann::json& j);
};

struct SphereTargets {
  double a_r = 1.0;
  double d_eff_frac = 1.0;
  double energy_k = 0.0;   // E(K) at K = residual_dims
  double eta_u = 0.0;      // coverage of the planted U = shared + residual span
  double g_mu = 0.0;
  Index samples = 0;
};

struct GroundTruth {
  Vec mu_x;
  Vec mu_y;
  Mat shared_basis;    // d x r_true
  Mat residual_basis;  // d x K
  Mat image_only_basis;
  Vec shared_spectrum;
  Vec residual_energies;
  Mat sigma_x;  // raw (pre-normalization) closed forms
  Mat sigma_y;
  Mat sigma_r;
  double a_r = 1.0;
  double d_eff_frac = 1.0;
  double energy_k = 0.0;
  double eta_u = 0.0;
  double g_mu = 0.0;
  std::optional<SphereTargets> sphere;  // Monte-Carlo targets after normalization

  Mat planted_u() const;  // [shared | residual] columns
  nlohmann::ordered_json to_json() const;
};

/// Closed-form raw targets only.
GroundTruth plant(const PlantSpec& spec);
/// Raw sample pairs for rows [begin, begin + count) of the stream `stream`;
/// row i always uses RNG stream (seed, stream, i), so any chunking gives the
/// same rows.
std::pair<Mat, Mat> sample_rows(const PlantSpec& spec, const GroundTruth& truth, Index begin, Index count,
                                std::uint64_t stream);

/// Generates the normalized corpus plus ground truth. When mc_samples > 0 the
/// sphere-corrected targets are estimated from an independent stream.
std::pair<PairedSet, GroundTruth> generate(const PlantSpec& spec, Index mc_samples = 0);

/// Planted periodic potential for phase-prior oracles:
///   U(phi) = sum_k kappa_k (1 - cos(phi_k - anchor_k)) + sum_e J_e (1 - cos(phi_k - phi_l - eta_e)).
struct PhasePlantSpec {
  Index m = 16;
  Index n = 10000;
  Vec anchors;
  Vec kappa;
  std::vector<Edge> couplings;  // coupling field holds J_e
  double radius = 1.0;          // every block radius; log rho is then uninformative
  double step = 0.01;
  Index burn_in = 5000;
  Index thin = 10;
  Index chains = 0;  // 0: one chain per 4 samples
  std::uint64_t seed = 0;

  double potential(const Vec& phi) const;
  Vec gradient(const Vec& phi) const;
};

struct PhaseCorpus {
  Mat theta;  // n x m
  Mat rho;    // n x m
  Mat coeffs() const;  // n x 2m block coefficients
};

/// Langevin samples of exp(-U): phi += -grad U step + sqrt(2 step) xi,
/// wrapped each step, chains started uniformly and run on their own streams.
PhaseCorpus planted_phase_corpus(const PhasePlantSpec& spec);

}  // namespace aniso
