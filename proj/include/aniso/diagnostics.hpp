#pragma once

#include "aniso/core.hpp"
#include "aniso/numerics.hpp"
#include "aniso/store.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aniso {

/// One point of an overlap or cumulative-energy curve next to its isotropic /
/// random-subspace baseline (q/d or K/d).
struct CurvePoint {
  Index k = 0;
  double value = 0.0;
  double baseline = 0.0;
};

/// Log-spectrum Pearson correlation. Eigenvalues are floored at
/// 1e-12 * trace / d; ranks where either side hit the floor are dropped.
double spectral_correlation(const Vec& eig_x, const Vec& eig_y);
double spectral_correlation(const SymMatrix& sx, const SymMatrix& sy);

/// (1/q) ||Ux^T Uy||_F^2 for two orthonormal bases of equal width.
double subspace_overlap(const Mat& ux, const Mat& uy);
double subspace_overlap(const SymMatrix& sx, const SymMatrix& sy, Index q);

/// Mean and standard error of O_q between a fixed basis and `draws`
/// Haar-random q-subspaces.
struct OverlapBaseline {
  double mean = 0.0;
  double stderr_ = 0.0;
};
OverlapBaseline random_overlap_baseline(const Mat& fixed_basis, int draws, Rng& rng);

struct MeanResidual {
  double g_mu = 0.0;
  double g_sigma = 0.0;
  double d_mean = 0.0;   // E ||x - y||
  double d_tilde = 0.0;  // E ||x - (y - mu_y + mu_x)||
  double ratio_dist = 0.0;
  double ratio_energy = 0.0;
  bool ratio_undefined = false;  // D == 0: ratios reported as 0
  double mean_sq_distance = 0.0;
  double mean_sq_residual = 0.0;
  /// |E||x-y||^2 - ||mu_x-mu_y||^2 - E||r||^2| / max(E||x-y||^2, tiny)
  double identity_rel_error = 0.0;
};

MeanResidual mean_residual_decomposition(const PairedSet& pairs);

/// (1/n) sum r_i r_i^T with r_i = (x_i - mu_x) - (y_i - mu_y).
SymMatrix residual_covariance(const PairedSet& pairs);
/// Sigma_x + Sigma_y - Sigma_xy - Sigma_yx, the same matrix by the four-term identity.
SymMatrix residual_covariance_four_term(const PairedSet& pairs);

/// Spectral summaries of a residual covariance (eigenvalues floored at 0).
struct ResidualSpectrum {
  double a_r = 1.0;
  double d_eff = 0.0;
  Vec energy;      // energy[K-1] = E(K)
  Vec normalized;  // lambda_j / trace, descending
};

/// DegenerateResidual when the trace is zero; InvalidInput when the matrix is
/// not PSD up to -1e-9 * trace.
ResidualSpectrum residual_spectrum(const Vec& eigenvalues);
ResidualSpectrum residual_spectrum(const SymMatrix& sr);

double anisotropy_ratio(const SymMatrix& sr);
Vec cumulative_energy(const SymMatrix& sr);
double effective_dimension(const SymMatrix& sr);

/// tr(Q Q^T Sigma_r) / tr(Sigma_r); InvalidFrame when Q is not orthonormal to 1e-6.
double coverage_ratio(const Mat& q_u, const SymMatrix& sr);

struct GapReport {
  Index n = 0;
  Index d = 0;
  std::optional<double> c_lambda;  // absent when the spectra are degenerate
  std::vector<CurvePoint> overlap_curve;
  MeanResidual mean_residual;
  double a_r = 1.0;
  bool residual_degenerate = false;
  std::vector<CurvePoint> energy_curve;
  double d_eff_frac = 1.0;
  std::optional<double> eta_u;
  Vec residual_spectrum;
  Vec spectrum_x;  // normalized by trace
  Vec spectrum_y;
  double four_term_rel_error = 0.0;

  nlohmann::json to_json() const;
  std::string overlap_csv() const;
  std::string energy_csv() const;
  std::string spectra_csv() const;
};

struct DiagnoseOptions {
  std::vector<Index> q_values;  // empty: powers of two up to d, plus d
  std::optional<Mat> frame_basis;  // when set, eta_u is reported for it
};

GapReport diagnose(const PairedSet& pairs, const DiagnoseOptions& opts = {});

}  // namespace aniso
