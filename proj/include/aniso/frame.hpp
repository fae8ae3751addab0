#pragma once

#include "aniso/core.hpp"
#include "aniso/numerics.hpp"
#include "aniso/store.hpp"

#include <filesystem>

namespace aniso {

/// Orthogonal r x r rotation R = exp(S); S is skew with its strict upper
/// triangle taken row by row from `skew_params`.
struct MixingRotation {
  Index r = 0;
  Vec skew_params;

  static MixingRotation identity(Index r);
  static Index param_count(Index r) { return r * (r - 1) / 2; }

  Mat skew_matrix() const;
  Mat matrix() const;
};

/// Gradient of a scalar loss with respect to the skew parameters, given the
/// gradient G with respect to R = exp(S). Uses the adjoint Frechet derivative
/// L_exp(S^T, G), read off the upper-right block of exp([[S^T, G], [0, S^T]]).
Vec skew_gradient(const MixingRotation& rotation, const Mat& grad_r);

/// Per-coordinate statistics of the orthogonal complement V.
struct VStats {
  Vec mu_t;     // P_V mu_t
  Vec mu_i;     // P_V mu_i
  Vec sigma_y;  // std of P_V y over text rows
  Vec sigma_x;  // std of P_V x over image rows
};

struct Frame {
  Index d = 0;
  Index r = 0;
  Index m = 0;
  Mat eigen_basis;  // unmixed top-r eigenvectors of the joint matrix
  Mat rotation;     // accumulated mixing; q_u = eigen_basis * rotation
  Mat q_u;
  Vec mu_t;
  Vec mu_i;
  double lambda_reg = 0.0;
  double eps_polar = 1e-12;
  VStats v_stats;

  /// P_V z = z - Q_U Q_U^T z.
  Vec project_v(const Vec& z) const { return z - q_u * (q_u.transpose() * z); }
};

struct FrameOptions {
  Index r = 0;
  double lambda_reg = 1e-6;
  double eps_polar = 1e-12;
};

/// Fits the fixed decomposition from unpaired image rows x and text rows y.
/// Statistics are accumulated over rows in lexicographic order, so the
/// result does not depend on the order of either set.
Frame fit_frame(const EmbeddingSet& x_est, const EmbeddingSet& y_est, const FrameOptions& opts);

/// Returns the frame with q_u replaced by q_u R.
Frame mix(const Frame& frame, const MixingRotation& rotation);
Frame mix(const Frame& frame, const Mat& rotation);

struct PolarCoords {
  Vec rho;
  Vec theta;
  Vec v;
};

/// Row-batched polar coordinates: rho, theta are n x m, v is n x d.
struct PolarBatch {
  Mat rho;
  Mat theta;
  Mat v;

  Index n() const { return rho.rows(); }
  PolarCoords row(Index i) const {
    return {rho.row(i).transpose(), theta.row(i).transpose(), v.row(i).transpose()};
  }
};

PolarCoords to_polar(const Frame& frame, const Vec& z);
Vec from_polar(const Frame& frame, const PolarCoords& p);

PolarBatch to_polar_rows(const Frame& frame, const Mat& z);
Mat from_polar_rows(const Frame& frame, const PolarBatch& p);

/// Block coefficients c with c_k = rho_k (cos theta_k, sin theta_k).
Vec polar_to_coeffs(const Vec& rho, const Vec& theta);

/// Writes <stem>.bin (sections) and <stem>.json (scalars).
void save_frame(const Frame& frame, const std::filesystem::path& stem);
Frame load_frame(const std::filesystem::path& stem);

}  // namespace aniso
