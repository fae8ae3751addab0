#pragma once

#include "aniso/core.hpp"
#include "aniso/numerics.hpp"
#include "aniso/store.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace aniso {

/// First and second moments of one modality, estimated without pairing.
struct MomentStats {
  Vec mean;
  SymMatrix cov;

  static MomentStats of(const EmbeddingSet& set) { return {set.mean(), covariance(set, true)}; }
  double trace() const { return cov.trace(); }
};

enum class TransformKind { Identity, Centroid, Moment, Perm, Alpha, C3, ReAlign };

std::string to_string(TransformKind kind);
TransformKind transform_kind_from_string(const std::string& name);

struct TransformSpec {
  TransformKind kind = TransformKind::Identity;
  std::optional<double> alpha;        // Alpha
  std::optional<Index> rank;          // Alpha (K)
  std::optional<double> noise_sigma;  // C3
  std::optional<std::uint64_t> seed;  // Perm, C3

  /// InvalidInput when a required parameter is missing, out of range, or
  /// supplied to a kind that does not take it.
  void validate(Index d) const;
};

Mat t_id(const Mat& y);
Mat t_mu(const Mat& y, const Vec& mu_y, const Vec& mu_x);
/// mu_x + Sigma_x^{1/2} Sigma_y^{-1/2} (y - mu_y) with symmetric roots.
Mat t_sigma(const Mat& y, const MomentStats& stats_x, const MomentStats& stats_y);
/// Rows of x drawn without replacement by a seeded uniform permutation.
Mat t_perm(const Mat& y, const Mat& x, std::uint64_t seed);
/// Oracle interpolation y^x + alpha * P_K (x - y^x), P_K the top-K residual eigenspace.
Mat t_alpha(const PairedSet& pairs, double alpha, Index rank);
/// Norm(y - mu_y + mu_x + sigma * eps), eps drawn from a per-row stream.
Mat c3_align(const Mat& y, const Vec& mu_y, const Vec& mu_x, double noise_sigma, std::uint64_t seed);
/// Anchor, trace-scale by sqrt(trace_x / trace_y), re-anchor, normalize,
/// then remove the post-normalization centroid drift and renormalize.
Mat realign(const Mat& y, const Vec& mu_y, const Vec& mu_x, double trace_x, double trace_y);

/// Symmetric square root (power +1/2) or inverse root (power -1/2); eigenvalues
/// floored at floor_rel * trace / d. For the inverse root an eigenvalue below
/// the floor raises DegenerateCovariance.
Mat sym_power(const SymMatrix& m, double power, double floor_rel = 1e-10);

}  // namespace aniso
