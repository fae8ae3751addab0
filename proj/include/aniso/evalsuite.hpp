#pragma once

#include "aniso/core.hpp"
#include "aniso/store.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace aniso {

/// Exact k nearest neighbours under cosine similarity, self excluded. Ties go
/// to the smaller index. Row i of the result lists neighbours of query i, nearest first.
using NeighborLists = std::vector<std::vector<Index>>;
NeighborLists knn_self(const Mat& rows, Index k);

/// Mean y_i . z_i. PairMismatch on a shape mismatch.
double instance_consistency(const Mat& y, const Mat& z);

/// Pearson correlation of y_i . y_j against z_i . z_j over pair_count seeded
/// index pairs (i != j), or over every pair when n <= all_pairs_max_n.
/// DegenerateSpectrum when either side has zero variance.
struct RelativeGeometry {
  double psi = 0.0;
  Index pairs = 0;
};
RelativeGeometry relative_geometry(const Mat& y, const Mat& z, Index pair_count, std::uint64_t seed,
                                   Index all_pairs_max_n = 450);

/// Mean |N_k^Y(y_i) & N_k^Z(z_i)| / k. InvalidInput when n <= k.
double neighborhood_consistency(const Mat& y, const Mat& z, Index k);

/// Binary entropy in bits with H(0) = H(1) = 0.
double binary_entropy(double p);

/// Directional mixing scores on the pool X u Z, each side normalized by its
/// mean under `permutations` seeded relabelings of the same pool.
struct MixingScores {
  double m_z = 0.0;
  double m_x = 0.0;
  double raw_z = 0.0;
  double raw_x = 0.0;
  double baseline_z = 0.0;
  double baseline_x = 0.0;
};
MixingScores mixing_scores(const Mat& z, const Mat& x, Index k, Index permutations, std::uint64_t seed);

/// Residual spectrum of r_i = x_i - z_i. A zero residual is flagged and A_r is 1.
struct MethodResidual {
  double a_r = 1.0;
  bool degenerate = false;
  Vec spectrum;  // normalized eigenvalues, descending
};
MethodResidual method_residual(const Mat& x, const Mat& z);

/// ||mean(z) - mean(x)||.
double centroid_gap(const Mat& z, const Mat& x);
/// Mean cosine over all (y_i, x_j) pairs, i.e. mean(y) . mean(x) for unit rows.
double mean_cross_cosine(const Mat& y, const Mat& x);

struct EvalOptions {
  Index k = 20;
  Index pair_count = 100000;
  Index all_pairs_max_n = 450;
  Index permutations = 20;
  std::uint64_t seed = 0;
};

struct MetricReport {
  std::string method;
  Index n = 0;
  Index k = 20;
  double phi = 0.0;
  double psi = 0.0;
  Index pair_sample_size = 0;
  double omega_k = 0.0;
  double m_z = 0.0;
  double m_x = 0.0;
  double a_r_t = 1.0;
  bool residual_degenerate = false;
  double centroid_gap = 0.0;
  Vec residual_spectrum_t;

  nlohmann::ordered_json to_json() const;
  static MetricReport from_json(const nlohmann::json& j);
  static std::string csv_header();
  std::string csv_row() const;
  std::string spectrum_csv() const;
};

/// All metrics for (Y, Z = T(Y), X) on index-aligned held-out rows. Rows are
/// L2-normalized first. PairMismatch when the three sets disagree in shape.
MetricReport evaluate(const std::string& method, const Mat& y, const Mat& z, const Mat& x, const EvalOptions& opts);

}  // namespace aniso
