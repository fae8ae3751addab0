#include "aniso/transforms.hpp"

#include "aniso/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aniso {

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::Identity: return "id";
    case TransformKind::Centroid: return "mu";
    case TransformKind::Moment: return "sigma";
    case TransformKind::Perm: return "perm";
    case TransformKind::Alpha: return "alpha";
    case TransformKind::C3: return "c3";
    case TransformKind::ReAlign: return "realign";
  }
  return "unknown";
}

TransformKind transform_kind_from_string(const std::string& name) {
  if (name == "id" || name == "identity") return TransformKind::Identity;
  if (name == "mu" || name == "centroid") return TransformKind::Centroid;
  if (name == "sigma" || name == "moment") return TransformKind::Moment;
  if (name == "perm") return TransformKind::Perm;
  if (name == "alpha") return TransformKind::Alpha;
  if (name == "c3") return TransformKind::C3;
  if (name == "realign") return TransformKind::ReAlign;
  fail(Errc::InvalidConfig, "unknown transform kind '" + name + "'");
}

void TransformSpec::validate(Index d) const {
  const bool wants_alpha = kind == TransformKind::Alpha;
  const bool wants_sigma = kind == TransformKind::C3;
  const bool wants_seed = kind == TransformKind::Perm || kind == TransformKind::C3;
  require(alpha.has_value() == wants_alpha, Errc::InvalidInput, "alpha given iff kind is alpha");
  require(rank.has_value() == wants_alpha, Errc::InvalidInput, "rank K given iff kind is alpha");
  require(noise_sigma.has_value() == wants_sigma, Errc::InvalidInput, "noise_sigma given iff kind is c3");
  require(seed.has_value() == wants_seed, Errc::InvalidInput, "seed given iff kind is perm or c3");
  if (alpha) require(*alpha >= 0.0 && *alpha <= 1.0, Errc::InvalidInput, "alpha must lie in [0, 1]");
  if (rank) require(*rank >= 1 && *rank <= d, Errc::InvalidInput, "K must lie in [1, d]");
  if (noise_sigma) require(*noise_sigma >= 0.0, Errc::InvalidInput, "noise_sigma must be >= 0");
}

Mat sym_power(const SymMatrix& m, double power, double floor_rel) {
  const EigenDecomp e = sym_eig(m);
  const Index d = m.dim();
  const double floor = floor_rel * std::max(0.0, m.trace()) / static_cast<double>(d);
  Vec lam(d);
  for (Index j = 0; j < d; ++j) {
    double v = std::max(e.values(j), floor);
    if (power < 0.0) {
      require(e.values(j) >= floor && v > 0.0, Errc::DegenerateCovariance,
              "covariance is rank deficient beyond the eigenvalue floor");
    }
    lam(j) = std::pow(v, power);
  }
  return e.vectors * lam.asDiagonal() * e.vectors.transpose();
}

Mat t_id(const Mat& y) { return y; }

Mat t_mu(const Mat& y, const Vec& mu_y, const Vec& mu_x) {
  require(mu_y.size() == y.cols() && mu_x.size() == y.cols(), Errc::InvalidInput,
          "mean dimension does not match the embeddings");
  Mat z = y;
  z.rowwise() += (mu_x - mu_y).transpose();
  return z;
}

Mat t_sigma(const Mat& y, const MomentStats& stats_x, const MomentStats& stats_y) {
  const Index d = y.cols();
  require(stats_x.mean.size() == d && stats_y.mean.size() == d && stats_x.cov.dim() == d &&
              stats_y.cov.dim() == d,
          Errc::InvalidInput, "moment statistics dimension mismatch");
  const Mat map = sym_power(stats_x.cov, 0.5) * sym_power(stats_y.cov, -0.5);
  Mat centered = y;
  centered.rowwise() -= stats_y.mean.transpose();
  Mat z = centered * map.transpose();
  z.rowwise() += stats_x.mean.transpose();
  return z;
}

Mat t_perm(const Mat& y, const Mat& x, std::uint64_t seed) {
  require(x.rows() >= y.rows(), Errc::InsufficientSamples,
          "t_perm needs at least as many targets as sources");
  require(x.cols() == y.cols(), Errc::InvalidInput, "dimension mismatch");
  std::vector<Index> perm(static_cast<std::size_t>(x.rows()));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng = make_rng(seed, 0x9e41);
  for (Index i = x.rows() - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  Mat z(y.rows(), y.cols());
  for (Index i = 0; i < y.rows(); ++i) z.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
  return z;
}

Mat t_alpha(const PairedSet& pairs, double alpha, Index rank) {
  require(alpha >= 0.0 && alpha <= 1.0, Errc::InvalidInput, "alpha must lie in [0, 1]");
  require(rank >= 1 && rank <= pairs.d(), Errc::InvalidInput, "K must lie in [1, d]");
  const Mat& x = pairs.x().data();
  const Mat yx = t_mu(pairs.y().data(), pairs.y().mean(), pairs.x().mean());
  const Mat basis = sym_eig(residual_covariance(pairs)).top(rank);
  const Mat correction = ((x - yx) * basis) * basis.transpose();
  return yx + alpha * correction;
}

Mat c3_align(const Mat& y, const Vec& mu_y, const Vec& mu_x, double noise_sigma, std::uint64_t seed) {
  require(noise_sigma >= 0.0, Errc::InvalidInput, "noise_sigma must be >= 0");
  Mat z = t_mu(y, mu_y, mu_x);
  if (noise_sigma > 0.0) {
    parallel_for(z.rows(), [&](Index begin, Index end) {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Index i = begin; i < end; ++i) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(i));
        for (Index j = 0; j < z.cols(); ++j) z(i, j) += noise_sigma * normal(rng);
      }
    });
  }
  return l2_normalize_rows(z);
}

Mat realign(const Mat& y, const Vec& mu_y, const Vec& mu_x, double trace_x, double trace_y) {
  require(trace_y > 0.0, Errc::DegenerateCovariance, "ReAlign needs a positive source trace");
  require(trace_x >= 0.0, Errc::InvalidInput, "target trace must be non-negative");
  require(mu_y.size() == y.cols() && mu_x.size() == y.cols(), Errc::InvalidInput,
          "mean dimension does not match the embeddings");
  const double scale = std::sqrt(trace_x / trace_y);
  Mat z = y;
  z.rowwise() -= mu_y.transpose();
  z *= scale;
  z.rowwise() += mu_x.transpose();
  z = l2_normalize_rows(z);
  const Vec drift = z.colwise().mean().transpose();
  z.rowwise() += (mu_x - drift).transpose();
  return l2_normalize_rows(z);
}

}  // namespace aniso
