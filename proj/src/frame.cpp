#include "aniso/frame.hpp"

#include "aniso/artifact_io.hpp"
#include "aniso/error.hpp"

#include "json.hpp"
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <numeric>

namespace aniso {

MixingRotation MixingRotation::identity(Index r) { return {r, Vec::Zero(param_count(r))}; }

Mat MixingRotation::skew_matrix() const {
  require(skew_params.size() == param_count(r), Errc::InvalidInput, "skew parameter count mismatch");
  Mat s = Mat::Zero(r, r);
  Index p = 0;
  for (Index i = 0; i < r; ++i) {
    for (Index j = i + 1; j < r; ++j) {
      s(i, j) = skew_params[p];
      s(j, i) = -skew_params[p];
      ++p;
    }
  }
  return s;
}

Mat MixingRotation::matrix() const {
  if (skew_params.size() > 0 && skew_params.isZero(0.0)) return Mat::Identity(r, r);
  return skew_matrix().exp();
}

Vec skew_gradient(const MixingRotation& rotation, const Mat& grad_r) {
  const Index r = rotation.r;
  require(grad_r.rows() == r && grad_r.cols() == r, Errc::InvalidInput, "gradient shape mismatch");
  const Mat st = rotation.skew_matrix().transpose();
  Mat block = Mat::Zero(2 * r, 2 * r);
  block.topLeftCorner(r, r) = st;
  block.bottomRightCorner(r, r) = st;
  block.topRightCorner(r, r) = grad_r;
  const Mat frechet = block.exp().topRightCorner(r, r);
  Vec g(MixingRotation::param_count(r));
  Index p = 0;
  for (Index i = 0; i < r; ++i)
    for (Index j = i + 1; j < r; ++j) g[p++] = frechet(i, j) - frechet(j, i);
  return g;
}

namespace {

Vec population_std(const Mat& rows) {
  const Mat centered = rows.rowwise() - rows.colwise().mean();
  return (centered.colwise().squaredNorm() / static_cast<double>(rows.rows())).cwiseSqrt().transpose();
}

}  // namespace

Frame fit_frame(const EmbeddingSet& x_est, const EmbeddingSet& y_est, const FrameOptions& opts) {
  require(x_est.d() == y_est.d(), Errc::InvalidInput, "fit_frame: dimension mismatch");
  const Index d = x_est.d();
  require(opts.r >= 2 && opts.r <= d && opts.r % 2 == 0, Errc::InvalidInput,
          "fit_frame: r must be even with 2 <= r <= d, got " + std::to_string(opts.r));
  require(opts.eps_polar > 0.0, Errc::InvalidInput, "fit_frame: eps_polar must be positive");
  require(opts.lambda_reg >= 0.0, Errc::InvalidInput, "fit_frame: lambda_reg must be nonnegative");

  const Mat xs = rows_in_lexicographic_order(x_est.data());
  const Mat ys = rows_in_lexicographic_order(y_est.data());

  Frame f;
  f.d = d;
  f.r = opts.r;
  f.m = opts.r / 2;
  f.lambda_reg = opts.lambda_reg;
  f.eps_polar = opts.eps_polar;
  f.mu_t = ys.colwise().mean().transpose();
  f.mu_i = xs.colwise().mean().transpose();

  Mat joint = covariance(ys, true).matrix() + covariance(xs, true).matrix();
  joint.diagonal().array() += opts.lambda_reg;
  const EigenDecomp eig = sym_eig(SymMatrix(joint));
  f.eigen_basis = eig.top(opts.r);
  // Sign convention: largest-magnitude entry of each column is positive.
  for (Index j = 0; j < opts.r; ++j) {
    Index arg = 0;
    f.eigen_basis.col(j).cwiseAbs().maxCoeff(&arg);
    if (f.eigen_basis(arg, j) < 0.0) f.eigen_basis.col(j) *= -1.0;
  }
  f.rotation = Mat::Identity(opts.r, opts.r);
  f.q_u = f.eigen_basis;

  const Mat pu = f.q_u.transpose();
  const Mat yv = ys - (ys * f.q_u) * pu;
  const Mat xv = xs - (xs * f.q_u) * pu;
  f.v_stats.mu_t = yv.colwise().mean().transpose();
  f.v_stats.mu_i = xv.colwise().mean().transpose();
  f.v_stats.sigma_y = population_std(yv);
  f.v_stats.sigma_x = population_std(xv);
  return f;
}

Frame mix(const Frame& frame, const Mat& rotation) {
  require(rotation.rows() == frame.r && rotation.cols() == frame.r, Errc::InvalidInput,
          "mix: rotation must be r x r");
  Frame out = frame;
  out.rotation = frame.rotation * rotation;
  out.q_u = frame.q_u * rotation;
  return out;
}

Frame mix(const Frame& frame, const MixingRotation& rotation) {
  require(rotation.r == frame.r, Errc::InvalidInput, "mix: rotation dimension mismatch");
  return mix(frame, rotation.matrix());
}

PolarCoords to_polar(const Frame& frame, const Vec& z) {
  const Vec c = frame.q_u.transpose() * z;
  PolarCoords p{Vec(frame.m), Vec(frame.m), z - frame.q_u * c};
  for (Index k = 0; k < frame.m; ++k) {
    const double a = c[2 * k];
    const double b = c[2 * k + 1];
    p.rho[k] = std::sqrt(a * a + b * b + frame.eps_polar);
    p.theta[k] = wrap(std::atan2(b, a));
  }
  return p;
}

Vec polar_to_coeffs(const Vec& rho, const Vec& theta) {
  Vec c(2 * rho.size());
  for (Index k = 0; k < rho.size(); ++k) {
    c[2 * k] = rho[k] * std::cos(theta[k]);
    c[2 * k + 1] = rho[k] * std::sin(theta[k]);
  }
  return c;
}

Vec from_polar(const Frame& frame, const PolarCoords& p) {
  return frame.q_u * polar_to_coeffs(p.rho, p.theta) + p.v;
}

PolarBatch to_polar_rows(const Frame& frame, const Mat& z) {
  const Mat c = z * frame.q_u;
  PolarBatch p{Mat(z.rows(), frame.m), Mat(z.rows(), frame.m), z - c * frame.q_u.transpose()};
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index k = 0; k < frame.m; ++k) {
      const double a = c(i, 2 * k);
      const double b = c(i, 2 * k + 1);
      p.rho(i, k) = std::sqrt(a * a + b * b + frame.eps_polar);
      p.theta(i, k) = wrap(std::atan2(b, a));
    }
  }
  return p;
}

Mat from_polar_rows(const Frame& frame, const PolarBatch& p) {
  Mat c(p.n(), 2 * frame.m);
  for (Index i = 0; i < p.n(); ++i)
    c.row(i) = polar_to_coeffs(p.rho.row(i).transpose(), p.theta.row(i).transpose()).transpose();
  return c * frame.q_u.transpose() + p.v;
}

void save_frame(const Frame& frame, const std::filesystem::path& stem) {
  SectionFile file;
  file.add("eigen_basis", frame.eigen_basis);
  file.add("rotation", frame.rotation);
  file.add("q_u", frame.q_u);
  file.add_vector("mu_t", frame.mu_t);
  file.add_vector("mu_i", frame.mu_i);
  file.add_vector("v_mu_t", frame.v_stats.mu_t);
  file.add_vector("v_mu_i", frame.v_stats.mu_i);
  file.add_vector("v_sigma_y", frame.v_stats.sigma_y);
  file.add_vector("v_sigma_x", frame.v_stats.sigma_x);
  const auto bin = std::filesystem::path(stem.string() + ".bin");
  const auto bytes = file.encode();
  write_file(bin, bytes);
  nlohmann::ordered_json j;
  j["d"] = frame.d;
  j["r"] = frame.r;
  j["m"] = frame.m;
  j["lambda_reg"] = frame.lambda_reg;
  j["eps_polar"] = frame.eps_polar;
  j["sections"] = bin.filename().string();
  j["sha256"] = sha256_hex(bytes);
  write_text(stem.string() + ".json", j.dump(2) + "\n");
}

Frame load_frame(const std::filesystem::path& stem) {
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
  Frame f;
  f.d = j.at("d").get<Index>();
  f.r = j.at("r").get<Index>();
  f.m = j.at("m").get<Index>();
  f.lambda_reg = j.at("lambda_reg").get<double>();
  f.eps_polar = j.at("eps_polar").get<double>();
  f.eigen_basis = file.get("eigen_basis");
  f.rotation = file.get("rotation");
  f.q_u = file.get("q_u");
  f.mu_t = file.get_vector("mu_t");
  f.mu_i = file.get_vector("mu_i");
  f.v_stats = {file.get_vector("v_mu_t"), file.get_vector("v_mu_i"), file.get_vector("v_sigma_y"),
               file.get_vector("v_sigma_x")};
  require(f.q_u.rows() == f.d && f.q_u.cols() == f.r && f.r == 2 * f.m, Errc::FormatError,
          stem.string() + ": inconsistent frame shape");
  require(gram_deviation(f.q_u) <= 1e-8, Errc::InvalidFrame, stem.string() + ": q_u not orthonormal");
  return f;
}

}  // namespace aniso
