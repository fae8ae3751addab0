#include "aniso/numerics.hpp"

#include <Eigen/Jacobi>

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <thread>

namespace aniso {

namespace {
unsigned g_thread_limit = 0;
}

void set_thread_limit(unsigned threads) { g_thread_limit = threads; }

unsigned thread_limit() {
  if (g_thread_limit > 0) return g_thread_limit;
  if (const char* env = std::getenv("ANISO_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(Index n, const std::function<void(Index, Index)>& fn, Index min_chunk) {
  if (n <= 0) return;
  const Index workers =
      std::min<Index>(thread_limit(), std::max<Index>(1, (n + min_chunk - 1) / min_chunk));
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  const Index chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

SymMatrix::SymMatrix(const Mat& m) {
  require(m.rows() == m.cols(), Errc::InvalidInput, "symmetric matrix must be square");
  m_ = 0.5 * (m + m.transpose());
}

EigenDecomp sym_eig(const SymMatrix& m, const JacobiOptions& opts) {
  const Mat& src = m.matrix();
  require(src.allFinite(), Errc::InvalidInput, "sym_eig: non-finite entries");
  const Index d = src.rows();
  Mat a = src;
  Mat v = Mat::Identity(d, d);

  const double norm = a.norm();
  const double tol = opts.rel_tol * norm;
  auto off_norm = [&a, d] {
    double s = 0.0;
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < d; ++i)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  if (norm > 0.0) {
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
      if (off_norm() <= tol) break;
      for (Index p = 0; p < d - 1; ++p) {
        for (Index q = p + 1; q < d; ++q) {
          if (a(p, q) == 0.0) continue;
          Eigen::JacobiRotation<double> rot;
          rot.makeJacobi(a, p, q);
          a.applyOnTheLeft(p, q, rot.adjoint());
          a.applyOnTheRight(p, q, rot);
          v.applyOnTheRight(p, q, rot);
          a(p, q) = 0.0;
          a(q, p) = 0.0;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  Vec diag = a.diagonal();
  std::stable_sort(order.begin(), order.end(),
                   [&diag](Index i, Index j) { return diag(i) > diag(j); });

  EigenDecomp out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  for (Index k = 0; k < d; ++k) {
    out.values(k) = diag(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
  require(!sorted_.empty(), Errc::InsufficientSamples, "ECDF needs at least one value");
  for (double v : sorted_) require(std::isfinite(v), Errc::InvalidInput, "ECDF values must be finite");
  std::sort(sorted_.begin(), sorted_.end());
  const double n = static_cast<double>(sorted_.size());
  knot_u_.resize(sorted_.size());
  std::size_t i = 0;
  while (i < sorted_.size()) {
    std::size_t j = i;
    while (j + 1 < sorted_.size() && sorted_[j + 1] == sorted_[i]) ++j;
    // tied block [i, j]: midpoint rank of the block
    const double u = (0.5 * static_cast<double>(i + j) + 0.5) / n;
    for (std::size_t k = i; k <= j; ++k) knot_u_[k] = u;
    i = j + 1;
  }
}

double Ecdf::eval(double v) const {
  if (v <= sorted_.front()) return knot_u_.front();
  if (v >= sorted_.back()) return knot_u_.back();
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), v);
  const std::size_t hi = static_cast<std::size_t>(it - sorted_.begin());
  const std::size_t lo = hi - 1;
  if (sorted_[lo] == v) return knot_u_[lo];
  const double w = (v - sorted_[lo]) / (sorted_[hi] - sorted_[lo]);
  return knot_u_[lo] + w * (knot_u_[hi] - knot_u_[lo]);
}

double Ecdf::inv(double u) const {
  if (u <= knot_u_.front()) return sorted_.front();
  if (u >= knot_u_.back()) return sorted_.back();
  const auto it = std::upper_bound(knot_u_.begin(), knot_u_.end(), u);
  const std::size_t hi = static_cast<std::size_t>(it - knot_u_.begin());
  const std::size_t lo = hi - 1;
  if (knot_u_[lo] == u) return sorted_[lo];
  const double w = (u - knot_u_[lo]) / (knot_u_[hi] - knot_u_[lo]);
  return sorted_[lo] + w * (sorted_[hi] - sorted_[lo]);
}

Ecdf ecdf_fit(std::span<const double> values) {
  return Ecdf(std::vector<double>(values.begin(), values.end()));
}

CircularMean circular_mean(std::span<const double> angles) {
  require(!angles.empty(), Errc::InsufficientSamples, "circular mean of empty set");
  double c = 0.0, s = 0.0;
  for (double a : angles) {
    require(std::isfinite(a), Errc::InvalidInput, "circular mean: non-finite angle");
    c += std::cos(a);
    s += std::sin(a);
  }
  const double n = static_cast<double>(angles.size());
  c /= n;
  s /= n;
  return {std::min(1.0, std::hypot(c, s)), wrap(std::atan2(s, c))};
}

Mat orthonormalize_mgs(const Mat& a) {
  Mat q = a;
  for (Index j = 0; j < q.cols(); ++j) {
    for (Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    const double nrm = q.col(j).norm();
    require(nrm > 1e-12 * std::max(1.0, a.col(j).norm()), Errc::InvalidInput,
            "orthonormalize: dependent column " + std::to_string(j));
    q.col(j) /= nrm;
  }
  return q;
}

Mat haar_subspace(Index d, Index q, Rng& rng) {
  require(q >= 1 && q <= d, Errc::InvalidInput, "haar_subspace: need 1 <= q <= d");
  return orthonormalize_mgs(gaussian_matrix(d, q, rng));
}

double gram_deviation(const Mat& q) {
  return (q.transpose() * q - Mat::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

Mat rows_in_lexicographic_order(const Mat& data) {
  std::vector<Index> order(static_cast<std::size_t>(data.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index j = 0; j < data.cols(); ++j) {
      if (data(a, j) != data(b, j)) return data(a, j) < data(b, j);
    }
    return false;
  });
  Mat out(data.rows(), data.cols());
  for (Index i = 0; i < data.rows(); ++i) out.row(i) = data.row(order[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace aniso
