#pragma once

#include "aniso/core.hpp"
#include "aniso/error.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace aniso {

/// Real symmetric matrix. Construction symmetrizes the input, so
/// entries(i, j) == entries(j, i) holds exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Mat& m);

  static SymMatrix identity(Index dim) { return SymMatrix(Mat::Identity(dim, dim)); }

  const Mat& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  double trace() const { return m_.trace(); }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Mat m_;
};

/// Full symmetric spectrum; values descending, column j of `vectors` pairs with values[j].
struct EigenDecomp {
  Vec values;
  Mat vectors;

  Index dim() const { return values.size(); }
  /// First q eigenvectors as a d x q block.
  Mat top(Index q) const { return vectors.leftCols(q); }
};

struct JacobiOptions {
  double rel_tol = 1e-10;
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigensolver. Converges when the off-diagonal Frobenius norm
/// falls below rel_tol * ||M||_F or after max_sweeps sweeps.
EigenDecomp sym_eig(const SymMatrix& m, const JacobiOptions& opts = {});

/// Population (1/n) second moment of the rows of `rows` (n x d), optionally
/// centered. Accumulates in double whatever the input scalar.
template <typename Derived>
SymMatrix covariance(const Eigen::MatrixBase<Derived>& rows, bool center) {
  const Index n = rows.rows();
  require(n >= 2, Errc::InsufficientSamples,
          "covariance needs at least 2 rows, got " + std::to_string(n));
  Mat z = rows.template cast<double>();
  if (center) z.rowwise() -= z.colwise().mean();
  Mat c = Mat::Zero(z.cols(), z.cols());
  c.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose(), 1.0 / static_cast<double>(n));
  Mat full = c.selfadjointView<Eigen::Lower>();
  return SymMatrix(full);
}

/// (1/n) sum_i (x_i - mean x)(y_i - mean y)^T for index-aligned row sets.
template <typename DerivedX, typename DerivedY>
Mat cross_covariance(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  require(x.rows() == y.rows() && x.cols() == y.cols(), Errc::PairMismatch,
          "cross covariance needs equal shapes");
  const Index n = x.rows();
  require(n >= 2, Errc::InsufficientSamples, "cross covariance needs at least 2 rows");
  Mat xc = x.template cast<double>();
  Mat yc = y.template cast<double>();
  xc.rowwise() -= xc.colwise().mean();
  yc.rowwise() -= yc.colwise().mean();
  return (xc.transpose() * yc) / static_cast<double>(n);
}

/// Empirical CDF with midpoint-rank knots: the i-th order statistic (0-based)
/// sits at u = (i + 0.5) / n, ties share the midpoint of their block.
/// Both directions interpolate linearly between knots and clamp outside.
class Ecdf {
 public:
  Ecdf() = default;
  explicit Ecdf(std::vector<double> values);

  double eval(double v) const;
  double inv(double u) const;

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }

 private:
  std::vector<double> sorted_;
  std::vector<double> knot_u_;  // u of each sorted value, ties merged to their midpoint
};

Ecdf ecdf_fit(std::span<const double> values);
inline double ecdf_eval(const Ecdf& f, double v) { return f.eval(v); }
inline double ecdf_inv(const Ecdf& f, double u) { return f.inv(u); }

/// Maps an angle onto [-pi, pi); wrap(pi) == -pi.
inline double wrap(double angle) {
  if (angle >= -kPi && angle < kPi) return angle;
  double r = std::fmod(angle + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  double out = r - kPi;
  // fmod can land exactly on +pi after the shift for inputs like -pi - tiny.
  if (out >= kPi) out -= kTwoPi;
  return out;
}

template <typename Derived>
auto wrap_all(const Eigen::MatrixBase<Derived>& angles) {
  return angles.unaryExpr([](double a) { return wrap(a); }).eval();
}

struct CircularMean {
  double magnitude = 0.0;
  double argument = 0.0;  // in [-pi, pi)
};

/// |E e^{i theta}| and arg E e^{i theta}.
CircularMean circular_mean(std::span<const double> angles);

/// Modified Gram-Schmidt on the columns of `a`. Throws InvalidInput when a
/// column is numerically dependent on the previous ones.
Mat orthonormalize_mgs(const Mat& a);

/// Rows sorted lexicographically (stable); used to make order-dependent
/// accumulations independent of input row order.
Mat rows_in_lexicographic_order(const Mat& data);

/// Orthonormal basis of a uniformly random q-dimensional subspace of R^d.
Mat haar_subspace(Index d, Index q, Rng& rng);

/// Largest |entry| of Q^T Q - I.
double gram_deviation(const Mat& q);

}  // namespace aniso
