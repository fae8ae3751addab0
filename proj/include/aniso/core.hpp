#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace aniso {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = MatrixX<double>;
using Vec = VectorX<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

using Rng = std::mt19937_64;

/// splitmix64 finalizer; derives independent stream seeds from (seed, stream).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix_seed(seed, stream));
}

/// Matrix of iid standard normals, filled column by column from `rng`.
inline Mat gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  return out;
}

/// Worker cap shared by the parallel kernels (kNN, row-wise transforms).
/// 0 means "use ANISO_THREADS or hardware concurrency".
void set_thread_limit(unsigned threads);
unsigned thread_limit();

/// Runs fn(begin, end) over contiguous chunks of [0, n). Chunks are disjoint,
/// so results written by index are independent of the worker count.
void parallel_for(Index n, const std::function<void(Index, Index)>& fn, Index min_chunk = 64);

}  // namespace aniso
