#pragma once

#include "aniso/core.hpp"
#include "aniso/error.hpp"
#include "aniso/numerics.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace aniso {

/// n x d embeddings of one modality, one sample per row. Immutable after
/// construction; entries are finite and, when `normalized`, every row has
/// unit norm to 1e-6.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  EmbeddingSet(Mat data, std::string modality, bool normalized = false);

  const Mat& data() const { return data_; }
  Index n() const { return data_.rows(); }
  Index d() const { return data_.cols(); }
  const std::string& modality() const { return modality_; }
  bool normalized() const { return normalized_; }

  Vec mean() const { return data_.colwise().mean().transpose(); }
  /// Subset of rows in the given order.
  EmbeddingSet select(const std::vector<Index>& rows) const;

 private:
  Mat data_;
  std::string modality_;
  bool normalized_ = false;
};

/// Index-aligned pairs: row i of x corresponds to row i of y.
class PairedSet {
 public:
  PairedSet() = default;
  PairedSet(EmbeddingSet x, EmbeddingSet y);

  const EmbeddingSet& x() const { return x_; }
  const EmbeddingSet& y() const { return y_; }
  Index n() const { return x_.n(); }
  Index d() const { return x_.d(); }

  PairedSet select(const std::vector<Index>& rows) const {
    return PairedSet(x_.select(rows), y_.select(rows));
  }

 private:
  EmbeddingSet x_;
  EmbeddingSet y_;
};

inline SymMatrix covariance(const EmbeddingSet& set, bool center = true) {
  return covariance(set.data(), center);
}
inline Mat cross_covariance(const PairedSet& pairs) {
  return cross_covariance(pairs.x().data(), pairs.y().data());
}

// ---- EMBD binary format -------------------------------------------------
// "EMBD" | u32 version=1 | u64 n | u32 d | u8 dtype (0=f32) | 7 zero bytes |
// n*d little-endian float32, row-major.

inline constexpr std::uint32_t kEmbdVersion = 1;
inline constexpr std::size_t kEmbdHeaderSize = 28;

/// Serializes to the EMBD byte layout. Values are rounded to float32.
std::vector<std::uint8_t> encode_embd(const Mat& data);
/// Parses an EMBD byte buffer; FormatError on bad magic/version/size,
/// InvalidInput on non-finite payload.
Mat decode_embd(const std::vector<std::uint8_t>& bytes, const std::string& origin = "<buffer>");

EmbeddingSet load(const std::filesystem::path& path, const std::string& modality = "",
                  bool normalized = false);
void save(const EmbeddingSet& set, const std::filesystem::path& path);

/// { "path", "modality", "n", "d", "normalized", "sha256" } for a saved set.
nlohmann::json manifest_entry(const EmbeddingSet& set, const std::filesystem::path& path);

// ---- normalization and splitting ------------------------------------------

/// Row-wise unit normalization; DegenerateRow(index) when a row norm < 1e-12.
EmbeddingSet l2_normalize(const EmbeddingSet& set);
Mat l2_normalize_rows(const Mat& rows);

struct SplitSpec {
  double estimation_fraction = 0.5;
  std::uint64_t seed = 0;
};

struct SplitResult {
  PairedSet estimation;
  PairedSet heldout;
  std::vector<Index> estimation_rows;
  std::vector<Index> heldout_rows;

  /// Estimation side as two unpaired sets; each is independently row-shuffled
  /// so no pairing survives.
  std::pair<EmbeddingSet, EmbeddingSet> unpaired_estimation(std::uint64_t seed) const;
};

/// Deterministic shuffled partition. round(fraction * n) rows go to the
/// estimation part; InvalidSplit when either part would be empty.
SplitResult split(const PairedSet& pairs, const SplitSpec& spec);

// ---- hashing / small file helpers -----------------------------------------

std::string sha256_hex(const std::vector<std::uint8_t>& bytes);
std::string sha256_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace aniso
