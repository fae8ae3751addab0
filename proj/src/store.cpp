#include "aniso/store.hpp"

#include "byte_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace aniso {

using detail::get_le;
using detail::put_le;
using detail::put_magic;

static_assert(std::endian::native == std::endian::little,
              "EMBD encoding assumes a little-endian host");

EmbeddingSet::EmbeddingSet(Mat data, std::string modality, bool normalized)
    : data_(std::move(data)), modality_(std::move(modality)), normalized_(normalized) {
  require(data_.allFinite(), Errc::InvalidInput, "embedding set contains non-finite entries");
  if (normalized_) {
    for (Index i = 0; i < data_.rows(); ++i) {
      const double nrm = data_.row(i).norm();
      require(std::abs(nrm - 1.0) <= 1e-6, Errc::InvalidInput,
              "row " + std::to_string(i) + " is not unit norm (" + std::to_string(nrm) + ")");
    }
  }
}

EmbeddingSet EmbeddingSet::select(const std::vector<Index>& rows) const {
  Mat out(static_cast<Index>(rows.size()), d());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = data_.row(rows[i]);
  return EmbeddingSet(std::move(out), modality_, normalized_);
}

PairedSet::PairedSet(EmbeddingSet x, EmbeddingSet y) : x_(std::move(x)), y_(std::move(y)) {
  require(x_.n() == y_.n() && x_.d() == y_.d(), Errc::PairMismatch,
          "paired sets need equal shapes (" + std::to_string(x_.n()) + "x" + std::to_string(x_.d()) +
              " vs " + std::to_string(y_.n()) + "x" + std::to_string(y_.d()) + ")");
}

std::vector<std::uint8_t> encode_embd(const Mat& data) {
  std::vector<std::uint8_t> out;
  const std::uint64_t n = static_cast<std::uint64_t>(data.rows());
  const std::uint32_t d = static_cast<std::uint32_t>(data.cols());
  out.reserve(kEmbdHeaderSize + n * d * 4);
  put_magic(out, "EMBD");
  put_le<std::uint32_t>(out, kEmbdVersion);
  put_le<std::uint64_t>(out, n);
  put_le<std::uint32_t>(out, d);
  put_le<std::uint8_t>(out, 0);
  for (int i = 0; i < 7; ++i) put_le<std::uint8_t>(out, 0);
  for (Index i = 0; i < data.rows(); ++i)
    for (Index j = 0; j < data.cols(); ++j) put_le<float>(out, static_cast<float>(data(i, j)));
  return out;
}

Mat decode_embd(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  require(bytes.size() >= kEmbdHeaderSize, Errc::FormatError, origin + ": truncated header");
  require(std::memcmp(bytes.data(), "EMBD", 4) == 0, Errc::FormatError, origin + ": bad magic");
  const auto version = get_le<std::uint32_t>(bytes, 4);
  require(version == kEmbdVersion, Errc::FormatError,
          origin + ": unsupported version " + std::to_string(version));
  const auto n = get_le<std::uint64_t>(bytes, 8);
  const auto d = get_le<std::uint32_t>(bytes, 16);
  const auto dtype = get_le<std::uint8_t>(bytes, 20);
  require(dtype == 0, Errc::FormatError, origin + ": unsupported dtype " + std::to_string(dtype));
  for (std::size_t i = 21; i < kEmbdHeaderSize; ++i)
    require(bytes[i] == 0, Errc::FormatError, origin + ": reserved bytes must be zero");
  require(d > 0, Errc::FormatError, origin + ": zero dimension");
  require(n <= (bytes.size() - kEmbdHeaderSize) / (4ULL * d), Errc::FormatError,
          origin + ": header/payload shape mismatch");
  const std::uint64_t expected = kEmbdHeaderSize + n * d * 4ULL;
  require(bytes.size() == expected, Errc::FormatError,
          origin + ": header says " + std::to_string(n) + "x" + std::to_string(d) + " (" +
              std::to_string(expected) + " bytes) but file has " + std::to_string(bytes.size()));
  Mat out(static_cast<Index>(n), static_cast<Index>(d));
  std::size_t off = kEmbdHeaderSize;
  for (Index i = 0; i < out.rows(); ++i) {
    for (Index j = 0; j < out.cols(); ++j) {
      const float v = get_le<float>(bytes, off);
      off += 4;
      require(std::isfinite(v), Errc::InvalidInput,
              origin + ": non-finite value at row " + std::to_string(i));
      out(i, j) = static_cast<double>(v);
    }
  }
  return out;
}

EmbeddingSet load(const std::filesystem::path& path, const std::string& modality, bool normalized) {
  Mat data = decode_embd(read_file(path), path.string());
  if (normalized) {
    // float32 storage: accept rows that were unit norm before rounding.
    for (Index i = 0; i < data.rows(); ++i) {
      const double nrm = data.row(i).norm();
      if (std::abs(nrm - 1.0) > 1e-6) normalized = false;
    }
  }
  return EmbeddingSet(std::move(data), modality, normalized);
}

void save(const EmbeddingSet& set, const std::filesystem::path& path) {
  write_file(path, encode_embd(set.data()));
}

nlohmann::json manifest_entry(const EmbeddingSet& set, const std::filesystem::path& path) {
  return {{"path", path.filename().string()},
          {"modality", set.modality()},
          {"n", set.n()},
          {"d", set.d()},
          {"normalized", set.normalized()},
          {"sha256", sha256_file(path)}};
}

Mat l2_normalize_rows(const Mat& rows) {
  Mat out = rows;
  for (Index i = 0; i < out.rows(); ++i) {
    const double nrm = out.row(i).norm();
    require(nrm >= 1e-12, Errc::DegenerateRow, "row " + std::to_string(i) + " has zero norm");
    out.row(i) /= nrm;
  }
  return out;
}

EmbeddingSet l2_normalize(const EmbeddingSet& set) {
  return EmbeddingSet(l2_normalize_rows(set.data()), set.modality(), true);
}

SplitResult split(const PairedSet& pairs, const SplitSpec& spec) {
  const Index n = pairs.n();
  require(n >= 2, Errc::InsufficientSamples, "split needs at least 2 pairs");
  require(spec.estimation_fraction > 0.0 && spec.estimation_fraction < 1.0, Errc::InvalidSplit,
          "estimation fraction must lie in (0, 1)");
  const Index n_est = static_cast<Index>(std::llround(spec.estimation_fraction * static_cast<double>(n)));
  require(n_est >= 1 && n_est <= n - 1, Errc::InvalidSplit,
          "fraction " + std::to_string(spec.estimation_fraction) + " on n=" + std::to_string(n) +
              " leaves an empty part");

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng = make_rng(spec.seed, 0x5117);
  // Fisher-Yates with an explicit draw so the permutation does not depend on
  // the standard library's shuffle implementation.
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  SplitResult out;
  out.estimation_rows.assign(perm.begin(), perm.begin() + n_est);
  out.heldout_rows.assign(perm.begin() + n_est, perm.end());
  out.estimation = pairs.select(out.estimation_rows);
  out.heldout = pairs.select(out.heldout_rows);
  return out;
}

std::pair<EmbeddingSet, EmbeddingSet> SplitResult::unpaired_estimation(std::uint64_t seed) const {
  auto shuffled = [&](Index n, std::uint64_t stream) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    Rng rng = make_rng(seed, stream);
    for (Index i = n - 1; i > 0; --i) {
      const Index j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    return idx;
  };
  return {estimation.x().select(shuffled(estimation.n(), 1)),
          estimation.y().select(shuffled(estimation.n(), 2))};
}

std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    fail(Errc::IoError, "sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), Errc::FormatError, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), Errc::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), Errc::IoError, "write failed for " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  require(static_cast<bool>(out), Errc::IoError, "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), Errc::IoError, "write failed for " + path.string());
}

}  // namespace aniso
