#include "aniso/artifact_io.hpp"

#include "aniso/error.hpp"
#include "byte_io.hpp"
#include "aniso/store.hpp"

#include <cstring>

namespace aniso {

using detail::get_le;
using detail::put_le;
using detail::put_magic;

namespace {

constexpr std::size_t kNameBytes = 32;
constexpr std::size_t kEntryBytes = kNameBytes + 8 + 8 + 8 + 8;
constexpr std::size_t kHeaderBytes = 16;

std::size_t elem_size(SectionDtype t) { return t == SectionDtype::F32 ? 4 : 8; }

}  // namespace

void SectionFile::add(std::string name, const Mat& values, SectionDtype dtype) {
  require(name.size() < kNameBytes, Errc::InvalidInput, "section name too long: " + name);
  require(!has(name), Errc::InvalidInput, "duplicate section: " + name);
  sections_.push_back(Section{std::move(name), dtype, dtype == SectionDtype::F32 ? round_to_f32(values) : values});
}

bool SectionFile::has(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return true;
  return false;
}

const Mat& SectionFile::get(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return s.values;
  fail(Errc::FormatError, "missing section '" + name + "'");
}

Vec SectionFile::get_vector(const std::string& name) const {
  const Mat& m = get(name);
  require(m.cols() == 1, Errc::FormatError, "section '" + name + "' is not a vector");
  return m.col(0);
}

std::vector<std::uint8_t> SectionFile::encode() const {
  std::vector<std::uint8_t> out;
  put_magic(out, "ANSF");
  put_le<std::uint32_t>(out, 1);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(sections_.size()));
  put_le<std::uint32_t>(out, 0);
  std::uint64_t offset = kHeaderBytes + kEntryBytes * sections_.size();
  for (const auto& s : sections_) {
    char name[kNameBytes] = {};
    std::memcpy(name, s.name.data(), s.name.size());
    out.insert(out.end(), name, name + kNameBytes);
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(s.dtype));
    for (int i = 0; i < 7; ++i) put_le<std::uint8_t>(out, 0);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(s.values.rows()));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(s.values.cols()));
    put_le<std::uint64_t>(out, offset);
    offset += static_cast<std::uint64_t>(s.values.size()) * elem_size(s.dtype);
  }
  for (const auto& s : sections_) {
    for (Index i = 0; i < s.values.rows(); ++i) {
      for (Index j = 0; j < s.values.cols(); ++j) {
        if (s.dtype == SectionDtype::F32)
          put_le<float>(out, static_cast<float>(s.values(i, j)));
        else
          put_le<double>(out, s.values(i, j));
      }
    }
  }
  return out;
}

SectionFile SectionFile::decode(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  require(bytes.size() >= kHeaderBytes && std::memcmp(bytes.data(), "ANSF", 4) == 0, Errc::FormatError,
          origin + ": not a section file");
  require(get_le<std::uint32_t>(bytes, 4) == 1, Errc::FormatError, origin + ": unsupported version");
  const auto count = get_le<std::uint32_t>(bytes, 8);
  require(bytes.size() >= kHeaderBytes + kEntryBytes * count, Errc::FormatError,
          origin + ": truncated section table");
  SectionFile file;
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::size_t base = kHeaderBytes + kEntryBytes * k;
    const char* raw = reinterpret_cast<const char*>(bytes.data() + base);
    std::string name(raw, strnlen(raw, kNameBytes));
    const auto dtype_raw = get_le<std::uint8_t>(bytes, base + kNameBytes);
    require(dtype_raw <= 1, Errc::FormatError, origin + ": bad dtype in section " + name);
    const auto dtype = static_cast<SectionDtype>(dtype_raw);
    const auto rows = get_le<std::uint64_t>(bytes, base + kNameBytes + 8);
    const auto cols = get_le<std::uint64_t>(bytes, base + kNameBytes + 16);
    const auto offset = get_le<std::uint64_t>(bytes, base + kNameBytes + 24);
    const std::size_t es = elem_size(dtype);
    require(cols == 0 || rows <= bytes.size() / (cols * es), Errc::FormatError,
            origin + ": section " + name + " too large");
    require(offset + rows * cols * es <= bytes.size(), Errc::FormatError,
            origin + ": section " + name + " runs past end of file");
    Mat values(static_cast<Index>(rows), static_cast<Index>(cols));
    std::size_t off = offset;
    for (Index i = 0; i < values.rows(); ++i) {
      for (Index j = 0; j < values.cols(); ++j) {
        values(i, j) = dtype == SectionDtype::F32 ? static_cast<double>(get_le<float>(bytes, off))
                                                  : get_le<double>(bytes, off);
        off += es;
      }
    }
    file.sections_.push_back(Section{std::move(name), dtype, std::move(values)});
  }
  return file;
}

void SectionFile::save(const std::filesystem::path& path) const { write_file(path, encode()); }

SectionFile SectionFile::load(const std::filesystem::path& path) {
  return decode(read_file(path), path.string());
}

}  // namespace aniso
