#pragma once

#include "aniso/core.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace aniso {

// Section container used for frame, score-net and refiner artifacts.
//
//   "ANSF" | u32 version=1 | u32 section_count | u32 reserved=0
//   per section: char name[32] | u8 dtype (0=f32, 1=f64) | 7 zero bytes |
//                u64 rows | u64 cols | u64 payload_offset
//   payloads: row-major little-endian values, in section order.

enum class SectionDtype : std::uint8_t { F32 = 0, F64 = 1 };

struct Section {
  std::string name;
  SectionDtype dtype = SectionDtype::F64;
  Mat values;
};

class SectionFile {
 public:
  void add(std::string name, const Mat& values, SectionDtype dtype = SectionDtype::F64);
  void add_vector(std::string name, const Vec& values, SectionDtype dtype = SectionDtype::F64) {
    add(std::move(name), Mat(values), dtype);
  }

  const Mat& get(const std::string& name) const;
  Vec get_vector(const std::string& name) const;
  bool has(const std::string& name) const;
  const std::vector<Section>& sections() const { return sections_; }

  std::vector<std::uint8_t> encode() const;
  static SectionFile decode(const std::vector<std::uint8_t>& bytes, const std::string& origin);

  void save(const std::filesystem::path& path) const;
  static SectionFile load(const std::filesystem::path& path);

 private:
  std::vector<Section> sections_;
};

/// Rounds every entry to the nearest float32, so an in-memory model equals
/// what a float32 artifact reloads to.
inline Mat round_to_f32(const Mat& m) {
  return m.unaryExpr([](double v) { return static_cast<double>(static_cast<float>(v)); });
}

}  // namespace aniso
