#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>
#include <vector>

namespace aniso::detail {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  for (std::uint8_t b : buf) out.push_back(b);
}

inline void put_magic(std::vector<std::uint8_t>& out, std::string_view magic) {
  for (char c : magic) out.push_back(static_cast<std::uint8_t>(c));
}

template <typename T>
T get_le(const std::vector<std::uint8_t>& in, std::size_t offset) {
  T v;
  std::memcpy(&v, in.data() + offset, sizeof(T));
  return v;
}

}  // namespace aniso::detail
