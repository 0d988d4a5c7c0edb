#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <vector>
#include <string>
#include <string_view>
#include <type_traits>

#include "cgei/image.hpp"

// Little-endian primitives shared by the pattern and bucket containers.
namespace cgei::detail {

template <typename U>
void put_le(std::ostream& out, U value) {
  static_assert(std::is_unsigned_v<U>);
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i)
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFFu);
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
  static_assert(std::is_unsigned_v<U>);
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error("truncated binary container");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

inline void put_f32(std::ostream& out, float v) { put_le(out, std::bit_cast<std::uint32_t>(v)); }
inline float get_f32(std::istream& in) { return std::bit_cast<float>(get_le<std::uint32_t>(in)); }
inline void put_f32_block(std::ostream& out, std::span<const float> values) {
  std::vector<char> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(values[i]);
    for (std::size_t b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline void get_f32_block(std::istream& in, std::span<float> values) {
  std::vector<unsigned char> bytes(values.size() * 4);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw Error("truncated binary container");
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = 0;
    for (std::size_t b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    values[i] = std::bit_cast<float>(bits);
  }
}

inline void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
inline double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }
inline void put_i32(std::ostream& out, std::int32_t v) { put_le(out, static_cast<std::uint32_t>(v)); }
inline std::int32_t get_i32(std::istream& in) {
  return static_cast<std::int32_t>(get_le<std::uint32_t>(in));
}

inline void put_magic(std::ostream& out, std::string_view magic) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

inline void expect_magic(std::istream& in, std::string_view magic, const char* what) {
  std::array<char, 16> buf{};
  in.read(buf.data(), static_cast<std::streamsize>(magic.size()));
  if (!in || std::memcmp(buf.data(), magic.data(), magic.size()) != 0)
    throw Error(std::string("not a ") + what + " file");
}

}  // namespace cgei::detail
