#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "physkit/error.hpp"

namespace physkit::binio {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian targets are not supported");

template <class T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    std::array<unsigned char, sizeof(T)> swapped{};
    for (std::size_t i = 0; i < sizeof(T); ++i) swapped[i] = bytes[sizeof(T) - 1 - i];
    return std::bit_cast<T>(swapped);
  } else {
    return value;
  }
}

template <class T>
void write(std::ostream& out, T value) {
  const T le = to_little(value);
  out.write(reinterpret_cast<const char*>(&le), sizeof(T));
}

inline void write_magic(std::ostream& out, std::string_view magic) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

template <class T>
T read(std::istream& in, std::string_view what) {
  T raw{};
  in.read(reinterpret_cast<char*>(&raw), sizeof(T));
  if (!in) throw Error(Errc::malformed_header, "truncated " + std::string(what));
  return to_little(raw);
}

inline void expect_magic(std::istream& in, std::string_view magic) {
  std::string got(magic.size(), '\0');
  in.read(got.data(), static_cast<std::streamsize>(got.size()));
  if (!in || got != magic)
    throw Error(Errc::malformed_header, "expected magic '" + std::string(magic) + "'");
}

}  // namespace physkit::binio
