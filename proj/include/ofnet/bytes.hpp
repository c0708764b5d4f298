#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ofnet {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

template <std::size_t N>
using ByteArray = std::array<std::uint8_t, N>;

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string to_hex(ByteView data, char separator = '\0');
Bytes from_hex(std::string_view hex);

std::string base64_encode(ByteView data);

/// Strict standard-alphabet decoding. Throws FormatError on bad length,
/// characters outside the alphabet, or misplaced padding.
Bytes base64_decode(std::string_view text);

template <std::size_t N>
ByteArray<N> to_array(ByteView data) {
    ByteArray<N> out{};
    if (data.size() != N) {
        throw std::length_error("to_array: size mismatch");
    }
    std::copy(data.begin(), data.end(), out.begin());
    return out;
}

inline void put_u32_be(std::uint8_t* out, std::uint32_t v) {
    out[0] = static_cast<std::uint8_t>(v >> 24);
    out[1] = static_cast<std::uint8_t>(v >> 16);
    out[2] = static_cast<std::uint8_t>(v >> 8);
    out[3] = static_cast<std::uint8_t>(v);
}

inline std::uint32_t get_u32_be(const std::uint8_t* in) {
    return (std::uint32_t{in[0]} << 24) | (std::uint32_t{in[1]} << 16) | (std::uint32_t{in[2]} << 8) |
           std::uint32_t{in[3]};
}

}  // namespace ofnet
