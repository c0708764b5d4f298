#pragma once

#include <cstddef>

#include "ofnet/bytes.hpp"

namespace ofnet {

using Sha256Digest = ByteArray<32>;

Sha256Digest sha256(ByteView data);

/// ANSI X9.63 KDF with SHA-256: concatenation of SHA-256(secret || counter_be32 || info)
/// for counter = 1, 2, ... truncated to `length` bytes.
Bytes x963_kdf_sha256(ByteView secret, ByteView info, std::size_t length);

}  // namespace ofnet
