#pragma once

#include <cstdint>

#include "ofnet/bytes.hpp"
#include "ofnet/entropy.hpp"
#include "ofnet/keys.hpp"
#include "ofnet/p224.hpp"

/// Finder location reports: ECIES over P-224 (ephemeral ECDH, X9.63 KDF,
/// AES-128-GCM) and the 88-byte binary report.
///
/// Report layout, big-endian:
///   0..3   timestamp, seconds since 2001-01-01T00:00:00Z
///   4      confidence
///   5..61  ephemeral public key, uncompressed (0x04 || X || Y)
///   62..71 ciphertext of the 10-byte location message
///   72..87 GCM tag
///
/// Location message: lat (i32, degrees * 1e7) || lon (i32) || accuracy (u8, meters) || status (u8).
namespace ofnet::report {

inline constexpr std::size_t kLocationBytes = 10;
inline constexpr std::size_t kReportBytes = 88;
inline constexpr std::size_t kTagBytes = 16;

struct LocationMessage {
    double latitude = 0.0;
    double longitude = 0.0;
    std::uint8_t accuracy = 0;
    std::uint8_t status = 0;

    friend bool operator==(const LocationMessage&, const LocationMessage&) = default;
};

using LocationBytes = ByteArray<kLocationBytes>;
using ReportBytes = ByteArray<kReportBytes>;

/// Throws RangeError when |lat| > 90 or |lon| > 180.
LocationBytes encode_location(const LocationMessage& msg);
LocationMessage decode_location(ByteView bytes);

struct EncryptedReport {
    std::uint32_t timestamp = 0;
    std::uint8_t confidence = 0;
    ByteArray<p224::kUncompressedBytes> ephemeral_key{};
    LocationBytes ciphertext{};
    ByteArray<kTagBytes> tag{};

    friend bool operator==(const EncryptedReport&, const EncryptedReport&) = default;
};

ReportBytes encode_report(const EncryptedReport& report);

/// Throws LengthMismatch unless exactly 88 bytes.
EncryptedReport decode_report(ByteView bytes);

struct SessionKeyMaterial {
    ByteArray<16> key{};
    ByteArray<16> iv{};
};

/// First 16 KDF bytes are the AES key, the last 16 the GCM IV.
SessionKeyMaterial derive_session(const p224::FieldBytes& shared_x, const keys::XCoordinate& advertised_x);

/// Finder side. The ephemeral scalar is drawn from `entropy` (see p224::random_scalar).
/// Throws InvalidPublicKey if `advertised_x` is not on the curve.
EncryptedReport encrypt_report(const keys::XCoordinate& advertised_x, const LocationMessage& msg,
                               std::uint32_t timestamp, EntropySource& entropy, std::uint8_t confidence = 0);

/// Owner side. Any failure (wrong key, tampering, unusable ephemeral key) is AuthenticationFailure.
LocationMessage decrypt_report(const p224::Scalar& d, const keys::XCoordinate& advertised_x,
                               const EncryptedReport& report);

/// Recomputes the advertised X coordinate from d.
LocationMessage decrypt_report(const p224::Scalar& d, const EncryptedReport& report);

inline LocationMessage decrypt_report(const keys::AdvertisementKeyPair& key, const EncryptedReport& report) {
    return decrypt_report(key.d, key.x_bytes, report);
}

}  // namespace ofnet::report
