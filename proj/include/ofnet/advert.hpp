#pragma once

#include <cstdint>
#include <string>

#include "ofnet/bytes.hpp"
#include "ofnet/error.hpp"
#include "ofnet/keys.hpp"

/// 37-byte offline-finding BLE advertisement: a 6-byte random address followed
/// by 31 bytes of manufacturer-specific data. Offsets below count from the
/// first address byte.
///
///   0..5   address = (x[0] | 0xC0) || x[1..5]
///   6      payload length (30)
///   7      AD type, manufacturer specific (0xFF)
///   8..9   company id 0x004C, little-endian
///   10     offline-finding type (0x12)
///   11     offline-finding data length (25)
///   12     status
///   13..34 x[6..27]
///   35     x[0] >> 6
///   36     hint
namespace ofnet::advert {

inline constexpr std::size_t kFrameBytes = 37;
inline constexpr std::size_t kAddressBytes = 6;
inline constexpr std::uint8_t kPayloadLength = 30;
inline constexpr std::uint8_t kManufacturerSpecific = 0xFF;
inline constexpr std::uint16_t kCompanyId = 0x004C;
inline constexpr std::uint8_t kOfflineFindingType = 0x12;
inline constexpr std::uint8_t kOfflineFindingLength = 25;

struct BleFrame {
    ByteArray<kFrameBytes> bytes{};

    ByteView address() const { return ByteView(bytes).first(kAddressBytes); }
    ByteView payload() const { return ByteView(bytes).subspan(kAddressBytes); }

    static BleFrame from_bytes(ByteView raw);

    friend bool operator==(const BleFrame&, const BleFrame&) = default;
};

struct AdvertPayloadFields {
    std::uint8_t status = 0;
    std::uint8_t hint = 0x00;
    keys::XCoordinate x_bytes{};

    friend bool operator==(const AdvertPayloadFields&, const AdvertPayloadFields&) = default;
};

enum class FrameField {
    AddressPrefix,
    PayloadLength,
    AdvertisementType,
    CompanyId,
    OfflineFindingType,
    OfflineFindingLength,
    KeyBits,
};

const char* field_name(FrameField f);

class NotOfflineFinding : public Error {
public:
    explicit NotOfflineFinding(FrameField field)
        : Error(std::string("not an offline-finding advertisement: bad ") + field_name(field)), field_(field) {}
    FrameField field() const noexcept { return field_; }

private:
    FrameField field_;
};

BleFrame encode_advert(const AdvertPayloadFields& fields);

/// Throws NotOfflineFinding naming the first offending field.
AdvertPayloadFields decode_advert(const BleFrame& frame);

bool is_offline_finding(const BleFrame& frame) noexcept;

/// 37 space-separated uppercase hex bytes, address first.
std::string to_hex(const BleFrame& frame);

}  // namespace ofnet::advert
