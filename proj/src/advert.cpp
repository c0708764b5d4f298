#include "ofnet/advert.hpp"

#include <algorithm>
#include <optional>

namespace ofnet::advert {

const char* field_name(FrameField f) {
    switch (f) {
        case FrameField::AddressPrefix: return "address prefix";
        case FrameField::PayloadLength: return "payload length";
        case FrameField::AdvertisementType: return "advertisement type";
        case FrameField::CompanyId: return "company id";
        case FrameField::OfflineFindingType: return "offline-finding type";
        case FrameField::OfflineFindingLength: return "offline-finding length";
        case FrameField::KeyBits: return "key bits";
    }
    return "unknown";
}

BleFrame BleFrame::from_bytes(ByteView raw) {
    if (raw.size() != kFrameBytes) throw LengthMismatch("BLE frame", kFrameBytes, raw.size());
    BleFrame f;
    std::copy(raw.begin(), raw.end(), f.bytes.begin());
    return f;
}

BleFrame encode_advert(const AdvertPayloadFields& fields) {
    const auto& x = fields.x_bytes;
    BleFrame frame;
    auto& b = frame.bytes;
    b[0] = static_cast<std::uint8_t>(x[0] | 0b1100'0000);
    std::copy(x.begin() + 1, x.begin() + 6, b.begin() + 1);
    b[6] = kPayloadLength;
    b[7] = kManufacturerSpecific;
    b[8] = static_cast<std::uint8_t>(kCompanyId & 0xFF);
    b[9] = static_cast<std::uint8_t>(kCompanyId >> 8);
    b[10] = kOfflineFindingType;
    b[11] = kOfflineFindingLength;
    b[12] = fields.status;
    std::copy(x.begin() + 6, x.end(), b.begin() + 13);
    b[35] = static_cast<std::uint8_t>(x[0] >> 6);
    b[36] = fields.hint;
    return frame;
}

namespace {

std::optional<FrameField> first_violation(const BleFrame& frame) {
    const auto& b = frame.bytes;
    if ((b[0] & 0b1100'0000) != 0b1100'0000) return FrameField::AddressPrefix;
    if (b[6] != kPayloadLength) return FrameField::PayloadLength;
    if (b[7] != kManufacturerSpecific) return FrameField::AdvertisementType;
    if (b[8] != (kCompanyId & 0xFF) || b[9] != (kCompanyId >> 8)) return FrameField::CompanyId;
    if (b[10] != kOfflineFindingType) return FrameField::OfflineFindingType;
    if (b[11] != kOfflineFindingLength) return FrameField::OfflineFindingLength;
    if (b[35] > 0b11) return FrameField::KeyBits;
    return std::nullopt;
}

}  // namespace

AdvertPayloadFields decode_advert(const BleFrame& frame) {
    if (auto bad = first_violation(frame)) throw NotOfflineFinding(*bad);
    const auto& b = frame.bytes;
    AdvertPayloadFields f;
    f.x_bytes[0] = static_cast<std::uint8_t>((b[35] << 6) | (b[0] & 0b0011'1111));
    std::copy(b.begin() + 1, b.begin() + 6, f.x_bytes.begin() + 1);
    std::copy(b.begin() + 13, b.begin() + 35, f.x_bytes.begin() + 6);
    f.status = b[12];
    f.hint = b[36];
    return f;
}

bool is_offline_finding(const BleFrame& frame) noexcept { return !first_violation(frame).has_value(); }

std::string to_hex(const BleFrame& frame) { return ofnet::to_hex(frame.bytes, ' '); }

}  // namespace ofnet::advert
