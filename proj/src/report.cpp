#include "ofnet/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <memory>

#include "ofnet/error.hpp"
#include "ofnet/kdf.hpp"

namespace ofnet::report {
namespace {

constexpr double kFixedPointScale = 1e7;

void put_i32_be(std::uint8_t* out, std::int32_t v) { put_u32_be(out, static_cast<std::uint32_t>(v)); }
std::int32_t get_i32_be(const std::uint8_t* in) { return static_cast<std::int32_t>(get_u32_be(in)); }

struct CipherCtxFree {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxFree>;

CipherCtx new_gcm_ctx(const SessionKeyMaterial& s, bool encrypt) {
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) throw Error("EVP_CIPHER_CTX_new failed");
    int ok = encrypt ? EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr)
                     : EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr);
    ok = ok && EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(s.iv.size()), nullptr);
    ok = ok && (encrypt ? EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, s.key.data(), s.iv.data())
                        : EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, s.key.data(), s.iv.data()));
    if (!ok) throw Error("AES-GCM initialisation failed");
    return ctx;
}

}  // namespace

LocationBytes encode_location(const LocationMessage& msg) {
    if (!(std::abs(msg.latitude) <= 90.0) || !(std::abs(msg.longitude) <= 180.0)) {
        throw RangeError("coordinates out of range");
    }
    LocationBytes out{};
    put_i32_be(out.data(), static_cast<std::int32_t>(std::lround(msg.latitude * kFixedPointScale)));
    put_i32_be(out.data() + 4, static_cast<std::int32_t>(std::lround(msg.longitude * kFixedPointScale)));
    out[8] = msg.accuracy;
    out[9] = msg.status;
    return out;
}

LocationMessage decode_location(ByteView bytes) {
    if (bytes.size() != kLocationBytes) throw LengthMismatch("location message", kLocationBytes, bytes.size());
    LocationMessage msg;
    msg.latitude = get_i32_be(bytes.data()) / kFixedPointScale;
    msg.longitude = get_i32_be(bytes.data() + 4) / kFixedPointScale;
    msg.accuracy = bytes[8];
    msg.status = bytes[9];
    return msg;
}

ReportBytes encode_report(const EncryptedReport& r) {
    ReportBytes out{};
    auto it = out.begin();
    put_u32_be(out.data(), r.timestamp);
    it += 4;
    *it++ = r.confidence;
    it = std::copy(r.ephemeral_key.begin(), r.ephemeral_key.end(), it);
    it = std::copy(r.ciphertext.begin(), r.ciphertext.end(), it);
    std::copy(r.tag.begin(), r.tag.end(), it);
    return out;
}

EncryptedReport decode_report(ByteView bytes) {
    if (bytes.size() != kReportBytes) throw LengthMismatch("location report", kReportBytes, bytes.size());
    EncryptedReport r;
    r.timestamp = get_u32_be(bytes.data());
    r.confidence = bytes[4];
    auto it = bytes.begin() + 5;
    std::copy_n(it, r.ephemeral_key.size(), r.ephemeral_key.begin());
    it += r.ephemeral_key.size();
    std::copy_n(it, r.ciphertext.size(), r.ciphertext.begin());
    it += r.ciphertext.size();
    std::copy_n(it, r.tag.size(), r.tag.begin());
    return r;
}

SessionKeyMaterial derive_session(const p224::FieldBytes& shared_x, const keys::XCoordinate& advertised_x) {
    Bytes material = x963_kdf_sha256(shared_x, advertised_x, 32);
    SessionKeyMaterial s;
    std::copy_n(material.begin(), 16, s.key.begin());
    std::copy_n(material.begin() + 16, 16, s.iv.begin());
    return s;
}

EncryptedReport encrypt_report(const keys::XCoordinate& advertised_x, const LocationMessage& msg,
                               std::uint32_t timestamp, EntropySource& entropy, std::uint8_t confidence) {
    // Either lift of X gives the same shared X coordinate.
    p224::Point advertised = p224::lift_x(advertised_x);
    LocationBytes plaintext = encode_location(msg);

    p224::Scalar ephemeral = p224::random_scalar(entropy);
    p224::Point ephemeral_pub = p224::mul_base(ephemeral);
    p224::Point shared = p224::mul(ephemeral, advertised);
    SessionKeyMaterial session = derive_session(shared.x, advertised_x);

    EncryptedReport r;
    r.timestamp = timestamp;
    r.confidence = confidence;
    r.ephemeral_key = p224::encode_uncompressed(ephemeral_pub);

    CipherCtx ctx = new_gcm_ctx(session, true);
    int len = 0;
    int ok = EVP_EncryptUpdate(ctx.get(), r.ciphertext.data(), &len, plaintext.data(),
                               static_cast<int>(plaintext.size()));
    ok = ok && EVP_EncryptFinal_ex(ctx.get(), r.ciphertext.data() + len, &len);
    ok = ok && EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(r.tag.size()), r.tag.data());
    if (!ok) throw Error("AES-GCM encryption failed");
    return r;
}

LocationMessage decrypt_report(const p224::Scalar& d, const keys::XCoordinate& advertised_x,
                               const EncryptedReport& report) {
    LocationBytes plaintext{};
    try {
        p224::Point ephemeral = p224::decode_uncompressed(report.ephemeral_key);
        p224::Point shared = p224::mul(d, ephemeral);
        SessionKeyMaterial session = derive_session(shared.x, advertised_x);

        CipherCtx ctx = new_gcm_ctx(session, false);
        int len = 0;
        auto tag = report.tag;
        int ok = EVP_DecryptUpdate(ctx.get(), plaintext.data(), &len, report.ciphertext.data(),
                                   static_cast<int>(report.ciphertext.size()));
        ok = ok && EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(tag.size()), tag.data());
        ok = ok && EVP_DecryptFinal_ex(ctx.get(), plaintext.data() + len, &len) > 0;
        if (!ok) throw AuthenticationFailure();
    } catch (const InvalidPublicKey&) {
        throw AuthenticationFailure();
    } catch (const RangeError&) {
        throw AuthenticationFailure();
    }
    return decode_location(plaintext);
}

LocationMessage decrypt_report(const p224::Scalar& d, const EncryptedReport& report) {
    return decrypt_report(d, p224::mul_base(d).x, report);
}

}  // namespace ofnet::report
