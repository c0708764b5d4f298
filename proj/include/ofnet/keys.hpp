#pragma once

#include <cstdint>
#include <vector>

#include "ofnet/bytes.hpp"
#include "ofnet/entropy.hpp"
#include "ofnet/p224.hpp"
#include "ofnet/time.hpp"

/// Master beacon key and the rolling advertisement key chain.
///
/// For i >= 1:
///   SK_i       = KDF(SK_{i-1}, "update", 32)
///   (u_i, v_i) = KDF(SK_i, "diversify", 72), split 36/36 and mapped into [1, q-1]
///   d_i        = d_0 * u_i + v_i  (mod q)
///   p_i        = d_i * G
/// Index 0 is the master itself and is never advertised.
namespace ofnet::keys {

using SymmetricKey = ByteArray<32>;
using KeyId = ByteArray<32>;
using XCoordinate = p224::FieldBytes;

inline constexpr Seconds kKeyWindow{900};

struct MasterBeaconKey {
    p224::Scalar d0;
    p224::Point p0;
    SymmetricKey sk0{};
    TimePoint creation_time{};  // start of the index-1 window
};

struct SymmetricRollingKey {
    std::uint64_t index = 0;
    SymmetricKey sk{};
};

struct AntiTrackingPair {
    p224::Scalar u;
    p224::Scalar v;
};

struct AdvertisementKeyPair {
    std::uint64_t index = 0;
    p224::Scalar d;
    p224::Point p;
    XCoordinate x_bytes{};
    KeyId key_id{};

    friend bool operator==(const AdvertisementKeyPair&, const AdvertisementKeyPair&) = default;
};

/// Key id of an advertised key: SHA-256 over the 28-byte X coordinate.
KeyId key_id_of(const XCoordinate& x);

MasterBeaconKey generate_master(EntropySource& entropy, TimePoint creation_time);

/// Rebuilds a master from stored secrets; recomputes p0.
MasterBeaconKey master_from_secrets(const p224::Scalar& d0, const SymmetricKey& sk0, TimePoint creation_time);

inline SymmetricRollingKey initial_symmetric(const MasterBeaconKey& m) { return {0, m.sk0}; }

SymmetricRollingKey roll_symmetric(const SymmetricRollingKey& prev);

AntiTrackingPair diversify(const SymmetricRollingKey& sk);

/// Splits 72 KDF bytes into (u, v) and maps each 36-byte half into [1, q-1].
AntiTrackingPair anti_tracking_from_bytes(ByteView kdf_output);

/// Throws DegenerateKey when d0*u + v vanishes modulo q.
AdvertisementKeyPair derive_pair(const MasterBeaconKey& master, const AntiTrackingPair& at, std::uint64_t index);

/// Pure function of (master, i); i >= 1.
AdvertisementKeyPair key_at(const MasterBeaconKey& master, std::uint64_t index);

/// Walks the chain forward one index at a time without recomputing from SK_0.
class KeyChain {
public:
    explicit KeyChain(const MasterBeaconKey& master) : master_(&master), sk_(initial_symmetric(master)) {}

    /// Key for index current()+1; advances the chain.
    AdvertisementKeyPair next();

    /// Advances to `index - 1` so that the following next() yields `index`.
    void seek(std::uint64_t index);
    std::uint64_t current() const { return sk_.index; }

private:
    const MasterBeaconKey* master_;
    SymmetricRollingKey sk_;
};

/// Advertisement index in effect at time t: floor((t - creation) / window) + 1.
/// Throws TimeBeforeCreation.
std::uint64_t window_index(const MasterBeaconKey& master, TimePoint t, Seconds window = kKeyWindow);

TimePoint window_start(const MasterBeaconKey& master, std::uint64_t index, Seconds window = kKeyWindow);

/// Keys of every window that intersects [t_start, t_end). A zero-length span
/// yields the single window containing t_start.
std::vector<AdvertisementKeyPair> keys_in_window(const MasterBeaconKey& master, TimePoint t_start, TimePoint t_end,
                                                 Seconds window = kKeyWindow);

}  // namespace ofnet::keys
