#include "ofnet/keys.hpp"

#include "ofnet/error.hpp"
#include "ofnet/kdf.hpp"

namespace ofnet::keys {

KeyId key_id_of(const XCoordinate& x) { return sha256(x); }

MasterBeaconKey generate_master(EntropySource& entropy, TimePoint creation_time) {
    MasterBeaconKey m;
    m.d0 = p224::random_scalar(entropy);
    m.p0 = p224::mul_base(m.d0);
    entropy.fill(m.sk0);
    m.creation_time = creation_time;
    return m;
}

MasterBeaconKey master_from_secrets(const p224::Scalar& d0, const SymmetricKey& sk0, TimePoint creation_time) {
    return MasterBeaconKey{d0, p224::mul_base(d0), sk0, creation_time};
}

SymmetricRollingKey roll_symmetric(const SymmetricRollingKey& prev) {
    Bytes next = x963_kdf_sha256(prev.sk, as_bytes("update"), 32);
    return {prev.index + 1, to_array<32>(next)};
}

AntiTrackingPair anti_tracking_from_bytes(ByteView kdf_output) {
    if (kdf_output.size() != 72) throw LengthMismatch("anti-tracking material", 72, kdf_output.size());
    return {p224::reduce_nonzero(kdf_output.first(36)), p224::reduce_nonzero(kdf_output.subspan(36))};
}

AntiTrackingPair diversify(const SymmetricRollingKey& sk) {
    Bytes raw = x963_kdf_sha256(sk.sk, as_bytes("diversify"), 72);
    return anti_tracking_from_bytes(raw);
}

AdvertisementKeyPair derive_pair(const MasterBeaconKey& master, const AntiTrackingPair& at, std::uint64_t index) {
    AdvertisementKeyPair k;
    k.index = index;
    k.d = p224::mul_add(master.d0, at.u, at.v);
    if (p224::is_zero(k.d)) throw DegenerateKey(index);
    k.p = p224::mul_base(k.d);
    k.x_bytes = k.p.x;
    k.key_id = key_id_of(k.x_bytes);
    return k;
}

AdvertisementKeyPair KeyChain::next() {
    sk_ = roll_symmetric(sk_);
    return derive_pair(*master_, diversify(sk_), sk_.index);
}

void KeyChain::seek(std::uint64_t index) {
    if (index == 0) throw RangeError("advertisement indices start at 1");
    if (index - 1 < sk_.index) sk_ = initial_symmetric(*master_);
    while (sk_.index < index - 1) sk_ = roll_symmetric(sk_);
}

AdvertisementKeyPair key_at(const MasterBeaconKey& master, std::uint64_t index) {
    KeyChain chain(master);
    chain.seek(index);
    return chain.next();
}

std::uint64_t window_index(const MasterBeaconKey& master, TimePoint t, Seconds window) {
    if (t < master.creation_time) throw TimeBeforeCreation("time precedes master key creation");
    auto elapsed = t - master.creation_time;
    return static_cast<std::uint64_t>(elapsed / std::chrono::duration_cast<Milliseconds>(window)) + 1;
}

TimePoint window_start(const MasterBeaconKey& master, std::uint64_t index, Seconds window) {
    if (index == 0) throw RangeError("advertisement indices start at 1");
    return master.creation_time + window * static_cast<std::int64_t>(index - 1);
}

std::vector<AdvertisementKeyPair> keys_in_window(const MasterBeaconKey& master, TimePoint t_start, TimePoint t_end,
                                                 Seconds window) {
    if (t_end < t_start) throw RangeError("window end precedes start");
    std::uint64_t first = window_index(master, t_start, window);
    std::uint64_t last = t_end == t_start ? first : window_index(master, t_end - Milliseconds{1}, window);

    std::vector<AdvertisementKeyPair> out;
    out.reserve(last - first + 1);
    KeyChain chain(master);
    chain.seek(first);
    for (std::uint64_t i = first; i <= last; ++i) out.push_back(chain.next());
    return out;
}

}  // namespace ofnet::keys
