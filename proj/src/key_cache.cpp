#include "ofnet/key_cache.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "ofnet/error.hpp"

namespace ofnet::keys {
namespace {

using nlohmann::json;

template <std::size_t N>
ByteArray<N> decode_field(const json& record, const char* name, std::size_t line) {
    if (!record.contains(name) || !record[name].is_string()) {
        throw FormatError(std::string("missing field '") + name + "'", line);
    }
    Bytes raw;
    try {
        raw = base64_decode(record[name].get<std::string>());
    } catch (const FormatError& e) {
        throw FormatError(std::string("field '") + name + "': " + e.what(), line);
    }
    if (raw.size() != N) {
        throw FormatError(std::string("field '") + name + "' has " + std::to_string(raw.size()) + " bytes, expected " +
                              std::to_string(N),
                          line);
    }
    return to_array<N>(raw);
}

}  // namespace

void export_cache(const std::vector<AdvertisementKeyPair>& keys, std::ostream& out) {
    if (keys.empty()) throw RangeError("refusing to export an empty key list");
    for (const auto& k : keys) {
        nlohmann::ordered_json record = {
            {"index", k.index},
            {"d", base64_encode(k.d.bytes)},
            {"x", base64_encode(k.x_bytes)},
            {"key_id", base64_encode(k.key_id)},
        };
        out << record.dump() << '\n';
    }
}

void export_cache(const std::vector<AdvertisementKeyPair>& keys, const std::filesystem::path& destination) {
    std::ostringstream buffer;
    export_cache(keys, buffer);
    // Whole-file replace so readers never observe a partial cache.
    auto tmp = destination;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << buffer.str();
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, destination);
}

std::vector<AdvertisementKeyPair> import_cache(std::istream& in) {
    std::vector<AdvertisementKeyPair> keys;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record = json::parse(text, nullptr, false);
        if (record.is_discarded() || !record.is_object()) throw FormatError("malformed JSON record", line);
        if (!record.contains("index") || !record["index"].is_number_unsigned()) {
            throw FormatError("missing or invalid 'index'", line);
        }
        AdvertisementKeyPair k;
        k.index = record["index"].get<std::uint64_t>();
        k.d.bytes = decode_field<28>(record, "d", line);
        k.x_bytes = decode_field<28>(record, "x", line);
        k.key_id = decode_field<32>(record, "key_id", line);
        if (p224::is_zero(k.d) || !p224::is_canonical(k.d)) throw FormatError("scalar 'd' out of range", line);
        k.p = p224::mul_base(k.d);
        if (k.p.x != k.x_bytes) throw FormatError("'x' does not match d*G", line);
        if (key_id_of(k.x_bytes) != k.key_id) throw FormatError("'key_id' does not match SHA-256(x)", line);
        keys.push_back(k);
    }
    return keys;
}

std::vector<AdvertisementKeyPair> import_cache(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw Error("cannot open key cache " + source.string());
    return import_cache(in);
}

void save_master(const MasterBeaconKey& master, const std::filesystem::path& destination) {
    nlohmann::ordered_json record = {
        {"d0", base64_encode(master.d0.bytes)},
        {"sk0", base64_encode(master.sk0)},
        {"creation_time", format_iso8601(master.creation_time)},
    };
    std::ofstream out(destination, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + destination.string() + " for writing");
    out << record.dump(2) << '\n';
}

MasterBeaconKey load_master(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw Error("cannot open master key file " + source.string());
    json record = json::parse(in, nullptr, false);
    if (record.is_discarded() || !record.is_object() || !record.contains("creation_time")) {
        throw FormatError("malformed master key file " + source.string());
    }
    p224::Scalar d0{decode_field<28>(record, "d0", 0)};
    auto sk0 = decode_field<32>(record, "sk0", 0);
    if (p224::is_zero(d0) || !p224::is_canonical(d0)) throw FormatError("master scalar out of range");
    return master_from_secrets(d0, sk0, parse_iso8601(record["creation_time"].get<std::string>()));
}

}  // namespace ofnet::keys
