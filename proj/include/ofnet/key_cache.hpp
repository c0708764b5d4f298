#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ofnet/keys.hpp"

// Key cache: UTF-8 JSON lines, one advertisement key per line:
//   {"index":1,"d":"<b64 28>","x":"<b64 28>","key_id":"<b64 32>"}
namespace ofnet::keys {

void export_cache(const std::vector<AdvertisementKeyPair>& keys, std::ostream& out);
void export_cache(const std::vector<AdvertisementKeyPair>& keys, const std::filesystem::path& destination);

/// Errors name the offending line. Recomputes p from d and rejects records whose x or key_id disagree.
std::vector<AdvertisementKeyPair> import_cache(std::istream& in);
std::vector<AdvertisementKeyPair> import_cache(const std::filesystem::path& source);

// Master key file: a single JSON object {"d0","sk0","creation_time"}.
void save_master(const MasterBeaconKey& master, const std::filesystem::path& destination);
MasterBeaconKey load_master(const std::filesystem::path& source);

}  // namespace ofnet::keys
