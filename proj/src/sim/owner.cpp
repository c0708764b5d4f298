#include <algorithm>
#include <map>

#include "ofnet/sim.hpp"

namespace ofnet::sim {

Retrieval owner_retrieve(const keys::MasterBeaconKey& master, TimePoint t_start, TimePoint t_end,
                         service::ReportEndpoint& endpoint, const std::string& owner_token,
                         std::optional<TimePoint> published_until, Seconds key_window) {
    if (t_end < t_start) throw RangeError("retrieval window ends before it starts");
    auto keys = keys::keys_in_window(master, t_start, t_end + Milliseconds{1}, key_window);

    std::map<keys::KeyId, const keys::AdvertisementKeyPair*> by_id;
    service::FetchSearch search;
    search.start_date_ms = to_unix_ms(t_start);
    search.end_date_ms = to_unix_ms(published_until.value_or(t_end + service::kRetention));
    for (const auto& k : keys) {
        by_id.emplace(k.key_id, &k);
        search.ids.push_back(k.key_id);
    }
    service::FetchRequest request;
    request.searches.push_back(std::move(search));

    auto reply = endpoint.fetch(service::encode_fetch_request(request), owner_token);
    if (reply.status != 200) throw Error("fetch failed with status " + std::to_string(reply.status));
    auto response = service::decode_fetch_response(reply.body);

    Retrieval out;
    for (const auto& r : response.results) {
        auto it = by_id.find(r.id);
        if (it == by_id.end()) {
            out.skipped.push_back("result for unrequested key id " + base64_encode(r.id));
            continue;
        }
        const auto& key = *it->second;
        try {
            auto encrypted = report::decode_report(r.payload);
            auto msg = report::decrypt_report(key, encrypted);
            out.reports.push_back({from_apple_seconds(encrypted.timestamp), msg, key.index, key.key_id,
                                   r.date_published_ms});
        } catch (const AuthenticationFailure&) {
            out.skipped.push_back("report for key index " + std::to_string(key.index) + " published at " +
                                  format_iso8601(from_unix_ms(r.date_published_ms)) + " failed authentication");
        }
    }
    std::stable_sort(out.reports.begin(), out.reports.end(), [](const RetrievedReport& a, const RetrievedReport& b) {
        return std::tie(a.time, a.date_published_ms, a.key_index) < std::tie(b.time, b.date_published_ms, b.key_index);
    });
    return out;
}

}  // namespace ofnet::sim
