#include "ofnet/service.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <tuple>

namespace ofnet::service {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <std::size_t N>
ByteArray<N> b64_array(const json& v, const char* what) {
    if (!v.is_string()) throw FormatError(std::string(what) + " must be a base64 string");
    Bytes raw = base64_decode(v.get<std::string>());
    if (raw.size() != N) throw FormatError(std::string(what) + " has wrong length");
    return to_array<N>(raw);
}

std::int64_t get_ms(const json& obj, const char* name) {
    if (!obj.contains(name) || !obj[name].is_number_integer()) {
        throw FormatError(std::string("missing integer field '") + name + "'");
    }
    return obj[name].get<std::int64_t>();
}

std::uint32_t report_timestamp(const report::ReportBytes& payload) { return get_u32_be(payload.data()); }

}  // namespace

Bytes encode_submit_batch(std::span<const SubmitEntry> entries) {
    if (entries.size() > kMaxBatchEntries) throw RangeError("a submit batch carries at most 255 reports");
    Bytes body(kSubmitHeader.begin(), kSubmitHeader.end());
    body.reserve(4 + entries.size() * kSubmitEntryBytes);
    body.push_back(static_cast<std::uint8_t>(entries.size()));
    for (const auto& e : entries) {
        body.insert(body.end(), e.key_id.begin(), e.key_id.end());
        body.insert(body.end(), e.report.begin(), e.report.end());
    }
    return body;
}

std::vector<SubmitEntry> decode_submit_batch(ByteView body) {
    if (body.size() < 4 || !std::equal(kSubmitHeader.begin(), kSubmitHeader.end(), body.begin())) {
        throw SubmitRejected(SubmitFailure::BadHeader);
    }
    std::size_t count = body[3];
    if (body.size() != 4 + count * kSubmitEntryBytes) throw SubmitRejected(SubmitFailure::LengthMismatch);
    std::vector<SubmitEntry> entries(count);
    auto it = body.begin() + 4;
    for (auto& e : entries) {
        std::copy_n(it, 32, e.key_id.begin());
        std::copy_n(it + 32, report::kReportBytes, e.report.begin());
        it += kSubmitEntryBytes;
    }
    return entries;
}

std::string encode_fetch_request(const FetchRequest& request) {
    ordered_json searches = ordered_json::array();
    for (const auto& s : request.searches) {
        ordered_json ids = ordered_json::array();
        for (const auto& id : s.ids) ids.push_back(base64_encode(id));
        searches.push_back({{"endDate", s.end_date_ms}, {"startDate", s.start_date_ms}, {"ids", ids}});
    }
    return ordered_json{{"search", searches}}.dump();
}

FetchRequest decode_fetch_request(std::string_view body, std::string owner_token) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw FormatError("fetch body is not a JSON object");
    if (!doc.contains("search") || !doc["search"].is_array()) throw FormatError("fetch body lacks a 'search' array");
    FetchRequest request;
    request.owner_token = std::move(owner_token);
    for (const auto& s : doc["search"]) {
        if (!s.is_object()) throw FormatError("search entry is not an object");
        FetchSearch search;
        search.start_date_ms = get_ms(s, "startDate");
        search.end_date_ms = get_ms(s, "endDate");
        if (search.start_date_ms > search.end_date_ms) throw FormatError("startDate after endDate");
        if (!s.contains("ids") || !s["ids"].is_array()) throw FormatError("search entry lacks 'ids'");
        for (const auto& id : s["ids"]) search.ids.push_back(b64_array<32>(id, "id"));
        request.searches.push_back(std::move(search));
    }
    return request;
}

std::string encode_fetch_response(const FetchResponse& response) {
    ordered_json results = ordered_json::array();
    for (const auto& r : response.results) {
        results.push_back({
            {"datePublished", r.date_published_ms},
            {"payload", base64_encode(r.payload)},
            {"description", r.description},
            {"id", base64_encode(r.id)},
            {"statusCode", r.status_code},
        });
    }
    return ordered_json{{"results", results}, {"statusCode", response.status_code}}.dump();
}

FetchResponse decode_fetch_response(std::string_view body) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("results") || !doc["results"].is_array()) {
        throw FormatError("malformed fetch response");
    }
    FetchResponse response;
    if (doc.contains("statusCode") && doc["statusCode"].is_string()) {
        response.status_code = doc["statusCode"].get<std::string>();
    }
    for (const auto& r : doc["results"]) {
        FetchResult result;
        result.date_published_ms = get_ms(r, "datePublished");
        result.payload = b64_array<report::kReportBytes>(r.value("payload", json()), "payload");
        result.id = b64_array<32>(r.value("id", json()), "id");
        result.description = r.value("description", std::string("found"));
        result.status_code = r.value("statusCode", 0);
        response.results.push_back(std::move(result));
    }
    return response;
}

std::size_t ReportService::submit(ByteView body, const std::string& finder_id, TimePoint now) {
    std::vector<SubmitEntry> entries = decode_submit_batch(body);
    std::unique_lock lock(mutex_);
    for (const auto& e : entries) {
        store_.push_back(StoredReport{e.key_id, e.report, to_unix_ms(now), finder_id, 0});
    }
    return entries.size();
}

HttpReply ReportService::handle_submit(ByteView body, const std::string& finder_id, TimePoint now) {
    try {
        submit(body, finder_id, now);
        return {200, R"({"statusCode":"200"})"};
    } catch (const SubmitRejected& e) {
        return {400, json{{"statusCode", "400"}, {"error", e.what()}}.dump()};
    }
}

FetchResponse ReportService::fetch(const FetchRequest& request, TimePoint now) {
    const std::int64_t now_ms = to_unix_ms(now);
    const std::int64_t oldest = now_ms - options_.retention.count();
    FetchResponse response;

    std::unique_lock lock(mutex_);
    // Overlapping windows are unioned; each stored report is returned once.
    std::set<std::size_t> hits;
    for (const auto& search : request.searches) {
        std::set<KeyId> wanted(search.ids.begin(), search.ids.end());
        for (std::size_t i = 0; i < store_.size(); ++i) {
            const auto& r = store_[i];
            if (r.date_published_ms < oldest) continue;
            if (r.date_published_ms < search.start_date_ms || r.date_published_ms > search.end_date_ms) continue;
            if (wanted.count(r.key_id)) hits.insert(i);
        }
        if (options_.record_owner_tokens && !request.owner_token.empty()) {
            for (const auto& id : search.ids) fetch_log_.push_back({request.owner_token, id, now_ms});
        }
    }
    for (std::size_t i : hits) {
        const auto& r = store_[i];
        response.results.push_back({r.date_published_ms, r.payload, "found", r.key_id, r.status_code});
    }
    return response;
}

HttpReply ReportService::handle_fetch(std::string_view body, const std::string& owner_token, TimePoint now) {
    FetchRequest request;
    try {
        request = decode_fetch_request(body, owner_token);
    } catch (const FormatError& e) {
        return {400, json{{"statusCode", "400"}, {"error", e.what()}}.dump()};
    }
    return {200, encode_fetch_response(fetch(request, now))};
}

std::size_t ReportService::purge_expired(TimePoint now) {
    const std::int64_t oldest = to_unix_ms(now) - options_.retention.count();
    std::unique_lock lock(mutex_);
    auto before = store_.size();
    std::erase_if(store_, [oldest](const StoredReport& r) { return r.date_published_ms < oldest; });
    return before - store_.size();
}

std::vector<CorrelationFinding> ReportService::correlate(Seconds window) const {
    std::vector<StoredReport> store;
    std::vector<FetchRecord> log;
    {
        std::shared_lock lock(mutex_);
        store = store_;
        log = fetch_log_;
    }

    struct Upload {
        std::int64_t report_time_s;
        std::int64_t published_ms;
    };
    // finder -> key id -> uploads
    std::map<std::string, std::map<KeyId, std::vector<Upload>>> by_finder;
    for (const auto& r : store) {
        by_finder[r.finder_id][r.key_id].push_back({report_timestamp(r.payload), r.date_published_ms});
    }

    // Owners who fetched `id` no earlier than `after_ms`.
    auto owners_of = [&log](const KeyId& id, std::int64_t after_ms) {
        std::set<std::string> owners;
        for (const auto& f : log)
            if (f.key_id == id && f.fetch_time_ms >= after_ms) owners.insert(f.owner_token);
        return owners;
    };

    struct Keyed {
        std::int64_t time;
        CorrelationFinding finding;
    };
    std::vector<Keyed> found;
    for (const auto& [finder, keys] : by_finder) {
        for (auto a = keys.begin(); a != keys.end(); ++a) {
            for (auto b = std::next(a); b != keys.end(); ++b) {
                std::int64_t best_gap = -1;
                std::int64_t pair_time = 0;
                for (const auto& ua : a->second) {
                    for (const auto& ub : b->second) {
                        std::int64_t gap = std::abs(ua.report_time_s - ub.report_time_s);
                        if (gap <= window.count() && (best_gap < 0 || gap < best_gap)) {
                            best_gap = gap;
                            pair_time = std::min(ua.report_time_s, ub.report_time_s);
                        }
                    }
                }
                if (best_gap < 0) continue;

                auto first_upload = [](const std::vector<Upload>& ups) {
                    std::int64_t m = ups.front().published_ms;
                    for (const auto& u : ups) m = std::min(m, u.published_ms);
                    return m;
                };
                auto owners_a = owners_of(a->first, first_upload(a->second));
                auto owners_b = owners_of(b->first, first_upload(b->second));
                std::set<std::pair<std::string, std::string>> seen;
                for (const auto& oa : owners_a) {
                    for (const auto& ob : owners_b) {
                        if (oa == ob) continue;
                        auto unordered = std::minmax(oa, ob);
                        if (!seen.emplace(unordered.first, unordered.second).second) continue;
                        found.push_back({pair_time, {oa, ob, finder, best_gap, a->first, b->first}});
                    }
                }
            }
        }
    }

    std::sort(found.begin(), found.end(), [](const Keyed& l, const Keyed& r) {
        return std::tie(l.finding.finder_id, l.time, l.finding.key_id_a, l.finding.key_id_b, l.finding.owner_a,
                        l.finding.owner_b) < std::tie(r.finding.finder_id, r.time, r.finding.key_id_a,
                                                      r.finding.key_id_b, r.finding.owner_a, r.finding.owner_b);
    });
    std::vector<CorrelationFinding> out;
    out.reserve(found.size());
    for (auto& k : found) out.push_back(std::move(k.finding));
    return out;
}

std::vector<StoredReport> ReportService::reports() const {
    std::shared_lock lock(mutex_);
    return store_;
}

std::vector<FetchRecord> ReportService::fetch_log() const {
    std::shared_lock lock(mutex_);
    return fetch_log_;
}

std::size_t ReportService::size() const {
    std::shared_lock lock(mutex_);
    return store_.size();
}

void ReportService::save_snapshot(const std::filesystem::path& destination) const {
    auto snapshot = reports();
    std::ofstream out(destination, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open snapshot " + destination.string());
    for (const auto& r : snapshot) {
        ordered_json line = {
            {"key_id", base64_encode(r.key_id)},        {"payload", base64_encode(r.payload)},
            {"date_published", r.date_published_ms},    {"finder_id", r.finder_id},
            {"status_code", r.status_code},
        };
        out << line.dump() << '\n';
    }
}

void ReportService::load_snapshot(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw Error("cannot open snapshot " + source.string());
    std::vector<StoredReport> loaded;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        json doc = json::parse(text, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) throw FormatError("malformed snapshot record", line);
        try {
            StoredReport r;
            r.key_id = b64_array<32>(doc.value("key_id", json()), "key_id");
            r.payload = b64_array<report::kReportBytes>(doc.value("payload", json()), "payload");
            r.date_published_ms = get_ms(doc, "date_published");
            r.finder_id = doc.value("finder_id", std::string());
            r.status_code = doc.value("status_code", 0);
            loaded.push_back(std::move(r));
        } catch (const FormatError& e) {
            throw FormatError(e.what(), line);
        }
    }
    std::unique_lock lock(mutex_);
    store_.insert(store_.end(), loaded.begin(), loaded.end());
}

}  // namespace ofnet::service
