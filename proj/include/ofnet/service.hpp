#pragma once

#include <filesystem>
#include <functional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "ofnet/bytes.hpp"
#include "ofnet/error.hpp"
#include "ofnet/keys.hpp"
#include "ofnet/report.hpp"
#include "ofnet/time.hpp"

/// In-memory report server: binary submit, JSON fetch, seven-day retention,
/// and the metadata correlation a server operator could run.
///
/// Submit body: 0x0F 0x8A 0xE0 || count (u8) || count * (key_id[32] || report[88]).
/// Fetch request:  {"search":[{"endDate":ms,"startDate":ms,"ids":["<b64 key id>",...]},...]}
/// Fetch response: {"results":[{"datePublished":ms,"payload":"<b64>","description":"found",
///                  "id":"<b64>","statusCode":0},...],"statusCode":"200"}
namespace ofnet::service {

using keys::KeyId;

inline constexpr ByteArray<3> kSubmitHeader{0x0F, 0x8A, 0xE0};
inline constexpr std::size_t kSubmitEntryBytes = 32 + report::kReportBytes;
inline constexpr std::size_t kMaxBatchEntries = 255;
inline constexpr Milliseconds kRetention = std::chrono::days{7};

struct SubmitEntry {
    KeyId key_id{};
    report::ReportBytes report{};

    friend bool operator==(const SubmitEntry&, const SubmitEntry&) = default;
};

enum class SubmitFailure { BadHeader, LengthMismatch };

class SubmitRejected : public Error {
public:
    explicit SubmitRejected(SubmitFailure reason)
        : Error(reason == SubmitFailure::BadHeader ? "submit rejected: bad header" : "submit rejected: length mismatch"),
          reason_(reason) {}
    SubmitFailure reason() const noexcept { return reason_; }

private:
    SubmitFailure reason_;
};

/// Throws RangeError for more than 255 entries.
Bytes encode_submit_batch(std::span<const SubmitEntry> entries);
std::vector<SubmitEntry> decode_submit_batch(ByteView body);

struct StoredReport {
    KeyId key_id{};
    report::ReportBytes payload{};
    std::int64_t date_published_ms = 0;
    std::string finder_id;
    int status_code = 0;

    friend bool operator==(const StoredReport&, const StoredReport&) = default;
};

struct FetchSearch {
    std::int64_t start_date_ms = 0;
    std::int64_t end_date_ms = 0;
    std::vector<KeyId> ids;
};

struct FetchRequest {
    std::vector<FetchSearch> searches;
    std::string owner_token;
};

std::string encode_fetch_request(const FetchRequest& request);

/// Throws FormatError on malformed JSON or a window with start > end.
FetchRequest decode_fetch_request(std::string_view body, std::string owner_token = {});

struct FetchResult {
    std::int64_t date_published_ms = 0;
    report::ReportBytes payload{};
    std::string description = "found";
    KeyId id{};
    int status_code = 0;
};

struct FetchResponse {
    std::vector<FetchResult> results;
    std::string status_code = "200";
};

std::string encode_fetch_response(const FetchResponse& response);
FetchResponse decode_fetch_response(std::string_view body);

struct HttpReply {
    int status = 200;
    std::string body;
};

/// Fetch metadata retained for correlation: who asked for which key, and when.
struct FetchRecord {
    std::string owner_token;
    KeyId key_id{};
    std::int64_t fetch_time_ms = 0;
};

struct CorrelationFinding {
    std::string owner_a;
    std::string owner_b;
    std::string finder_id;
    std::int64_t time_gap_s = 0;
    KeyId key_id_a{};
    KeyId key_id_b{};

    friend bool operator==(const CorrelationFinding&, const CorrelationFinding&) = default;
};

struct ServiceOptions {
    Milliseconds retention = kRetention;
    /// When false, owner identities are never stored (unauthenticated downloads).
    bool record_owner_tokens = true;
};

class ReportService {
public:
    explicit ReportService(ServiceOptions options = {}) : options_(options) {}

    ReportService(const ReportService&) = delete;
    ReportService& operator=(const ReportService&) = delete;

    /// Stores every entry of a well-formed batch or nothing. Throws SubmitRejected.
    std::size_t submit(ByteView body, const std::string& finder_id, TimePoint now);
    HttpReply handle_submit(ByteView body, const std::string& finder_id, TimePoint now);

    FetchResponse fetch(const FetchRequest& request, TimePoint now);
    HttpReply handle_fetch(std::string_view body, const std::string& owner_token, TimePoint now);

    std::size_t purge_expired(TimePoint now);

    /// Pairs of keys uploaded by one finder with report timestamps at most `window`
    /// apart, later fetched by two distinct owners. Sorted by finder, then time.
    std::vector<CorrelationFinding> correlate(Seconds window) const;

    std::vector<StoredReport> reports() const;
    std::vector<FetchRecord> fetch_log() const;
    std::size_t size() const;
    const ServiceOptions& options() const { return options_; }

    /// JSON lines of StoredReport with base64 key ids and payloads.
    void save_snapshot(const std::filesystem::path& destination) const;
    void load_snapshot(const std::filesystem::path& source);

private:
    ServiceOptions options_;
    mutable std::shared_mutex mutex_;
    std::vector<StoredReport> store_;
    std::vector<FetchRecord> fetch_log_;
};

/// Client-side view of a report server, in-process or remote.
class ReportEndpoint {
public:
    virtual ~ReportEndpoint() = default;
    virtual HttpReply submit(ByteView body, const std::string& finder_id) = 0;
    virtual HttpReply fetch(const std::string& body, const std::string& owner_token) = 0;
};

class InProcessEndpoint final : public ReportEndpoint {
public:
    InProcessEndpoint(ReportService& service, std::function<TimePoint()> clock)
        : service_(service), clock_(std::move(clock)) {}

    HttpReply submit(ByteView body, const std::string& finder_id) override {
        return service_.handle_submit(body, finder_id, clock_());
    }
    HttpReply fetch(const std::string& body, const std::string& owner_token) override {
        return service_.handle_fetch(body, owner_token, clock_());
    }

private:
    ReportService& service_;
    std::function<TimePoint()> clock_;
};

}  // namespace ofnet::service
