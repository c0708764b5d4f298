#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ofnet/advert.hpp"
#include "ofnet/geo/trace.hpp"
#include "ofnet/keys.hpp"
#include "ofnet/report.hpp"
#include "ofnet/service.hpp"

/// Discrete-event simulation of lost devices, finders and owners in front of a
/// ReportService. Time is simulated; nothing reads the wall clock.
namespace ofnet::sim {

/// Log-normal delay between generating a report and uploading its batch.
struct UploadDelayModel {
    Milliseconds median = std::chrono::minutes{26};
    double shape = 1.0;  // sigma of the underlying normal

    Milliseconds sample(std::mt19937_64& rng) const;
};

struct LostDeviceConfig {
    std::string name;
    geo::Trace ground_truth;
    /// Token the owner presents when fetching; empty means the owner never fetches.
    std::string owner_token;
    /// Derived from the scenario seed when absent, created at the trace start.
    std::optional<keys::MasterBeaconKey> master;
};

/// A single-point trace is a static finder present for the whole run.
struct FinderConfig {
    std::string id;
    geo::Trace trace;
};

/// Re-emits every frame heard at `capture` unchanged at `replay` after `offset`.
struct RelayConfig {
    geo::GeoPoint capture;
    geo::GeoPoint replay;
    Seconds offset{0};
};

struct ScenarioConfig {
    std::vector<LostDeviceConfig> devices;
    std::vector<FinderConfig> finders;
    std::vector<RelayConfig> relays;
    double ble_range_m = 50.0;
    Seconds advert_interval{2};
    Seconds key_window = keys::kKeyWindow;
    double gps_noise_sigma_m = 0.0;
    UploadDelayModel upload_delay;
    unsigned per_key_cap = 4;
    double drop_probability = 0.0;
    std::uint64_t rng_seed = 1;
    service::ServiceOptions service_options;
};

enum class EventKind {
    AdvertEmitted,
    AdvertRelayed,
    AdvertReceived,
    ReportGenerated,
    BatchUploaded,
    FetchPerformed,
};

const char* kind_name(EventKind kind);

struct SimEvent {
    TimePoint time{};
    std::uint64_t sequence = 0;
    EventKind kind = EventKind::AdvertEmitted;
    std::string device;  // lost device, or owner token for fetches
    std::string finder;
    std::uint64_t key_index = 0;
    keys::KeyId key_id{};
    std::size_t count = 0;  // reports in an upload, results of a fetch
    std::optional<advert::BleFrame> frame;
    std::optional<geo::GeoPoint> position;  // emitter, or the finder's reported location

    friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

struct SimResult {
    std::vector<SimEvent> events;
    std::unique_ptr<service::ReportService> service;
    std::vector<keys::MasterBeaconKey> masters;  // per device, config order
    TimePoint start{};
    TimePoint end{};  // time of the last event
};

/// Throws FormatError for empty or non-increasing traces and RangeError for bad parameters.
SimResult run_scenario(const ScenarioConfig& config);

struct RetrievedReport {
    TimePoint time{};
    report::LocationMessage location;
    std::uint64_t key_index = 0;
    keys::KeyId key_id{};
    std::int64_t date_published_ms = 0;
};

struct Retrieval {
    std::vector<RetrievedReport> reports;  // sorted by time
    std::vector<std::string> skipped;      // one diagnostic per undecryptable report
};

/// Fetches every key of [t_start, t_end] by key id, decrypts with the matching
/// private key and returns the reports in time order. The fetch accepts uploads
/// published up to `published_until` (default t_end + retention).
Retrieval owner_retrieve(const keys::MasterBeaconKey& master, TimePoint t_start, TimePoint t_end,
                         service::ReportEndpoint& endpoint, const std::string& owner_token,
                         std::optional<TimePoint> published_until = std::nullopt,
                         Seconds key_window = keys::kKeyWindow);

/// run_scenario with one relay added.
SimResult run_relay_attack(const ScenarioConfig& config, const geo::GeoPoint& capture_site,
                           const geo::GeoPoint& replay_site, Seconds offset);

struct CorrelationDemo {
    SimResult run;
    std::vector<service::CorrelationFinding> findings;
};

/// Runs the scenario, lets every device owner with a token fetch its reports at
/// the end of the run, then asks the service to correlate uploads within `window`.
CorrelationDemo run_correlation_demo(const ScenarioConfig& config, Seconds window = keys::kKeyWindow);

/// Owner-fetch step of the demo, logged into `run.events`.
void owners_fetch(SimResult& run, const ScenarioConfig& config, TimePoint when);

// Scenario construction

/// Piecewise-linear walk at `speed_mps` starting at `origin`, turning by up to
/// 60 degrees every few minutes, sampled every `step`.
geo::Trace synthetic_walk(const geo::GeoPoint& origin, Seconds duration, double speed_mps, std::uint64_t seed,
                          Seconds step = Seconds{5});

/// A trace that stays at `where` from `from` to `to`, sampled every `step`.
geo::Trace stationary(const geo::GeoPoint& where, TimePoint from, TimePoint to, Seconds step = Seconds{60});

/// Static finders scattered within `max_offset_m` of points sampled along `route`.
std::vector<FinderConfig> finders_along(const geo::Trace& route, std::size_t count, double max_offset_m,
                                        std::uint64_t seed, const std::string& prefix = "finder-");

/// Finders that walk with the device at fixed offsets in meters.
FinderConfig companion(const std::string& id, const geo::Trace& route, double north_m, double east_m);

/// JSON scenario: ScenarioConfig fields with traces given as CSV paths relative to
/// the scenario file, or as a static point {"lat","lon"} with optional {"from","to"} ISO-8601 bounds.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// One JSON object per event.
std::string events_to_jsonl(const std::vector<SimEvent>& events);

}  // namespace ofnet::sim
