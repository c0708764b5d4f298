#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ofnet/geo/io.hpp"
#include "ofnet/key_cache.hpp"
#include "ofnet/sim.hpp"

namespace ofnet::sim {

Milliseconds UploadDelayModel::sample(std::mt19937_64& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    double z = normal(rng);
    double ms = static_cast<double>(median.count()) * std::exp(shape * z);
    return Milliseconds{std::llround(ms)};
}

const char* kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::AdvertEmitted: return "advert-emitted";
        case EventKind::AdvertRelayed: return "advert-relayed";
        case EventKind::AdvertReceived: return "advert-received";
        case EventKind::ReportGenerated: return "report-generated";
        case EventKind::BatchUploaded: return "batch-uploaded";
        case EventKind::FetchPerformed: return "fetch-performed";
    }
    return "unknown";
}

geo::Trace synthetic_walk(const geo::GeoPoint& origin, Seconds duration, double speed_mps, std::uint64_t seed,
                          Seconds step) {
    if (duration.count() <= 0 || step.count() <= 0 || !(speed_mps >= 0)) throw RangeError("invalid walk parameters");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> turn(-std::numbers::pi / 3, std::numbers::pi / 3);
    std::uniform_int_distribution<int> leg_steps(24, 72);

    geo::Trace trace{origin};
    double heading = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(rng);
    int until_turn = leg_steps(rng);
    const double stride = speed_mps * static_cast<double>(step.count());
    for (TimePoint t = origin.time + step; t <= origin.time + duration; t += step) {
        if (--until_turn == 0) {
            heading += turn(rng);
            until_turn = leg_steps(rng);
        }
        geo::GeoPoint next = geo::offset(trace.back(), stride * std::cos(heading), stride * std::sin(heading));
        next.time = t;
        trace.push_back(next);
    }
    return trace;
}

geo::Trace stationary(const geo::GeoPoint& where, TimePoint from, TimePoint to, Seconds step) {
    if (!(from < to) || step.count() <= 0) throw RangeError("invalid stationary span");
    geo::Trace trace;
    for (TimePoint t = from; t < to; t += step) trace.push_back({where.lat, where.lon, t});
    trace.push_back({where.lat, where.lon, to});
    return trace;
}

std::vector<FinderConfig> finders_along(const geo::Trace& route, std::size_t count, double max_offset_m,
                                        std::uint64_t seed, const std::string& prefix) {
    if (route.empty()) throw RangeError("empty route");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, route.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<FinderConfig> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const geo::GeoPoint& anchor = route[pick(rng)];
        double r = max_offset_m * std::sqrt(unit(rng));
        double theta = 2 * std::numbers::pi * unit(rng);
        geo::GeoPoint p = geo::offset(anchor, r * std::cos(theta), r * std::sin(theta));
        p.time = route.front().time;
        out.push_back({prefix + std::to_string(i + 1), {p}});
    }
    return out;
}

FinderConfig companion(const std::string& id, const geo::Trace& route, double north_m, double east_m) {
    FinderConfig f{id, {}};
    f.trace.reserve(route.size());
    for (const auto& p : route) f.trace.push_back(geo::offset(p, north_m, east_m));
    return f;
}

namespace {

using nlohmann::json;

geo::GeoPoint point_of(const json& j) { return {j.at("lat").get<double>(), j.at("lon").get<double>(), {}}; }

geo::Trace trace_of(const json& j, const std::filesystem::path& base) {
    if (j.contains("trace")) return geo::import_csv(base / j.at("trace").get<std::string>());
    if (j.contains("from") && j.contains("to")) {
        auto from = parse_iso8601(j.at("from").get<std::string>());
        auto to = parse_iso8601(j.at("to").get<std::string>());
        return stationary(point_of(j), from, to);
    }
    return {point_of(j)};
}

}  // namespace

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open scenario " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw FormatError("scenario is not a JSON object: " + path.string());
    const auto base = path.parent_path();

    ScenarioConfig c;
    try {
        c.ble_range_m = j.value("ble_range", c.ble_range_m);
        c.advert_interval = Seconds{j.value("advert_interval", c.advert_interval.count())};
        c.key_window = Seconds{j.value("key_window", c.key_window.count())};
        c.gps_noise_sigma_m = j.value("gps_noise_sigma", c.gps_noise_sigma_m);
        c.per_key_cap = j.value("per_key_cap", c.per_key_cap);
        c.drop_probability = j.value("drop_probability", c.drop_probability);
        c.rng_seed = j.value("rng_seed", c.rng_seed);
        c.service_options.record_owner_tokens = j.value("record_owner_tokens", true);
        if (j.contains("upload_delay")) {
            const auto& d = j.at("upload_delay");
            double minutes = d.value("median_minutes", 26.0);
            c.upload_delay.median = Milliseconds{std::llround(minutes * 60'000.0)};
            c.upload_delay.shape = d.value("shape", c.upload_delay.shape);
        }
        for (const auto& d : j.at("devices")) {
            LostDeviceConfig dev;
            dev.name = d.at("name").get<std::string>();
            dev.ground_truth = trace_of(d, base);
            dev.owner_token = d.value("owner_token", "");
            if (d.contains("master")) dev.master = keys::load_master(base / d.at("master").get<std::string>());
            c.devices.push_back(std::move(dev));
        }
        for (const auto& f : j.value("finders", json::array())) {
            c.finders.push_back({f.at("id").get<std::string>(), trace_of(f, base)});
        }
        for (const auto& r : j.value("relays", json::array())) {
            c.relays.push_back({point_of(r.at("capture")), point_of(r.at("replay")), Seconds{r.value("offset", 0)}});
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("scenario ") + path.string() + ": " + e.what());
    }
    return c;
}

std::string events_to_jsonl(const std::vector<SimEvent>& events) {
    std::ostringstream out;
    for (const auto& e : events) {
        nlohmann::ordered_json j;
        j["time"] = format_iso8601(e.time);
        j["seq"] = e.sequence;
        j["kind"] = kind_name(e.kind);
        if (!e.device.empty()) j["device"] = e.device;
        if (!e.finder.empty()) j["finder"] = e.finder;
        if (e.key_index) j["key_index"] = e.key_index;
        if (e.key_id != keys::KeyId{}) j["key_id"] = base64_encode(e.key_id);
        if (e.count) j["count"] = e.count;
        if (e.frame) j["frame"] = ofnet::to_hex(e.frame->bytes);
        if (e.position) j["position"] = {e.position->lat, e.position->lon};
        out << j.dump() << '\n';
    }
    return out.str();
}

}  // namespace ofnet::sim
