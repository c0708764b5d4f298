#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "ofnet/sim.hpp"

namespace ofnet::sim {
namespace {

std::optional<geo::GeoPoint> position_at(const geo::Trace& trace, TimePoint t) {
    if (trace.size() == 1) return geo::GeoPoint{trace.front().lat, trace.front().lon, t};
    if (t < trace.front().time || t > trace.back().time) return std::nullopt;
    auto hi = std::lower_bound(trace.begin(), trace.end(), t,
                               [](const geo::GeoPoint& p, TimePoint when) { return p.time < when; });
    if (hi->time == t) return geo::GeoPoint{hi->lat, hi->lon, t};
    auto lo = std::prev(hi);
    double w = static_cast<double>((t - lo->time).count()) / static_cast<double>((hi->time - lo->time).count());
    return geo::GeoPoint{lo->lat + w * (hi->lat - lo->lat), lo->lon + w * (hi->lon - lo->lon), t};
}

void validate(const ScenarioConfig& c) {
    if (c.devices.empty()) throw FormatError("scenario has no lost devices");
    for (const auto& d : c.devices) {
        if (d.ground_truth.empty()) throw FormatError("device " + d.name + " has an empty trace");
        geo::validate_trace(d.ground_truth);
    }
    for (const auto& f : c.finders) {
        if (f.trace.empty()) throw FormatError("finder " + f.id + " has an empty trace");
        geo::validate_trace(f.trace);
    }
    if (!(c.ble_range_m > 0)) throw RangeError("ble_range must be positive");
    if (c.advert_interval.count() <= 0) throw RangeError("advert_interval must be positive");
    if (c.key_window.count() <= 0) throw RangeError("key_window must be positive");
    if (!(c.gps_noise_sigma_m >= 0)) throw RangeError("gps_noise_sigma must be non-negative");
    if (!(c.drop_probability >= 0 && c.drop_probability <= 1)) throw RangeError("drop_probability must lie in [0, 1]");
    if (c.upload_delay.median.count() < 0 || !(c.upload_delay.shape >= 0)) throw RangeError("invalid upload delay");
    for (const auto& r : c.relays)
        if (r.offset.count() < 0) throw RangeError("relay offset must be non-negative");
}

enum class ActionKind { Emit, Relay, Upload };

struct Action {
    TimePoint time;
    std::uint64_t seq;
    ActionKind kind;
    std::size_t subject;  // device, relay or finder index
    std::size_t device = 0;
    std::uint64_t key_index = 0;
    advert::BleFrame frame{};
};

struct Later {
    bool operator()(const Action& a, const Action& b) const {
        return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
    }
};

class Simulator {
public:
    explicit Simulator(const ScenarioConfig& config)
        : c_(config),
          rng_(config.rng_seed),
          ephemeral_(config.rng_seed ^ 0x5DEECE66DULL),
          service_(std::make_unique<service::ReportService>(config.service_options)),
          endpoint_(*service_, [this] { return now_; }),
          pending_(config.finders.size()),
          scheduled_(config.finders.size(), false),
          current_key_(config.devices.size()) {
        for (std::size_t i = 0; i < c_.devices.size(); ++i) {
            const auto& d = c_.devices[i];
            if (d.master) {
                masters_.push_back(*d.master);
            } else {
                SeededEntropy seeded(c_.rng_seed * 0x9E3779B97F4A7C15ULL + i + 1);
                masters_.push_back(keys::generate_master(seeded, d.ground_truth.front().time));
            }
        }
    }

    SimResult run() {
        TimePoint start = c_.devices.front().ground_truth.front().time;
        for (std::size_t i = 0; i < c_.devices.size(); ++i) {
            start = std::min(start, c_.devices[i].ground_truth.front().time);
            push({c_.devices[i].ground_truth.front().time, 0, ActionKind::Emit, i});
        }
        TimePoint end = start;
        while (!queue_.empty()) {
            Action a = queue_.top();
            queue_.pop();
            now_ = a.time;
            end = a.time;
            switch (a.kind) {
                case ActionKind::Emit: emit(a); break;
                case ActionKind::Relay: relay(a); break;
                case ActionKind::Upload: upload(a); break;
            }
        }
        SimResult result;
        result.events = std::move(events_);
        result.service = std::move(service_);
        result.masters = std::move(masters_);
        result.start = start;
        result.end = end;
        return result;
    }

private:
    void push(Action a) {
        a.seq = next_action_++;
        queue_.push(std::move(a));
    }

    SimEvent& log(TimePoint t, EventKind kind) {
        SimEvent e;
        e.time = t;
        e.sequence = events_.size();
        e.kind = kind;
        events_.push_back(std::move(e));
        return events_.back();
    }

    const keys::AdvertisementKeyPair& key_for(std::size_t device, TimePoint t) {
        std::uint64_t index = keys::window_index(masters_[device], t, c_.key_window);
        auto& slot = current_key_[device];
        if (!slot || slot->index != index) slot = keys::key_at(masters_[device], index);
        return *slot;
    }

    void emit(const Action& a) {
        const auto& dev = c_.devices[a.subject];
        auto pos = position_at(dev.ground_truth, a.time);
        const auto& key = key_for(a.subject, a.time);
        advert::BleFrame frame = advert::encode_advert({0, 0, key.x_bytes});

        SimEvent& e = log(a.time, EventKind::AdvertEmitted);
        e.device = dev.name;
        e.key_index = key.index;
        e.key_id = key.key_id;
        e.frame = frame;
        e.position = pos;

        deliver(frame, *pos, a.time, a.subject, key.index);
        for (std::size_t r = 0; r < c_.relays.size(); ++r) {
            if (geo::distance(*pos, c_.relays[r].capture) <= c_.ble_range_m) {
                Action relay{a.time + c_.relays[r].offset, 0, ActionKind::Relay, r, a.subject, key.index, frame};
                push(std::move(relay));
            }
        }

        TimePoint next = a.time + c_.advert_interval;
        if (next < dev.ground_truth.back().time) push({next, 0, ActionKind::Emit, a.subject});
    }

    void relay(const Action& a) {
        geo::GeoPoint site = c_.relays[a.subject].replay;
        site.time = a.time;
        SimEvent& e = log(a.time, EventKind::AdvertRelayed);
        e.device = c_.devices[a.device].name;
        e.key_index = a.key_index;
        e.key_id = keys::key_id_of(advert::decode_advert(a.frame).x_bytes);
        e.frame = a.frame;
        e.position = site;
        deliver(a.frame, site, a.time, a.device, a.key_index);
    }

    void deliver(const advert::BleFrame& frame, const geo::GeoPoint& source, TimePoint t, std::size_t device,
                 std::uint64_t key_index) {
        std::bernoulli_distribution drop(c_.drop_probability);
        std::normal_distribution<double> noise(0.0, c_.gps_noise_sigma_m);
        for (std::size_t f = 0; f < c_.finders.size(); ++f) {
            auto here = position_at(c_.finders[f].trace, t);
            if (!here || geo::distance(*here, source) > c_.ble_range_m) continue;
            if (c_.drop_probability > 0 && drop(rng_)) continue;

            // The finder only sees the frame bytes.
            const keys::XCoordinate x = advert::decode_advert(frame).x_bytes;
            const keys::KeyId id = keys::key_id_of(x);
            SimEvent& rx = log(t, EventKind::AdvertReceived);
            rx.device = c_.devices[device].name;
            rx.finder = c_.finders[f].id;
            rx.key_index = key_index;
            rx.key_id = id;

            unsigned& used = cap_[{f, id}];
            if (used >= c_.per_key_cap) continue;
            ++used;

            geo::GeoPoint reported = *here;
            if (c_.gps_noise_sigma_m > 0) {
                double north = noise(rng_);
                double east = noise(rng_);
                reported = geo::offset(*here, north, east);
                reported.time = t;
            }
            report::LocationMessage msg{reported.lat, reported.lon,
                                        static_cast<std::uint8_t>(std::min(255.0, std::round(c_.gps_noise_sigma_m))),
                                        0};
            auto encrypted = report::encrypt_report(x, msg, to_apple_seconds(t), ephemeral_);
            pending_[f].push_back({id, report::encode_report(encrypted)});

            SimEvent& gen = log(t, EventKind::ReportGenerated);
            gen.device = c_.devices[device].name;
            gen.finder = c_.finders[f].id;
            gen.key_index = key_index;
            gen.key_id = id;
            gen.position = reported;

            if (!scheduled_[f]) {
                scheduled_[f] = true;
                push({t + c_.upload_delay.sample(rng_), 0, ActionKind::Upload, f});
            }
        }
    }

    void upload(const Action& a) {
        auto& batch = pending_[a.subject];
        for (std::size_t off = 0; off < batch.size(); off += service::kMaxBatchEntries) {
            std::size_t n = std::min(service::kMaxBatchEntries, batch.size() - off);
            Bytes body = service::encode_submit_batch(std::span(batch).subspan(off, n));
            auto reply = endpoint_.submit(body, c_.finders[a.subject].id);
            if (reply.status != 200) throw Error("simulated upload rejected: " + reply.body);
            SimEvent& e = log(a.time, EventKind::BatchUploaded);
            e.finder = c_.finders[a.subject].id;
            e.count = n;
        }
        batch.clear();
        scheduled_[a.subject] = false;
    }

    const ScenarioConfig& c_;
    std::mt19937_64 rng_;
    SeededEntropy ephemeral_;
    std::unique_ptr<service::ReportService> service_;
    TimePoint now_{};
    service::InProcessEndpoint endpoint_;
    std::vector<keys::MasterBeaconKey> masters_;
    std::vector<std::vector<service::SubmitEntry>> pending_;
    std::vector<bool> scheduled_;
    std::vector<std::optional<keys::AdvertisementKeyPair>> current_key_;
    std::map<std::pair<std::size_t, keys::KeyId>, unsigned> cap_;
    std::priority_queue<Action, std::vector<Action>, Later> queue_;
    std::uint64_t next_action_ = 0;
    std::vector<SimEvent> events_;
};

}  // namespace

SimResult run_scenario(const ScenarioConfig& config) {
    validate(config);
    return Simulator(config).run();
}

}  // namespace ofnet::sim
