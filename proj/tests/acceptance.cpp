// Acceptance run: one PASS / FAIL / N/A line per criterion, nonzero exit on any FAIL.
//   ofnet_acceptance [--paper-data <dir>]

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ofnet/advert.hpp"
#include "ofnet/error.hpp"
#include "ofnet/geo/clustering.hpp"
#include "ofnet/geo/geodesic.hpp"
#include "ofnet/geo/io.hpp"
#include "ofnet/geo/smoothing.hpp"
#include "ofnet/keys.hpp"
#include "ofnet/report.hpp"
#include "ofnet/service.hpp"
#include "ofnet/sim.hpp"
#include "oracles/oracles.hpp"

using namespace ofnet;

namespace {

enum class Verdict { Pass, Fail, NotApplicable };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

Outcome pass(std::string d) { return {Verdict::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Verdict::Fail, std::move(d)}; }

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

template <typename Range>
oracle::Bytes ob(const Range& r) {
    return oracle::Bytes(std::begin(r), std::end(r));
}

const TimePoint kEpoch = parse_iso8601("2024-05-06T07:00:00Z");

keys::MasterBeaconKey seeded_master(std::uint64_t seed, TimePoint creation = kEpoch) {
    SeededEntropy e(seed);
    return keys::generate_master(e, creation);
}

// ---- 1 ----
Outcome key_chain_oracle() {
    std::size_t checked = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto m = seeded_master(1000 + s);
        auto expect = oracle::key_chain(ob(m.d0.bytes), ob(m.sk0), 1000);
        for (std::uint64_t i = 1; i <= 1000; ++i) {
            auto k = keys::key_at(m, i);
            const auto& o = expect[i - 1];
            if (ob(k.d.bytes) != o.d || ob(k.x_bytes) != o.x || ob(k.key_id) != o.key_id)
                return fail(fmt("master %llu index %llu differs", (unsigned long long)s, (unsigned long long)i));
            ++checked;
        }
    }
    return pass(fmt("%zu keys bitwise equal", checked));
}

// ---- 2 ----
Outcome seven_day_count() {
    auto m = seeded_master(2);
    auto ks = keys::keys_in_window(m, m.creation_time, m.creation_time + std::chrono::days{7});
    bool contiguous = !ks.empty() && ks.front().index == 1;
    for (std::size_t i = 1; i < ks.size(); ++i) contiguous &= ks[i].index == ks[i - 1].index + 1;
    if (ks.size() != 672 || !contiguous) return fail(fmt("%zu keys", ks.size()));
    return pass("672 keys, indices 1..672");
}

// ---- 3 ----
Outcome advert_codec() {
    std::mt19937_64 rng(3);
    std::size_t n = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto m = seeded_master(300 + s);
        keys::KeyChain chain(m);
        for (int i = 0; i < 1000; ++i, ++n) {
            auto k = chain.next();
            advert::AdvertPayloadFields f{static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()), k.x_bytes};
            auto frame = advert::encode_advert(f);
            const auto& b = frame.bytes;
            if (b.size() != 37 || b[6] != 0x1E || b[7] != 0xFF || b[8] != 0x4C || b[9] != 0x00 || b[10] != 0x12 ||
                b[11] != 0x19)
                return fail(fmt("frame %zu has a wrong constant field", n));
            if (!(advert::decode_advert(frame) == f)) return fail(fmt("frame %zu does not round-trip", n));
        }
    }
    return pass(fmt("%zu frames round-trip with fixed fields", n));
}

// ---- 4 ----
Outcome ecies() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
    SeededEntropy eph(44);
    auto owner = seeded_master(400), stranger = seeded_master(401);
    keys::KeyChain chain(owner), other(stranger);
    double worst = 0;
    std::size_t wrong_key_rejected = 0, flips_rejected = 0, oracle_agree = 0;
    for (int i = 0; i < 1000; ++i) {
        auto k = chain.next();
        auto wrong = other.next();
        report::LocationMessage msg{lat(rng), lon(rng), static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng())};
        auto r = report::encrypt_report(k.x_bytes, msg, static_cast<std::uint32_t>(rng()), eph);
        auto bytes = report::encode_report(r);
        if (bytes.size() != 88) return fail("report is not 88 bytes");

        auto got = report::decrypt_report(k.d, r);
        if (got.accuracy != msg.accuracy || got.status != msg.status) return fail("accuracy/status changed");
        worst = std::max({worst, std::abs(got.latitude - msg.latitude), std::abs(got.longitude - msg.longitude)});

        auto plain = oracle::ecies_decrypt(ob(k.d.bytes), ob(bytes));
        if (plain && *plain == ob(report::encode_location(msg))) ++oracle_agree;

        try {
            report::decrypt_report(wrong.d, r);
        } catch (const AuthenticationFailure&) {
            ++wrong_key_rejected;
        }

        // The authenticated region starts after the timestamp and confidence bytes.
        std::size_t bit = std::uniform_int_distribution<std::size_t>(5 * 8, 88 * 8 - 1)(rng);
        auto flipped = bytes;
        flipped[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        try {
            report::decrypt_report(k, report::decode_report(flipped));
        } catch (const AuthenticationFailure&) {
            ++flips_rejected;
        }
    }
    std::string d = fmt("max quantization %.2e deg, wrong key rejected %zu/1000, bit flips rejected %zu/1000, "
                        "oracle decrypts %zu/1000",
                        worst, wrong_key_rejected, flips_rejected, oracle_agree);
    bool ok = worst <= 5e-8 && wrong_key_rejected == 1000 && flips_rejected == 1000 && oracle_agree == 1000;
    return ok ? pass(d) : fail(d);
}

// ---- 5 ----
std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string strip_ws(const std::string& s) {
    std::string out;
    bool in_string = false;
    for (char c : s) {
        if (c == '"') in_string = !in_string;
        if (!in_string && std::isspace(static_cast<unsigned char>(c))) continue;
        out.push_back(c);
    }
    return out;
}

keys::KeyId filled_key_id(std::uint8_t fill) {
    keys::XCoordinate x;
    x.fill(fill);
    return keys::key_id_of(x);
}

Outcome wire_formats(const std::string& golden_dir) {
    for (std::size_t n : {1u, 128u, 255u}) {
        std::vector<service::SubmitEntry> entries(n);
        for (std::size_t i = 0; i < n; ++i) entries[i].key_id[0] = static_cast<std::uint8_t>(i);
        auto body = service::encode_submit_batch(entries);
        if (body.size() != 4 + 120 * n || body[0] != 0x0F || body[1] != 0x8A || body[2] != 0xE0 || body[3] != n)
            return fail(fmt("submit body for %zu entries is malformed", n));
        if (service::decode_submit_batch(body) != entries) return fail("submit body does not round-trip");
    }

    service::FetchRequest req;
    req.searches.push_back({1598965514928, 1599052814928, {filled_key_id(1), filled_key_id(2), filled_key_id(3)}});
    std::string golden_req = read_file(golden_dir + "/fetch_request.json");
    if (golden_req.empty()) return fail("golden files missing under " + golden_dir);
    if (strip_ws(service::encode_fetch_request(req)) != strip_ws(golden_req)) return fail("fetch request differs");

    service::ReportService svc;
    service::SubmitEntry entry{filled_key_id(1), {}};
    for (std::size_t i = 0; i < entry.report.size(); ++i) entry.report[i] = static_cast<std::uint8_t>(i);
    TimePoint published = from_unix_ms(1586804587284);
    std::vector<service::SubmitEntry> one{entry};
    svc.submit(service::encode_submit_batch(one), "finder", published);
    service::FetchRequest q;
    q.searches.push_back({to_unix_ms(published) - 1000, to_unix_ms(published) + 1000, {entry.key_id}});
    auto reply = svc.handle_fetch(service::encode_fetch_request(q), "owner", published);
    if (reply.status != 200 || strip_ws(reply.body) != strip_ws(read_file(golden_dir + "/fetch_response.json")))
        return fail("fetch response differs from golden");
    return pass("submit lengths for 1/128/255, request and response match golden files");
}

// ---- 6 ----
Outcome retention() {
    std::mt19937_64 rng(6);
    std::size_t fetches = 0, purges = 0;
    const std::int64_t week_ms = std::chrono::duration_cast<Milliseconds>(service::kRetention).count();
    for (int trial = 0; trial < 1000; ++trial) {
        service::ReportService svc;
        std::vector<service::StoredReport> model;
        TimePoint now = kEpoch;
        std::uniform_int_distribution<int> op(0, 9), key(0, 7);
        std::uniform_int_distribution<std::int64_t> step(0, 3LL * 86400 * 1000);
        for (int s = 0; s < 30; ++s) {
            now += Milliseconds{step(rng)};
            const std::int64_t now_ms = to_unix_ms(now);
            int o = op(rng);
            if (o < 5) {
                std::vector<service::SubmitEntry> batch(1 + rng() % 3);
                for (auto& e : batch) {
                    e.key_id = filled_key_id(static_cast<std::uint8_t>(key(rng)));
                    e.report[10] = static_cast<std::uint8_t>(rng());
                    model.push_back({e.key_id, e.report, now_ms, "f", 0});
                }
                svc.submit(service::encode_submit_batch(batch), "f", now);
            } else if (o < 8) {
                service::FetchSearch search;
                search.start_date_ms = now_ms - std::uniform_int_distribution<std::int64_t>(0, 2 * week_ms)(rng);
                search.end_date_ms = now_ms;
                std::set<keys::KeyId> wanted;
                for (int k = 0; k < 3; ++k) wanted.insert(filled_key_id(static_cast<std::uint8_t>(key(rng))));
                search.ids.assign(wanted.begin(), wanted.end());
                service::FetchRequest req;
                req.searches.push_back(search);
                auto got = svc.fetch(req, now);
                std::multiset<std::pair<std::int64_t, report::ReportBytes>> expect, seen;
                for (const auto& m : model)
                    if (m.date_published_ms >= now_ms - week_ms && m.date_published_ms >= search.start_date_ms &&
                        m.date_published_ms <= search.end_date_ms && wanted.count(m.key_id))
                        expect.insert({m.date_published_ms, m.payload});
                for (const auto& r : got.results) {
                    if (r.date_published_ms < now_ms - week_ms)
                        return fail(fmt("trial %d returned a report older than 7 days", trial));
                    seen.insert({r.date_published_ms, r.payload});
                }
                if (seen != expect) return fail(fmt("trial %d fetch differs from filter", trial));
                ++fetches;
            } else {
                auto before = model.size();
                std::erase_if(model, [&](const service::StoredReport& m) { return m.date_published_ms < now_ms - week_ms; });
                if (svc.purge_expired(now) != before - model.size() || svc.size() != model.size())
                    return fail(fmt("trial %d purge differs from filter", trial));
                ++purges;
            }
        }
    }
    return pass(fmt("1000 interleavings, %zu fetches and %zu purges agree with a brute-force filter", fetches, purges));
}

// ---- 7 and 8 ----
const geo::GeoPoint kWalkOrigin{48.1374, 11.5755, kEpoch};

sim::ScenarioConfig walking_scenario() {
    sim::ScenarioConfig c;
    auto walk = sim::synthetic_walk(kWalkOrigin, std::chrono::minutes{55}, 1.4, 2024);
    c.devices.push_back({"backpack", walk, "owner", std::nullopt});
    c.finders.push_back(sim::companion("finder-a", walk, 3, 0));
    c.finders.push_back(sim::companion("finder-b", walk, 0, -3));
    c.finders.push_back(sim::companion("finder-c", walk, -2, 2));
    c.gps_noise_sigma_m = 60;
    c.per_key_cap = 4;
    c.rng_seed = 7;
    return c;
}

sim::Retrieval retrieve_all(const sim::SimResult& run, const sim::ScenarioConfig& c) {
    service::InProcessEndpoint ep(*run.service, [&] { return run.end; });
    const auto& gt = c.devices[0].ground_truth;
    return sim::owner_retrieve(run.masters[0], gt.front().time, gt.back().time, ep, c.devices[0].owner_token);
}

geo::Trace as_trace(const sim::Retrieval& r) {
    geo::Trace t;
    for (const auto& x : r.reports) t.push_back({x.location.latitude, x.location.longitude, x.time});
    return t;
}

Outcome end_to_end() {
    auto c = walking_scenario();
    auto a = sim::run_scenario(c);
    auto b = sim::run_scenario(c);
    auto got = retrieve_all(a, c);
    if (got.reports.empty()) return fail("owner retrieved nothing");
    if (!got.skipped.empty()) return fail(fmt("%zu reports failed to decrypt", got.skipped.size()));

    const auto& gt = c.devices[0].ground_truth;
    double worst = 0;
    for (const auto& r : got.reports) {
        auto truth = geo::interpolate_trace(gt, {r.time});
        if (truth.points.empty()) return fail("report outside the walk");
        worst = std::max(worst, geo::distance({r.location.latitude, r.location.longitude, r.time}, truth.points[0]));
    }

    std::map<std::pair<std::string, keys::KeyId>, unsigned> per;
    unsigned max_per = 0;
    for (const auto& s : a.service->reports()) max_per = std::max(max_per, ++per[{s.finder_id, s.key_id}]);

    auto again = retrieve_all(b, c);
    bool same = a.events == b.events && a.service->reports() == b.service->reports() &&
                again.reports.size() == got.reports.size();
    for (std::size_t i = 0; same && i < got.reports.size(); ++i)
        same = got.reports[i].time == again.reports[i].time &&
               got.reports[i].location.latitude == again.reports[i].location.latitude &&
               got.reports[i].location.longitude == again.reports[i].location.longitude;

    std::string d = fmt("%zu reports, worst error %.1f m (bound %.0f m), max per (finder,key) %u, reproducible %s",
                        got.reports.size(), worst, 4 * c.gps_noise_sigma_m, max_per, same ? "yes" : "no");
    bool ok = worst <= 4 * c.gps_noise_sigma_m && max_per <= 4 && same;
    return ok ? pass(d) : fail(d);
}

Outcome path_estimation() {
    auto c = walking_scenario();
    const auto& walk = c.devices[0].ground_truth;
    auto crowd = sim::finders_along(walk, 150, 30, 88, "bystander-");
    c.finders.insert(c.finders.end(), crowd.begin(), crowd.end());
    auto run = sim::run_scenario(c);
    auto reports = as_trace(retrieve_all(run, c));
    if (reports.size() < 400) return fail(fmt("only %zu reports", reports.size()));
    double raw = geo::mean_error(reports, walk);
    double est = geo::mean_error(geo::lowess_estimate(reports), walk);
    std::string d = fmt("%zu reports, raw %.1f m, estimated %.1f m, ratio %.2f (limit 0.50)", reports.size(), raw, est,
                        est / raw);
    return est <= 0.5 * raw ? pass(d) : fail(d);
}

// ---- 9 ----
Outcome paper_dataset(const std::string& dir) {
    if (dir.empty()) return {Verdict::NotApplicable, "no --paper-data given; criteria 7 and 8 stand in"};
    struct Row {
        const char* name;
        double raw;
    };
    std::string d;
    bool ok = true;
    for (Row row : {Row{"walking", 81.4}, Row{"restaurant", 60.2}, Row{"train", 440.7}}) {
        geo::EvaluationScenario s;
        try {
            s = geo::load_evaluation_scenario(dir, row.name);
        } catch (const Error& e) {
            return fail(std::string(row.name) + ": " + e.what());
        }
        double raw = geo::mean_error(s.reports, s.gps);
        bool row_ok = std::abs(raw - row.raw) <= 0.05 * row.raw;
        d += fmt("%s raw %.1f m (expect %.1f) ", row.name, raw, row.raw);
        ok &= row_ok;
        if (std::string(row.name) == "walking") {
            double est = geo::mean_error(geo::lowess_estimate(s.reports), s.gps);
            d += fmt("estimated %.1f m (expect 25.9) ", est);
            ok &= std::abs(est - 25.9) <= 0.2 * 25.9;
        }
    }
    return ok ? pass(d) : fail(d);
}

// ---- 10 ----
Outcome top_locations() {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> noise(0, 30);
    std::uniform_int_distribution<int> jitter(-60, 60);
    const geo::GeoPoint home{52.5163, 13.3777, {}};
    const geo::GeoPoint work = geo::offset(home, 2100, 3400);
    const geo::GeoPoint gym = geo::offset(home, -1500, 800);
    geo::Trace reports;
    auto visit = [&](const geo::GeoPoint& site, TimePoint from, std::chrono::minutes length) {
        for (TimePoint t = from; t < from + length; t += Seconds{240 + jitter(rng)}) {
            auto p = geo::offset(site, noise(rng), noise(rng));
            p.time = t;
            reports.push_back(p);
        }
    };
    const TimePoint monday = parse_iso8601("2024-03-04T00:00:00Z");
    auto day = [&](int d, int hour) { return monday + std::chrono::days{d} + std::chrono::hours{hour}; };
    using std::chrono::hours;
    // Home 43 h over four nights, work 8 h over two days, gym 3 h once.
    visit(home, day(0, 19), hours{11});
    visit(work, day(1, 8), hours{4});
    visit(home, day(1, 19), hours{11});
    visit(gym, day(2, 17), hours{3});
    visit(home, day(2, 22), hours{10});
    visit(work, day(3, 9), hours{4});
    visit(home, day(3, 20), hours{11});

    auto clusters = geo::rank_top_locations(reports);
    if (clusters.size() < 3) return fail(fmt("%zu clusters", clusters.size()));
    const geo::GeoPoint planted[3] = {home, work, gym};
    std::string d = fmt("%zu clusters; ", clusters.size());
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
        double off = geo::distance(clusters[i].center, planted[i]);
        bool dwell_ok = clusters[i].dwell_time == std::chrono::minutes{20} * static_cast<long>(clusters[i].resampled_count);
        d += fmt("rank %d off %.1f m dwell %.1f h; ", i + 1, off,
                 std::chrono::duration<double, std::ratio<3600>>(clusters[i].dwell_time).count());
        ok &= off <= 15 && dwell_ok && clusters[i].rank == static_cast<std::size_t>(i + 1);
    }
    return ok ? pass(d) : fail(d);
}

// ---- 11 ----
sim::ScenarioConfig cafe_scenario() {
    sim::ScenarioConfig c;
    const geo::GeoPoint cafe{50.9375, 6.9603, kEpoch};
    auto tag = [&](double north) {
        return sim::stationary(geo::offset(cafe, north, 0), kEpoch, kEpoch + std::chrono::minutes{12});
    };
    c.devices.push_back({"keys-alice", tag(8), "owner-alice", std::nullopt});
    c.devices.push_back({"keys-bob", tag(-8), "owner-bob", std::nullopt});
    c.finders.push_back({"phone-cafe", {cafe}});
    return c;
}

Outcome correlation() {
    auto topology = sim::run_correlation_demo(cafe_scenario());
    bool one = topology.findings.size() == 1 &&
               std::minmax(topology.findings[0].owner_a, topology.findings[0].owner_b) ==
                   std::minmax(std::string("owner-alice"), std::string("owner-bob"));

    auto silent = cafe_scenario();
    for (auto& d : silent.devices) d.owner_token.clear();
    auto no_fetch = sim::run_correlation_demo(silent).findings.size();

    auto apart = cafe_scenario();
    const geo::GeoPoint elsewhere = geo::offset(apart.finders[0].trace[0], 4000, 0);
    apart.devices[1].ground_truth = sim::stationary(elsewhere, kEpoch, kEpoch + std::chrono::minutes{12});
    apart.finders.push_back({"phone-elsewhere", {geo::offset(elsewhere, 5, 0)}});
    auto disjoint = sim::run_correlation_demo(apart).findings.size();

    auto mitigated = cafe_scenario();
    mitigated.service_options.record_owner_tokens = false;
    auto with_mitigation = sim::run_correlation_demo(mitigated).findings.size();

    std::string d = fmt("topology %zu finding(s)%s, no fetch %zu, disjoint finders %zu, tokens not recorded %zu",
                        topology.findings.size(), one ? " pairing both owners" : "", no_fetch, disjoint, with_mitigation);
    return one && no_fetch == 0 && disjoint == 0 && with_mitigation == 0 ? pass(d) : fail(d);
}

// ---- 12 ----
double lib_distance(double a, double b, double c, double d) { return geo::geodesic_distance(a, b, c, d); }

Outcome dbscan_oracle() {
    std::mt19937_64 rng(12);
    std::size_t clusters = 0, noise = 0;
    for (int inst = 0; inst < 200; ++inst) {
        std::size_t n = std::uniform_int_distribution<std::size_t>(1, 200)(rng);
        geo::GeoPoint center{std::uniform_real_distribution<double>(-70, 70)(rng),
                             std::uniform_real_distribution<double>(-180, 180)(rng), kEpoch};
        std::size_t blobs = std::uniform_int_distribution<std::size_t>(0, 4)(rng);
        std::vector<geo::GeoPoint> seeds;
        for (std::size_t b = 0; b < blobs; ++b)
            seeds.push_back(geo::offset(center, std::uniform_real_distribution<double>(-600, 600)(rng),
                                        std::uniform_real_distribution<double>(-600, 600)(rng)));
        std::vector<geo::GeoPoint> pts;
        std::normal_distribution<double> spread(0, 40);
        std::uniform_real_distribution<double> wide(-800, 800);
        for (std::size_t i = 0; i < n; ++i) {
            geo::GeoPoint p = (!seeds.empty() && rng() % 4)
                                  ? geo::offset(seeds[rng() % seeds.size()], spread(rng), spread(rng))
                                  : geo::offset(center, wide(rng), wide(rng));
            p.time = kEpoch + Seconds{static_cast<long>(i)};
            pts.push_back(p);
        }
        double radius = std::uniform_real_distribution<double>(15, 120)(rng);
        std::size_t min_n = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
        std::vector<std::array<double, 2>> raw;
        for (const auto& p : pts) raw.push_back({p.lat, p.lon});
        auto got = geo::dbscan(pts, radius, min_n);
        if (got.labels != oracle::dbscan(raw, radius, min_n, lib_distance))
            return fail(fmt("instance %d (%zu points, D=%.1f, N=%zu) differs", inst, n, radius, min_n));
        clusters += got.clusters.size();
        noise += got.noise.size();
    }
    return pass(fmt("200 instances equal, %zu clusters and %zu noise points in total", clusters, noise));
}

// ---- 13 ----
Outcome geodesic_accuracy() {
    double eq = geo::geodesic_distance(0, 0, 0, 1);
    if (std::abs(eq - 111319.491) > 1e-3) return fail(fmt("equatorial degree %.4f m", eq));
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> lat(-85, 85), lon(-180, 180), az(0, 360), dist(0.5, 100000);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        double la = lat(rng), lo = lon(rng), a = az(rng), s = dist(rng);
        auto dst = oracle::geodesic_direct(la, lo, a, s);
        worst = std::max(worst, std::abs(geo::geodesic_distance(la, lo, dst.lat, dst.lon) - s));
    }
    std::string d = fmt("equatorial degree %.4f m, worst of 1000 pairs %.2e m", eq, worst);
    return worst <= 1e-3 ? pass(d) : fail(d);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string paper_data;
    std::string golden_dir = OFNET_GOLDEN_DIR;
    app.add_option("--paper-data", paper_data, "directory with the published evaluation traces");
    app.add_option("--golden", golden_dir, "directory with golden wire-format files");
    CLI11_PARSE(app, argc, argv);

    struct Criterion {
        int id;
        const char* name;
        double budget_s;  // 0: no limit
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria = {
        {1, "key-chain oracle equivalence", 30, key_chain_oracle},
        {2, "seven-day key count", 0, seven_day_count},
        {3, "advertisement codec", 5, advert_codec},
        {4, "report encryption", 60, ecies},
        {5, "wire formats", 0, [&] { return wire_formats(golden_dir); }},
        {6, "retention", 0, retention},
        {7, "end-to-end simulation", 60, end_to_end},
        {8, "path-estimation improvement", 60, path_estimation},
        {9, "published dataset", 0, [&] { return paper_dataset(paper_data); }},
        {10, "top locations", 30, top_locations},
        {11, "correlation attack", 0, correlation},
        {12, "DBSCAN oracle equivalence", 60, dbscan_oracle},
        {13, "geodesic accuracy", 30, geodesic_accuracy},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.verdict == Verdict::Pass && c.budget_s > 0 && secs > c.budget_s) {
            o = fail(o.detail + fmt("; took %.1f s, budget %.0f s", secs, c.budget_s));
        }
        const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "N/A ";
        std::printf("%s %2d %-30s %6.2f s  %s\n", tag, c.id, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
        failures += o.verdict == Verdict::Fail;
    }
    return failures == 0 ? 0 : 1;
}
