#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "ofnet/advert.hpp"
#include "ofnet/geo/clustering.hpp"
#include "ofnet/geo/io.hpp"
#include "ofnet/geo/smoothing.hpp"
#include "ofnet/http.hpp"
#include "ofnet/key_cache.hpp"
#include "ofnet/keys.hpp"
#include "ofnet/report.hpp"
#include "ofnet/service.hpp"
#include "ofnet/sim.hpp"

namespace fs = std::filesystem;
using namespace ofnet;

namespace {

TimePoint now_utc() { return std::chrono::time_point_cast<Milliseconds>(std::chrono::system_clock::now()); }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + p.string() + " for writing");
    out << text;
}

geo::GeoPoint parse_latlon(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw FormatError("expected LAT,LON but got '" + s + "'");
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1)), {}};
}

std::string fmt_coord(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(7) << v;
    return s.str();
}

void print_key(const keys::AdvertisementKeyPair& k, const keys::MasterBeaconKey& m) {
    std::cout << "index    " << k.index << '\n'
              << "window   " << format_iso8601(keys::window_start(m, k.index)) << '\n'
              << "private  " << to_hex(k.d.bytes) << '\n'
              << "x        " << to_hex(k.x_bytes) << '\n'
              << "key_id   " << base64_encode(k.key_id) << '\n';
}

// Decrypted reports as trace CSV.
void write_retrieved(std::ostream& out, const std::vector<sim::RetrievedReport>& reports) {
    out << "timestamp_iso8601,lat,lon\n";
    for (const auto& r : reports)
        out << format_iso8601(r.time) << ',' << fmt_coord(r.location.latitude) << ',' << fmt_coord(r.location.longitude)
            << '\n';
}

geo::Trace retrieved_trace(const std::vector<sim::RetrievedReport>& reports) {
    geo::Trace t;
    for (const auto& r : reports) t.push_back({r.location.latitude, r.location.longitude, r.time});
    return t;
}

struct AnalyzeInputs {
    std::string reports;
    std::string gps;
    std::string paper_data;
    std::string scenario = "walking";
};

void add_inputs(CLI::App* cmd, AnalyzeInputs& in, bool need_gps) {
    cmd->add_option("--reports", in.reports, "Report trace CSV (timestamp_iso8601,lat,lon)");
    if (need_gps) cmd->add_option("--gps", in.gps, "Ground-truth trace CSV");
    cmd->add_option("--paper-data", in.paper_data, "Evaluation dataset root (<dir>/<scenario>/{gps,reports}.csv)");
    cmd->add_option("--scenario", in.scenario, "Scenario name inside --paper-data")->capture_default_str();
}

std::pair<geo::Trace, geo::Trace> load_inputs(const AnalyzeInputs& in, bool need_gps) {
    if (!in.paper_data.empty()) {
        auto s = geo::load_evaluation_scenario(in.paper_data, in.scenario);
        return {s.reports, s.gps};
    }
    if (in.reports.empty()) throw Error("--reports or --paper-data is required");
    if (need_gps && in.gps.empty()) throw Error("--gps is required");
    geo::Trace reports = geo::import_csv(in.reports);
    geo::sort_by_time(reports);
    geo::Trace gps;
    if (need_gps) {
        gps = geo::import_csv(in.gps);
        geo::sort_by_time(gps);
    }
    return {reports, gps};
}

http::Server* g_server = nullptr;
extern "C" void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Offline-finding protocol toolkit"};
    app.require_subcommand(1);

    // keygen
    std::string master_out = "master.json", cache_out = "keys.jsonl", creation_str;
    int cache_days = 7;
    std::uint64_t seed = 0;
    auto* keygen = app.add_subcommand("keygen", "Generate a master beacon key and export its key cache");
    keygen->add_option("--master", master_out, "Master key output file")->capture_default_str();
    keygen->add_option("--cache", cache_out, "Key cache output file")->capture_default_str();
    keygen->add_option("--creation", creation_str, "Creation time, ISO-8601 (default now)");
    keygen->add_option("--days", cache_days, "Days of advertisement keys to export")->capture_default_str();
    keygen->add_option("--seed", seed, "Deterministic seed (testing only)");

    // derive
    std::string master_in = "master.json", window_str, window_end_str;
    std::uint64_t index = 0;
    auto* derive = app.add_subcommand("derive", "Derive advertisement keys");
    derive->add_option("--master", master_in, "Master key file")->capture_default_str();
    auto* derive_index = derive->add_option("--index", index, "Key index (>= 1)");
    auto* derive_window = derive->add_option("--window", window_str, "Time inside the wanted window (ISO-8601)");
    derive->add_option("--window-end", window_end_str, "List every key up to this time");
    derive_index->excludes(derive_window);

    // advertise
    std::uint64_t adv_index = 1;
    int status = 0, hint = 0;
    auto* advertise = app.add_subcommand("advertise", "Print the BLE frame for one key");
    advertise->add_option("--master", master_in, "Master key file")->capture_default_str();
    advertise->add_option("--key-index", adv_index, "Key index")->required();
    advertise->add_option("--status", status, "Status byte")->check(CLI::Range(0, 255));
    advertise->add_option("--hint", hint, "Hint byte")->check(CLI::Range(0, 255));

    // simulate
    std::string scenario_path, out_dir = "sim-out";
    auto* simulate = app.add_subcommand("simulate", "Run a scenario file");
    simulate->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", out_dir, "Output directory")->capture_default_str();

    // serve
    std::string host = "127.0.0.1", snapshot;
    int port = 8080;
    bool anonymous = false;
    auto* serve = app.add_subcommand("serve", "Run the report service over HTTP");
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--snapshot", snapshot, "Load reports from and save them to this file");
    serve->add_flag("--anonymous-fetch", anonymous, "Do not record who fetched which key");
    std::string clock_start_str;
    serve->add_option("--clock-start", clock_start_str, "Run the service clock from this time (ISO-8601)");

    // fetch
    std::string cache_in, from_str, to_str, token = "owner", fetch_out;
    auto* fetch = app.add_subcommand("fetch", "Fetch reports for the keys in a cache file");
    fetch->add_option("--cache", cache_in, "Key cache file")->required()->check(CLI::ExistingFile);
    fetch->add_option("--from", from_str, "Window start (ISO-8601)")->required();
    fetch->add_option("--to", to_str, "Window end (ISO-8601)")->required();
    fetch->add_option("--host", host)->capture_default_str();
    fetch->add_option("--port", port)->capture_default_str();
    fetch->add_option("--token", token, "Owner token")->capture_default_str();
    fetch->add_option("--out", fetch_out, "Write the raw response here instead of stdout");

    // decrypt
    std::string reports_in, decrypt_out;
    auto* decrypt = app.add_subcommand("decrypt", "Decrypt a fetch response with a key cache");
    decrypt->add_option("--cache", cache_in, "Key cache file")->required()->check(CLI::ExistingFile);
    decrypt->add_option("--reports", reports_in, "Fetch response JSON")->required()->check(CLI::ExistingFile);
    decrypt->add_option("--out", decrypt_out, "Trace CSV output (default stdout)");

    // attack
    auto* attack = app.add_subcommand("attack", "Attack scenarios");
    attack->require_subcommand(1);
    std::string capture_str, replay_str;
    int relay_offset = 0;
    auto* relay = attack->add_subcommand("relay", "Relay captured advertisements to another site");
    relay->add_option("--scenario", scenario_path)->required()->check(CLI::ExistingFile);
    relay->add_option("--capture", capture_str, "Capture site LAT,LON")->required();
    relay->add_option("--replay", replay_str, "Replay site LAT,LON")->required();
    relay->add_option("--offset", relay_offset, "Replay delay in seconds")->capture_default_str();
    int corr_window = 900;
    auto* correlate = attack->add_subcommand("correlate", "Server-side co-location inference");
    correlate->add_option("--scenario", scenario_path)->required()->check(CLI::ExistingFile);
    correlate->add_option("--window", corr_window, "Max report time gap in seconds")->capture_default_str();

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Location analytics on report traces");
    analyze->require_subcommand(1);
    AnalyzeInputs inputs;
    geo::AnalyticsParams params;
    std::string geojson_out;
    int resample_min = 20;
    std::size_t cluster_rank = 1;
    int utc_offset_min = 0;

    auto* a_error = analyze->add_subcommand("error", "Mean distance of reports from ground truth");
    add_inputs(a_error, inputs, true);
    bool with_path = false;
    a_error->add_flag("--estimated", with_path, "Also report the estimated-path error");
    a_error->add_option("--window", params.lowess_window, "Reports per local fit")->capture_default_str();

    auto* a_path = analyze->add_subcommand("path", "Estimate the traveled path");
    add_inputs(a_path, inputs, false);
    a_path->add_option("--window", params.lowess_window, "Reports per local fit")->capture_default_str();
    a_path->add_option("--out", geojson_out, "GeoJSON output");

    auto add_top = [&](CLI::App* cmd) {
        add_inputs(cmd, inputs, false);
        cmd->add_option("--resample", resample_min, "Resampling interval in minutes")->capture_default_str();
        cmd->add_option("--radius", params.dbscan_radius_m, "DBSCAN radius in meters")->capture_default_str();
        cmd->add_option("--min-neighbors", params.dbscan_min_neighbors, "DBSCAN minimum neighbors")
            ->capture_default_str();
    };
    auto* a_top = analyze->add_subcommand("top", "Rank frequently visited locations");
    add_top(a_top);
    a_top->add_option("--out", geojson_out, "GeoJSON output");

    auto* a_hist = analyze->add_subcommand("histogram", "Hour-of-day visits for one top location");
    add_top(a_hist);
    a_hist->add_option("--cluster-rank", cluster_rank, "Rank of the location")->capture_default_str();
    a_hist->add_option("--utc-offset", utc_offset_min, "Local offset from UTC in minutes")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*keygen) {
            TimePoint creation = creation_str.empty() ? now_utc() : parse_iso8601(creation_str);
            std::unique_ptr<EntropySource> entropy;
            if (keygen->count("--seed"))
                entropy = std::make_unique<SeededEntropy>(seed);
            else
                entropy = std::make_unique<SystemEntropy>();
            auto master = keys::generate_master(*entropy, creation);
            keys::save_master(master, master_out);
            auto ks = keys::keys_in_window(master, creation, creation + std::chrono::days{cache_days});
            keys::export_cache(ks, cache_out);
            std::cout << "master  " << master_out << "\ncache   " << cache_out << " (" << ks.size() << " keys)\n";
        } else if (*derive) {
            auto master = keys::load_master(master_in);
            if (!window_str.empty()) {
                TimePoint from = parse_iso8601(window_str);
                TimePoint to = window_end_str.empty() ? from : parse_iso8601(window_end_str);
                for (const auto& k : keys::keys_in_window(master, from, to)) {
                    print_key(k, master);
                    std::cout << '\n';
                }
            } else {
                if (index == 0) throw RangeError("--index must be at least 1");
                print_key(keys::key_at(master, index), master);
            }
        } else if (*advertise) {
            auto master = keys::load_master(master_in);
            auto k = keys::key_at(master, adv_index);
            auto frame = advert::encode_advert(
                {static_cast<std::uint8_t>(status), static_cast<std::uint8_t>(hint), k.x_bytes});
            std::cout << advert::to_hex(frame) << '\n';
        } else if (*simulate) {
            auto config = sim::load_scenario(scenario_path);
            auto run = sim::run_scenario(config);
            fs::create_directories(out_dir);
            write_file(fs::path(out_dir) / "events.jsonl", sim::events_to_jsonl(run.events));
            run.service->save_snapshot(fs::path(out_dir) / "server.jsonl");
            service::InProcessEndpoint endpoint(*run.service, [&] { return run.end; });
            for (std::size_t i = 0; i < config.devices.size(); ++i) {
                const auto& dev = config.devices[i];
                keys::save_master(run.masters[i], fs::path(out_dir) / (dev.name + ".master.json"));
                auto got = sim::owner_retrieve(run.masters[i], dev.ground_truth.front().time,
                                               dev.ground_truth.back().time, endpoint,
                                               dev.owner_token.empty() ? dev.name : dev.owner_token, run.end,
                                               config.key_window);
                std::ofstream out(fs::path(out_dir) / (dev.name + ".reports.csv"));
                write_retrieved(out, got.reports);
                for (const auto& s : got.skipped) std::cerr << "skipped: " << s << '\n';
                std::cout << dev.name << ": " << got.reports.size() << " reports retrieved";
                if (got.reports.size() >= 1) {
                    auto errs = geo::report_errors(retrieved_trace(got.reports), dev.ground_truth);
                    if (!errs.empty()) {
                        double mean = 0;
                        for (double e : errs) mean += e;
                        std::cout << ", mean error " << std::fixed << std::setprecision(1) << mean / errs.size()
                                  << " m";
                    }
                }
                std::cout << '\n';
            }
            std::cout << run.events.size() << " events, " << run.service->size() << " stored reports -> " << out_dir
                      << '\n';
        } else if (*serve) {
            service::ServiceOptions opts;
            opts.record_owner_tokens = !anonymous;
            service::ReportService svc(opts);
            if (!snapshot.empty() && fs::exists(snapshot)) svc.load_snapshot(snapshot);
            std::function<TimePoint()> clock = now_utc;
            if (!clock_start_str.empty()) {
                const TimePoint base = parse_iso8601(clock_start_str);
                const auto started = std::chrono::steady_clock::now();
                clock = [base, started] {
                    return base + std::chrono::duration_cast<Milliseconds>(std::chrono::steady_clock::now() - started);
                };
            }
            http::Server server(svc, clock);
            int bound = server.bind(host, port);
            if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "listening on " << host << ':' << bound << std::endl;
            server.serve();
            g_server = nullptr;
            if (!snapshot.empty()) svc.save_snapshot(snapshot);
        } else if (*fetch) {
            auto ks = keys::import_cache(fs::path(cache_in));
            TimePoint from = parse_iso8601(from_str), to = parse_iso8601(to_str);
            service::FetchSearch search{to_unix_ms(from), to_unix_ms(to), {}};
            for (const auto& k : ks) search.ids.push_back(k.key_id);
            service::FetchRequest request{{search}, {}};
            http::Client client(host, port);
            auto reply = client.fetch(service::encode_fetch_request(request), http::basic_auth("owner", token));
            if (reply.status != 200) throw Error("server answered " + std::to_string(reply.status));
            if (fetch_out.empty())
                std::cout << reply.body << '\n';
            else
                write_file(fetch_out, reply.body);
        } else if (*decrypt) {
            auto ks = keys::import_cache(fs::path(cache_in));
            std::map<keys::KeyId, const keys::AdvertisementKeyPair*> by_id;
            for (const auto& k : ks) by_id.emplace(k.key_id, &k);
            auto response = service::decode_fetch_response(read_file(reports_in));
            std::vector<sim::RetrievedReport> got;
            std::size_t skipped = 0;
            for (const auto& r : response.results) {
                auto it = by_id.find(r.id);
                if (it == by_id.end()) {
                    ++skipped;
                    continue;
                }
                try {
                    auto enc = report::decode_report(r.payload);
                    got.push_back({from_apple_seconds(enc.timestamp), report::decrypt_report(*it->second, enc),
                                   it->second->index, r.id, r.date_published_ms});
                } catch (const AuthenticationFailure&) {
                    ++skipped;
                }
            }
            std::stable_sort(got.begin(), got.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
            if (decrypt_out.empty()) {
                write_retrieved(std::cout, got);
            } else {
                std::ofstream out(decrypt_out);
                write_retrieved(out, got);
            }
            if (skipped) std::cerr << skipped << " reports skipped\n";
        } else if (*relay) {
            auto config = sim::load_scenario(scenario_path);
            auto capture = parse_latlon(capture_str), replay = parse_latlon(replay_str);
            auto run = sim::run_relay_attack(config, capture, replay, Seconds{relay_offset});
            service::InProcessEndpoint endpoint(*run.service, [&] { return run.end; });
            for (std::size_t i = 0; i < config.devices.size(); ++i) {
                const auto& dev = config.devices[i];
                auto got = sim::owner_retrieve(run.masters[i], dev.ground_truth.front().time,
                                               dev.ground_truth.back().time, endpoint, dev.name, run.end,
                                               config.key_window);
                std::size_t near_capture = 0, near_replay = 0;
                for (const auto& r : got.reports) {
                    geo::GeoPoint p{r.location.latitude, r.location.longitude, r.time};
                    (geo::distance(p, capture) <= geo::distance(p, replay) ? near_capture : near_replay)++;
                }
                std::cout << dev.name << ": " << got.reports.size() << " reports, " << near_capture
                          << " nearer the capture site, " << near_replay << " nearer the replay site\n";
            }
        } else if (*correlate) {
            auto config = sim::load_scenario(scenario_path);
            auto demo = sim::run_correlation_demo(config, Seconds{corr_window});
            std::cout << demo.findings.size() << " finding(s)\n";
            for (const auto& f : demo.findings)
                std::cout << f.owner_a << " <-> " << f.owner_b << " via " << f.finder_id << " (gap " << f.time_gap_s
                          << " s)\n";
        } else if (*a_error) {
            auto [reports, gps] = load_inputs(inputs, true);
            std::cout << std::fixed << std::setprecision(1) << "raw mean error " << geo::mean_error(reports, gps)
                      << " m over " << geo::report_errors(reports, gps).size() << " reports\n";
            if (with_path)
                std::cout << "estimated-path mean error "
                          << geo::mean_error(geo::lowess_estimate(reports, params), gps) << " m\n";
        } else if (*a_path) {
            auto [reports, gps] = load_inputs(inputs, false);
            auto path = geo::lowess_estimate(reports, params);
            if (geojson_out.empty()) {
                geo::write_csv(path, std::cout);
            } else {
                geo::export_geojson({{"reports", reports}, {"estimated", path}}, {}, geojson_out);
                std::cout << path.size() << " points -> " << geojson_out << '\n';
            }
        } else if (*a_top || *a_hist) {
            auto [reports, gps] = load_inputs(inputs, false);
            params.resample_interval = std::chrono::minutes{resample_min};
            auto clusters = geo::rank_top_locations(reports, params);
            if (*a_top) {
                std::cout << clusters.size() << " location(s)\n";
                for (const auto& c : clusters)
                    std::cout << "#" << c.rank << "  " << fmt_coord(c.center.lat) << ',' << fmt_coord(c.center.lon)
                              << "  dwell "
                              << std::chrono::duration_cast<std::chrono::minutes>(c.dwell_time).count() / 60.0
                              << " h  days " << c.days_visited << "  resampled " << c.resampled_count << '\n';
                if (!geojson_out.empty()) geo::export_geojson({{"reports", reports}}, clusters, geojson_out);
            } else {
                if (cluster_rank < 1 || cluster_rank > clusters.size())
                    throw RangeError("no location with rank " + std::to_string(cluster_rank));
                auto bins = geo::visiting_histogram(clusters[cluster_rank - 1], std::chrono::minutes{utc_offset_min});
                for (std::size_t h = 0; h < bins.size(); ++h)
                    std::cout << std::setw(2) << std::setfill('0') << h << std::setfill(' ') << "  "
                              << std::setw(4) << bins[h] << "  " << std::string(bins[h], '#') << '\n';
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
