#include "ofnet/geo/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ofnet::geo {
namespace {

using nlohmann::ordered_json;

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    cells.push_back(cell);
    for (auto& s : cells) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }
    return cells;
}

double parse_double(const std::string& s, std::size_t line) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw FormatError("invalid number '" + s + "'", line);
    return v;
}

std::string format_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10f", v);
    return buf;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

TimePoint parse_flexible_time(const std::string& s, std::size_t line) {
    bool numeric = !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c) || c == '.' || c == '-';
    });
    if (numeric && s.find('-', 1) == std::string::npos) {
        double v = parse_double(s, line);
        // Unix milliseconds beyond ~2001-09 in seconds would exceed 1e12.
        std::int64_t ms = v > 1e11 ? static_cast<std::int64_t>(v) : static_cast<std::int64_t>(v * 1000.0);
        return from_unix_ms(ms);
    }
    try {
        return parse_iso8601(s);
    } catch (const FormatError& e) {
        throw FormatError(e.what(), line);
    }
}

}  // namespace

void write_csv(const Trace& trace, std::ostream& out) {
    out << "timestamp_iso8601,lat,lon\n";
    for (const auto& p : trace) {
        out << format_iso8601(p.time) << ',' << format_coord(p.lat) << ',' << format_coord(p.lon) << '\n';
    }
}

void export_csv(const Trace& trace, const std::filesystem::path& destination) {
    std::ofstream out(destination, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + destination.string() + " for writing");
    write_csv(trace, out);
    if (!out) throw Error("write failed: " + destination.string());
}

Trace read_csv(std::istream& in) {
    std::string text;
    std::size_t line = 1;
    if (!std::getline(in, text)) throw FormatError("empty trace file");
    auto header = split_csv(text);
    if (header.size() != 3 || header[0] != "timestamp_iso8601" || header[1] != "lat" || header[2] != "lon") {
        throw FormatError("expected header 'timestamp_iso8601,lat,lon'", line);
    }
    Trace trace;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_csv(text);
        if (cells.size() != 3) throw FormatError("expected 3 columns", line);
        TimePoint t;
        try {
            t = parse_iso8601(cells[0]);
        } catch (const FormatError& e) {
            throw FormatError(e.what(), line);
        }
        trace.push_back({parse_double(cells[1], line), parse_double(cells[2], line), t});
    }
    return trace;
}

Trace import_csv(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw Error("cannot open " + source.string());
    return read_csv(in);
}

std::string to_geojson(const std::vector<NamedTrace>& traces, const std::vector<Cluster>& clusters) {
    ordered_json features = ordered_json::array();
    for (const auto& t : traces) {
        ordered_json coords = ordered_json::array();
        ordered_json times = ordered_json::array();
        for (const auto& p : t.trace) {
            coords.push_back({p.lon, p.lat});
            times.push_back(format_iso8601(p.time));
        }
        features.push_back({
            {"type", "Feature"},
            {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
            {"properties", {{"name", t.name}, {"timestamps", times}}},
        });
    }
    for (const auto& c : clusters) {
        features.push_back({
            {"type", "Feature"},
            {"geometry", {{"type", "Point"}, {"coordinates", {c.center.lon, c.center.lat}}}},
            {"properties",
             {
                 {"rank", c.rank},
                 {"dwell_time", std::chrono::duration_cast<std::chrono::minutes>(c.dwell_time).count()},
                 {"days", c.days_visited},
                 {"resampled_reports", c.resampled_count},
             }},
        });
    }
    return ordered_json{{"type", "FeatureCollection"}, {"features", features}}.dump(1);
}

void export_geojson(const std::vector<NamedTrace>& traces, const std::vector<Cluster>& clusters,
                    const std::filesystem::path& destination) {
    std::ofstream out(destination, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + destination.string() + " for writing");
    out << to_geojson(traces, clusters) << '\n';
    if (!out) throw Error("write failed: " + destination.string());
}

std::vector<NamedTrace> traces_from_geojson(const std::string& text) {
    auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || doc.value("type", "") != "FeatureCollection") throw FormatError("not a FeatureCollection");
    std::vector<NamedTrace> out;
    for (const auto& f : doc.at("features")) {
        const auto& geom = f.at("geometry");
        if (geom.value("type", "") != "LineString") continue;
        NamedTrace t;
        const auto& props = f.at("properties");
        t.name = props.value("name", "");
        const auto& coords = geom.at("coordinates");
        const auto& times = props.at("timestamps");
        if (coords.size() != times.size()) throw FormatError("timestamps do not match coordinates");
        for (std::size_t i = 0; i < coords.size(); ++i) {
            t.trace.push_back({coords[i].at(1).get<double>(), coords[i].at(0).get<double>(),
                               parse_iso8601(times[i].get<std::string>())});
        }
        out.push_back(std::move(t));
    }
    return out;
}

Trace read_flexible_csv(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw Error("cannot open " + source.string());
    std::string text;
    if (!std::getline(in, text)) throw FormatError("empty file " + source.string());
    auto header = split_csv(text);
    int ti = -1, la = -1, lo = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string h = lower(header[i]);
        if (ti < 0 && (h.find("time") != std::string::npos || h == "date")) ti = static_cast<int>(i);
        if (la < 0 && (h == "lat" || h == "latitude" || h.find("latitude") != std::string::npos)) la = static_cast<int>(i);
        if (lo < 0 && (h == "lon" || h == "lng" || h == "longitude" || h.find("longitude") != std::string::npos))
            lo = static_cast<int>(i);
    }
    if (ti < 0 || la < 0 || lo < 0) throw FormatError("cannot locate time/lat/lon columns in " + source.string(), 1);

    Trace trace;
    std::size_t line = 1;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_csv(text);
        auto need = static_cast<std::size_t>(std::max({ti, la, lo}));
        if (cells.size() <= need) throw FormatError("too few columns", line);
        trace.push_back({parse_double(cells[la], line), parse_double(cells[lo], line),
                         parse_flexible_time(cells[ti], line)});
    }
    sort_by_time(trace);
    trace.erase(std::unique(trace.begin(), trace.end(),
                            [](const GeoPoint& a, const GeoPoint& b) { return a.time == b.time; }),
                trace.end());
    return trace;
}

EvaluationScenario load_evaluation_scenario(const std::filesystem::path& root, const std::string& scenario) {
    auto dir = root / scenario;
    EvaluationScenario s;
    s.name = scenario;
    s.gps = read_flexible_csv(dir / "gps.csv");
    s.reports = read_flexible_csv(dir / "reports.csv");
    return s;
}

}  // namespace ofnet::geo
