#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ofnet/geo/clustering.hpp"
#include "ofnet/geo/trace.hpp"

namespace ofnet::geo {

// Trace CSV: header `timestamp_iso8601,lat,lon`, one point per line.
void write_csv(const Trace& trace, std::ostream& out);
void export_csv(const Trace& trace, const std::filesystem::path& destination);
Trace read_csv(std::istream& in);
Trace import_csv(const std::filesystem::path& source);

struct NamedTrace {
    std::string name;
    Trace trace;
};

/// FeatureCollection with one LineString per trace (properties: name, timestamps)
/// and one Point per cluster (properties: rank, dwell_time in minutes, days, resampled_reports).
std::string to_geojson(const std::vector<NamedTrace>& traces, const std::vector<Cluster>& clusters);
void export_geojson(const std::vector<NamedTrace>& traces, const std::vector<Cluster>& clusters,
                    const std::filesystem::path& destination);

/// Reads back the LineString features written by to_geojson.
std::vector<NamedTrace> traces_from_geojson(const std::string& text);

/// Loader for an evaluation dataset laid out as `<root>/<scenario>/gps.csv` and
/// `<root>/<scenario>/reports.csv`. Columns are found by header name (time/timestamp/date,
/// lat/latitude, lon/lng/longitude); timestamps may be ISO-8601 or Unix seconds/milliseconds.
struct EvaluationScenario {
    std::string name;
    Trace gps;
    Trace reports;
};

EvaluationScenario load_evaluation_scenario(const std::filesystem::path& root, const std::string& scenario);

/// Flexible single-file reader used by the dataset loader; sorts by time and drops duplicate timestamps.
Trace read_flexible_csv(const std::filesystem::path& source);

}  // namespace ofnet::geo
