#pragma once

#include <cstddef>
#include <vector>

#include "ofnet/error.hpp"
#include "ofnet/time.hpp"

namespace ofnet::geo {

/// WGS-84 position in degrees with a UTC timestamp.
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
    TimePoint time{};

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Time-ordered points.
using Trace = std::vector<GeoPoint>;

double distance(const GeoPoint& a, const GeoPoint& b);

/// Throws FormatError if coordinates are out of range or timestamps do not strictly increase.
void validate_trace(const Trace& trace);

/// Stable sort by (time, lat, lon); a total order so equal-time permutations sort identically.
void sort_by_time(Trace& points);

/// Moves `p` by the given meters in the local east-north tangent plane.
GeoPoint offset(const GeoPoint& p, double north_m, double east_m);

class EmptyOverlap : public Error {
public:
    EmptyOverlap() : Error("reports do not overlap the ground-truth trace in time") {}
};

struct InterpolationResult {
    std::vector<GeoPoint> points;
    /// Indices into the query list that fell outside the trace's time span.
    std::vector<std::size_t> excluded;
};

/// Per-coordinate linear interpolation between bracketing samples.
InterpolationResult interpolate_trace(const Trace& gps, const std::vector<TimePoint>& at);

/// Mean geodesic distance between each report and the interpolated ground truth
/// at the report's timestamp. Reports outside the trace's span are ignored.
double mean_error(const Trace& reports, const Trace& gps);

/// Per-report distances behind mean_error, in report order (excluded reports omitted).
std::vector<double> report_errors(const Trace& reports, const Trace& gps);

}  // namespace ofnet::geo
