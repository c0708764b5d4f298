#include "ofnet/geo/trace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>

#include "ofnet/geo/geodesic.hpp"

namespace ofnet::geo {

double distance(const GeoPoint& a, const GeoPoint& b) { return geodesic_distance(a.lat, a.lon, b.lat, b.lon); }

void validate_trace(const Trace& trace) {
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& p = trace[i];
        if (!(std::abs(p.lat) <= 90.0) || !(std::abs(p.lon) <= 180.0)) {
            throw FormatError("coordinate out of range", i + 1);
        }
        if (i > 0 && !(trace[i - 1].time < p.time)) {
            throw FormatError("timestamps not strictly increasing", i + 1);
        }
    }
}

void sort_by_time(Trace& points) {
    std::stable_sort(points.begin(), points.end(), [](const GeoPoint& a, const GeoPoint& b) {
        return std::tie(a.time, a.lat, a.lon) < std::tie(b.time, b.lat, b.lon);
    });
}

GeoPoint offset(const GeoPoint& p, double north_m, double east_m) {
    const double phi = p.lat * std::numbers::pi / 180.0;
    const double e2 = kWgs84.e2();
    const double w = std::sqrt(1.0 - e2 * std::sin(phi) * std::sin(phi));
    const double meridional = kWgs84.a * (1.0 - e2) / (w * w * w);
    const double normal = kWgs84.a / w;
    GeoPoint out = p;
    out.lat += north_m / meridional * 180.0 / std::numbers::pi;
    out.lon += east_m / (normal * std::cos(phi)) * 180.0 / std::numbers::pi;
    out.lon = std::remainder(out.lon, 360.0);
    return out;
}

InterpolationResult interpolate_trace(const Trace& gps, const std::vector<TimePoint>& at) {
    InterpolationResult result;
    if (gps.empty()) {
        result.excluded.resize(at.size());
        std::iota(result.excluded.begin(), result.excluded.end(), 0);
        return result;
    }
    auto by_time = [](const GeoPoint& p, TimePoint t) { return p.time < t; };
    for (std::size_t i = 0; i < at.size(); ++i) {
        TimePoint t = at[i];
        if (t < gps.front().time || t > gps.back().time) {
            result.excluded.push_back(i);
            continue;
        }
        auto hi = std::lower_bound(gps.begin(), gps.end(), t, by_time);
        if (hi->time == t) {
            result.points.push_back({hi->lat, hi->lon, t});
            continue;
        }
        auto lo = std::prev(hi);
        double span = static_cast<double>((hi->time - lo->time).count());
        double w = static_cast<double>((t - lo->time).count()) / span;
        result.points.push_back({lo->lat + w * (hi->lat - lo->lat), lo->lon + w * (hi->lon - lo->lon), t});
    }
    return result;
}

std::vector<double> report_errors(const Trace& reports, const Trace& gps) {
    std::vector<TimePoint> times;
    times.reserve(reports.size());
    for (const auto& r : reports) times.push_back(r.time);
    InterpolationResult truth = interpolate_trace(gps, times);

    std::vector<double> errors;
    errors.reserve(truth.points.size());
    std::size_t next_excluded = 0, k = 0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (next_excluded < truth.excluded.size() && truth.excluded[next_excluded] == i) {
            ++next_excluded;
            continue;
        }
        errors.push_back(distance(reports[i], truth.points[k++]));
    }
    return errors;
}

double mean_error(const Trace& reports, const Trace& gps) {
    auto errors = report_errors(reports, gps);
    if (errors.empty()) throw EmptyOverlap();
    return std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
}

}  // namespace ofnet::geo
