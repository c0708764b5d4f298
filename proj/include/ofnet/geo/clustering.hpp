#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ofnet/geo/smoothing.hpp"
#include "ofnet/geo/trace.hpp"

namespace ofnet::geo {

/// Partitions time into consecutive `interval` bins anchored at the earliest report.
/// Each nonempty bin becomes one point at the coordinate mean, stamped at the bin center.
Trace resample(const Trace& reports, Milliseconds interval);

inline constexpr int kNoise = -1;

struct DbscanResult {
    /// Cluster id per input point (in input order), or kNoise.
    std::vector<int> labels;
    /// Member indices per cluster; clusters numbered in order of their first core point.
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> noise;
};

/// Density clustering with geodesic distance. A point is core when at least
/// `min_neighbors` points (itself included) lie within `radius_m`. Points are
/// scanned in input order; a border point joins the first cluster that reaches it.
DbscanResult dbscan(const std::vector<GeoPoint>& points, double radius_m, std::size_t min_neighbors);

struct Cluster {
    std::vector<GeoPoint> members;  // resampled points
    GeoPoint center;                // coordinate mean, timestamp of the first member
    std::size_t rank = 0;           // 1-based
    std::size_t resampled_count = 0;
    std::size_t days_visited = 0;   // distinct UTC calendar days among members
    Milliseconds dwell_time{0};     // resampled_count * resample interval
};

/// Resample, cluster, and rank by dwell time (descending), then member count,
/// then earliest first visit.
std::vector<Cluster> rank_top_locations(const Trace& reports, const AnalyticsParams& params = {});

/// Member counts per hour of day after shifting UTC by `utc_offset`.
std::array<unsigned, 24> visiting_histogram(const Cluster& cluster, Milliseconds utc_offset = Milliseconds{0});

}  // namespace ofnet::geo
