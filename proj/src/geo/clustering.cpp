#include "ofnet/geo/clustering.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace ofnet::geo {

Trace resample(const Trace& reports, Milliseconds interval) {
    if (interval.count() <= 0) throw RangeError("resample interval must be positive");
    Trace pts = reports;
    sort_by_time(pts);
    Trace out;
    if (pts.empty()) return out;

    const TimePoint anchor = pts.front().time;
    std::size_t i = 0;
    while (i < pts.size()) {
        auto bin = (pts[i].time - anchor) / interval;
        double lat = 0, lon = 0;
        std::size_t count = 0;
        for (; i < pts.size() && (pts[i].time - anchor) / interval == bin; ++i, ++count) {
            lat += pts[i].lat;
            lon += pts[i].lon;
        }
        out.push_back({lat / count, lon / count, anchor + interval * bin + interval / 2});
    }
    return out;
}

DbscanResult dbscan(const std::vector<GeoPoint>& points, double radius_m, std::size_t min_neighbors) {
    if (!(radius_m > 0) || min_neighbors < 1) throw RangeError("dbscan needs radius > 0 and min_neighbors >= 1");
    const std::size_t n = points.size();

    std::vector<std::vector<std::size_t>> neighbors(n);
    for (std::size_t i = 0; i < n; ++i) {
        neighbors[i].push_back(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (distance(points[i], points[j]) <= radius_m) {
                neighbors[i].push_back(j);
                neighbors[j].push_back(i);
            }
        }
    }
    for (auto& list : neighbors) std::sort(list.begin(), list.end());
    auto is_core = [&](std::size_t i) { return neighbors[i].size() >= min_neighbors; };

    constexpr int kUnvisited = -2;
    DbscanResult result;
    result.labels.assign(n, kUnvisited);
    for (std::size_t i = 0; i < n; ++i) {
        if (result.labels[i] != kUnvisited) continue;
        if (!is_core(i)) {
            result.labels[i] = kNoise;
            continue;
        }
        const int id = static_cast<int>(result.clusters.size());
        result.clusters.emplace_back();
        std::deque<std::size_t> frontier{i};
        result.labels[i] = id;
        while (!frontier.empty()) {
            std::size_t p = frontier.front();
            frontier.pop_front();
            if (!is_core(p)) continue;
            for (std::size_t q : neighbors[p]) {
                if (result.labels[q] == kUnvisited || result.labels[q] == kNoise) {
                    result.labels[q] = id;
                    frontier.push_back(q);
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (result.labels[i] == kNoise) {
            result.noise.push_back(i);
        } else {
            result.clusters[static_cast<std::size_t>(result.labels[i])].push_back(i);
        }
    }
    return result;
}

std::vector<Cluster> rank_top_locations(const Trace& reports, const AnalyticsParams& params) {
    if (reports.empty()) throw RangeError("no reports to rank");
    Trace resampled = resample(reports, params.resample_interval);
    DbscanResult db = dbscan(resampled, params.dbscan_radius_m, params.dbscan_min_neighbors);

    std::vector<Cluster> clusters;
    for (const auto& members : db.clusters) {
        Cluster c;
        double lat = 0, lon = 0;
        std::set<std::chrono::sys_days> days;
        for (std::size_t idx : members) {
            const GeoPoint& p = resampled[idx];
            c.members.push_back(p);
            lat += p.lat;
            lon += p.lon;
            days.insert(std::chrono::floor<std::chrono::days>(p.time));
        }
        c.resampled_count = members.size();
        c.center = {lat / members.size(), lon / members.size(), c.members.front().time};
        c.days_visited = days.size();
        c.dwell_time = params.resample_interval * static_cast<std::int64_t>(c.resampled_count);
        clusters.push_back(std::move(c));
    }
    std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
        if (a.dwell_time != b.dwell_time) return a.dwell_time > b.dwell_time;
        if (a.resampled_count != b.resampled_count) return a.resampled_count > b.resampled_count;
        return a.members.front().time < b.members.front().time;
    });
    for (std::size_t i = 0; i < clusters.size(); ++i) clusters[i].rank = i + 1;
    return clusters;
}

std::array<unsigned, 24> visiting_histogram(const Cluster& cluster, Milliseconds utc_offset) {
    std::array<unsigned, 24> bins{};
    for (const auto& p : cluster.members) {
        auto local = p.time + utc_offset;
        auto since_midnight = local - std::chrono::floor<std::chrono::days>(local);
        auto hour = std::chrono::duration_cast<std::chrono::hours>(since_midnight).count();
        ++bins[static_cast<std::size_t>(hour)];
    }
    return bins;
}

}  // namespace ofnet::geo
