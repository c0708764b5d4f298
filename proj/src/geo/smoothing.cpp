#include "ofnet/geo/smoothing.hpp"

#include <algorithm>
#include <cmath>

namespace ofnet::geo {
namespace {

struct Fit {
    double lat;
    double lon;
};

Fit local_linear(const Trace& pts, std::size_t first, std::size_t last, std::size_t center) {
    const GeoPoint& c = pts[center];
    const double sigma = static_cast<double>((pts[last].time - pts[first].time).count()) / 2.0;

    auto dt_of = [&](std::size_t j) { return static_cast<double>((pts[j].time - c.time).count()); };
    auto weight = [&](double dt) { return sigma > 0 ? std::exp(-0.5 * (dt / sigma) * (dt / sigma)) : 1.0; };

    // Weighted means, with coordinates taken relative to the center report.
    double sw = 0, mt = 0, mla = 0, mlo = 0;
    for (std::size_t j = first; j <= last; ++j) {
        double dt = dt_of(j), w = weight(dt);
        sw += w;
        mt += w * dt;
        mla += w * (pts[j].lat - c.lat);
        mlo += w * (pts[j].lon - c.lon);
    }
    mt /= sw;
    mla /= sw;
    mlo /= sw;

    double stt = 0, stla = 0, stlo = 0;
    for (std::size_t j = first; j <= last; ++j) {
        double dt = dt_of(j), w = weight(dt), d = dt - mt;
        stt += w * d * d;
        stla += w * d * (pts[j].lat - c.lat - mla);
        stlo += w * d * (pts[j].lon - c.lon - mlo);
    }
    if (!(stt > 0.0)) return {c.lat + mla, c.lon + mlo};
    // Intercept of the weighted least-squares line at the center time.
    return {c.lat + mla - stla / stt * mt, c.lon + mlo - stlo / stt * mt};
}

}  // namespace

Trace lowess_estimate(const Trace& reports, const AnalyticsParams& params) {
    if (reports.size() < 3) throw RangeError("path estimation needs at least three reports");
    Trace pts = reports;
    sort_by_time(pts);

    const std::size_t n = pts.size();
    const std::size_t window = std::clamp<std::size_t>(params.lowess_window, 1, n);
    Trace out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t first = i, last = i;
        while (last - first + 1 < window) {
            if (first == 0) {
                ++last;
            } else if (last == n - 1) {
                --first;
            } else if ((pts[i].time - pts[first - 1].time) <= (pts[last + 1].time - pts[i].time)) {
                --first;
            } else {
                ++last;
            }
        }
        Fit fit = local_linear(pts, first, last, i);
        out.push_back({fit.lat, fit.lon, pts[i].time});
    }
    return out;
}

}  // namespace ofnet::geo
