#pragma once

#include <cstddef>

#include "ofnet/geo/trace.hpp"

namespace ofnet::geo {

/// Tunables of the path-estimation and top-location pipeline.
struct AnalyticsParams {
    std::size_t lowess_window = 30;            // reports per local fit
    Milliseconds resample_interval{20 * 60 * 1000};
    double dbscan_radius_m = 50.0;
    std::size_t dbscan_min_neighbors = 6;      // the point itself counts
};

/// Locally weighted linear regression of latitude and longitude on time.
///
/// Each output point is the intercept of a degree-1 fit centered at the report's
/// own timestamp, over the `lowess_window` reports nearest in time (ties favor the
/// earlier report). Weights are Gaussian in time with sigma equal to half the
/// window's duration. Near the ends the window is truncated asymmetrically; with
/// fewer reports than the window all reports are used. Timestamps are preserved.
/// Throws RangeError for fewer than three reports.
Trace lowess_estimate(const Trace& reports, const AnalyticsParams& params = {});

}  // namespace ofnet::geo
