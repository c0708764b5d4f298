#pragma once

#include <optional>

/// Geodesic lengths on the WGS-84 ellipsoid.
namespace ofnet::geo {

struct Ellipsoid {
    double a;  // semi-major axis, meters
    double f;  // flattening

    constexpr double b() const { return a * (1.0 - f); }
    constexpr double e2() const { return f * (2.0 - f); }
    constexpr double ep2() const { return e2() / ((1.0 - f) * (1.0 - f)); }
};

inline constexpr Ellipsoid kWgs84{6378137.0, 1.0 / 298.257223563};

/// Length in meters of the shortest geodesic between two points given in degrees.
/// Uses Vincenty's iteration on the auxiliary sphere and falls back to a bracketed
/// azimuth search for nearly antipodal pairs where that iteration does not settle.
double geodesic_distance(double lat1, double lon1, double lat2, double lon2, const Ellipsoid& e = kWgs84);

namespace detail {

/// Vincenty inverse; nullopt when the longitude iteration fails to converge.
std::optional<double> vincenty_inverse(double lat1, double lon1, double lat2, double lon2, const Ellipsoid& e);

/// Inverse solution by bisection on the departure azimuth, integrating the
/// auxiliary-sphere distance and longitude integrals with Gauss-Legendre quadrature.
/// Robust everywhere, including antipodal points.
double bisection_inverse(double lat1, double lon1, double lat2, double lon2, const Ellipsoid& e);

}  // namespace detail
}  // namespace ofnet::geo
