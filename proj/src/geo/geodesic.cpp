#include "ofnet/geo/geodesic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace ofnet::geo {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Longitude difference folded into (-180, 180].
double lon_diff_deg(double lon1, double lon2) {
    double d = std::remainder(lon2 - lon1, 360.0);
    return d == -180.0 ? 180.0 : d;
}

template <std::size_t N>
struct GaussLegendre {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendre() {
        for (std::size_t i = 0; i < N; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (std::size_t k = 2; k <= N; ++k) {
                    double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = N * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    template <typename F>
    double integrate(F&& f, double lo, double hi) const {
        double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo), sum = 0.0;
        for (std::size_t i = 0; i < N; ++i) sum += weights[i] * f(mid + half * nodes[i]);
        return sum * half;
    }
};

const GaussLegendre<48>& quadrature() {
    static const GaussLegendre<48> q;
    return q;
}

struct ReducedLatitude {
    double s, c;
};

ReducedLatitude reduced(double lat_deg, const Ellipsoid& e) {
    double phi = lat_deg * kDeg;
    double s = (1.0 - e.f) * std::sin(phi);
    double c = std::cos(phi);
    double n = std::hypot(s, c);
    s /= n;
    c /= n;
    // Keep the pole off the singular point of the azimuth relations.
    c = std::max(c, 1e-300);
    return {s, c};
}

}  // namespace

namespace detail {

std::optional<double> vincenty_inverse(double lat1, double lon1, double lat2, double lon2, const Ellipsoid& e) {
    const double a = e.a, f = e.f, b = e.b();
    const double L = lon_diff_deg(lon1, lon2) * kDeg;
    const double U1 = std::atan((1.0 - f) * std::tan(lat1 * kDeg));
    const double U2 = std::atan((1.0 - f) * std::tan(lat2 * kDeg));
    const double sinU1 = std::sin(U1), cosU1 = std::cos(U1);
    const double sinU2 = std::sin(U2), cosU2 = std::cos(U2);

    double lambda = L, sinSigma = 0, cosSigma = 0, sigma = 0, cos2Alpha = 0, cos2SigmaM = 0;
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        double sinL = std::sin(lambda), cosL = std::cos(lambda);
        sinSigma = std::hypot(cosU2 * sinL, cosU1 * sinU2 - sinU1 * cosU2 * cosL);
        if (sinSigma == 0.0) return 0.0;
        cosSigma = sinU1 * sinU2 + cosU1 * cosU2 * cosL;
        sigma = std::atan2(sinSigma, cosSigma);
        double sinAlpha = cosU1 * cosU2 * sinL / sinSigma;
        cos2Alpha = 1.0 - sinAlpha * sinAlpha;
        cos2SigmaM = cos2Alpha != 0.0 ? cosSigma - 2.0 * sinU1 * sinU2 / cos2Alpha : 0.0;
        double C = f / 16.0 * cos2Alpha * (4.0 + f * (4.0 - 3.0 * cos2Alpha));
        double prev = lambda;
        lambda = L + (1.0 - C) * f * sinAlpha *
                         (sigma + C * sinSigma * (cos2SigmaM + C * cosSigma * (-1.0 + 2.0 * cos2SigmaM * cos2SigmaM)));
        if (std::abs(lambda) > std::numbers::pi) return std::nullopt;
        if (std::abs(lambda - prev) < 1e-13) {
            converged = true;
            break;
        }
    }
    if (!converged) return std::nullopt;

    double u2 = cos2Alpha * (a * a - b * b) / (b * b);
    double A = 1.0 + u2 / 16384.0 * (4096.0 + u2 * (-768.0 + u2 * (320.0 - 175.0 * u2)));
    double B = u2 / 1024.0 * (256.0 + u2 * (-128.0 + u2 * (74.0 - 47.0 * u2)));
    double deltaSigma =
        B * sinSigma *
        (cos2SigmaM + B / 4.0 *
                          (cosSigma * (-1.0 + 2.0 * cos2SigmaM * cos2SigmaM) -
                           B / 6.0 * cos2SigmaM * (-3.0 + 4.0 * sinSigma * sinSigma) *
                               (-3.0 + 4.0 * cos2SigmaM * cos2SigmaM)));
    return b * A * (sigma - deltaSigma);
}

double bisection_inverse(double lat1, double lon1, double lat2, double lon2, const Ellipsoid& e) {
    const double f = e.f;
    const double lam12 = std::abs(lon_diff_deg(lon1, lon2)) * kDeg;

    // Canonical configuration: lat1 <= 0 and |lat2| <= |lat1|.
    if (std::abs(lat1) < std::abs(lat2)) std::swap(lat1, lat2);
    if (lat1 > 0) {
        lat1 = -lat1;
        lat2 = -lat2;
    }
    const ReducedLatitude b1 = reduced(lat1, e), b2 = reduced(lat2, e);
    const auto& gl = quadrature();

    struct Leg {
        double lambda12;
        double sigma1;
        double sigma12;
        double k2;
        double salp0;
    };
    auto leg = [&](double alp1) {
        double salp1 = std::sin(alp1), calp1 = std::cos(alp1);
        double salp0 = salp1 * b1.c;
        double calp0 = std::hypot(calp1, salp1 * b1.s);
        double ssig1 = b1.s, csig1 = calp1 * b1.c;
        double somg1 = salp0 * b1.s, comg1 = csig1;
        double radicand = (calp1 * b1.c) * (calp1 * b1.c) + (b2.c - b1.c) * (b2.c + b1.c);
        double calp2 = std::sqrt(std::max(radicand, 0.0)) / b2.c;
        double ssig2 = b2.s, csig2 = calp2 * b2.c;
        double somg2 = salp0 * b2.s, comg2 = csig2;

        double sig12 = std::atan2(csig1 * ssig2 - ssig1 * csig2, csig1 * csig2 + ssig1 * ssig2);
        double omg12 = std::atan2(comg1 * somg2 - somg1 * comg2, comg1 * comg2 + somg1 * somg2);
        if (sig12 < 0) sig12 += 2 * std::numbers::pi * (sig12 < -1e-9);
        if (omg12 < 0) omg12 += 2 * std::numbers::pi * (omg12 < -1e-9);
        sig12 = std::max(sig12, 0.0);
        omg12 = std::max(omg12, 0.0);

        double k2 = e.ep2() * calp0 * calp0;
        double sig1 = std::atan2(ssig1, csig1);
        double i3 = gl.integrate(
            [&](double s) {
                double sn = std::sin(s);
                return (2.0 - f) / (1.0 + (1.0 - f) * std::sqrt(1.0 + k2 * sn * sn));
            },
            sig1, sig1 + sig12);
        return Leg{omg12 - f * salp0 * i3, sig1, sig12, k2, salp0};
    };

    double lo = 0.0, hi = std::numbers::pi;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (leg(mid).lambda12 < lam12) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Leg best = leg(0.5 * (lo + hi));
    double i1 = gl.integrate(
        [&](double s) {
            double sn = std::sin(s);
            return std::sqrt(1.0 + best.k2 * sn * sn);
        },
        best.sigma1, best.sigma1 + best.sigma12);
    return e.b() * i1;
}

}  // namespace detail

double geodesic_distance(double lat1, double lon1, double lat2, double lon2, const Ellipsoid& e) {
    if (lat1 == lat2 && lon_diff_deg(lon1, lon2) == 0.0) return 0.0;
    if (auto s = detail::vincenty_inverse(lat1, lon1, lat2, lon2, e)) return *s;
    return detail::bisection_inverse(lat1, lon1, lat2, lon2, e);
}

}  // namespace ofnet::geo
