#include "powerloc/geo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace powerloc {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void check_range(LatLon p) {
    if (!(p.lat >= -90.0 && p.lat <= 90.0) || !(p.lon >= -180.0 && p.lon <= 180.0)) {
        throw std::invalid_argument("coordinate out of range: (" + std::to_string(p.lat) +
                                    ", " + std::to_string(p.lon) + ")");
    }
}

}  // namespace

double haversine_distance(LatLon a, LatLon b) {
    check_range(a);
    check_range(b);
    if (a == b) {
        return 0.0;
    }
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = (b.lat - a.lat) * kDegToRad;
    const double dlambda = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

double polyline_length(std::span<const LatLon> points) {
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        total += haversine_distance(points[i - 1], points[i]);
    }
    return total;
}

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

LocalFrame::LocalFrame(LatLon origin)
    : origin_(origin),
      meters_per_deg_lat_(kEarthRadiusM * kDegToRad),
      meters_per_deg_lon_(kEarthRadiusM * kDegToRad * std::cos(origin.lat * kDegToRad)) {
    check_range(origin);
}

Vec2 LocalFrame::to_local(LatLon p) const {
    return {(p.lon - origin_.lon) * meters_per_deg_lon_, (p.lat - origin_.lat) * meters_per_deg_lat_};
}

LatLon LocalFrame::to_geo(Vec2 p) const {
    return {origin_.lat + p.y / meters_per_deg_lat_, origin_.lon + p.x / meters_per_deg_lon_};
}

}  // namespace powerloc
