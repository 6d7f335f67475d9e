#pragma once

#include "powerloc/types.hpp"

#include <span>

namespace powerloc {

inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Great-circle distance in meters. Throws std::invalid_argument for
/// latitudes outside [-90, 90] or longitudes outside [-180, 180].
[[nodiscard]] double haversine_distance(LatLon a, LatLon b);

/// Length of a polyline in meters.
[[nodiscard]] double polyline_length(std::span<const LatLon> points);

struct Vec2 {
    double x = 0.0;  // east, meters
    double y = 0.0;  // north, meters

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

[[nodiscard]] double distance(Vec2 a, Vec2 b);

/// Equirectangular local tangent plane around an origin. Exact enough for
/// areas a few kilometers across.
class LocalFrame {
  public:
    LocalFrame() = default;
    explicit LocalFrame(LatLon origin);

    [[nodiscard]] Vec2 to_local(LatLon p) const;
    [[nodiscard]] LatLon to_geo(Vec2 p) const;
    [[nodiscard]] LatLon origin() const { return origin_; }

  private:
    LatLon origin_{};
    double meters_per_deg_lat_ = 0.0;
    double meters_per_deg_lon_ = 0.0;
};

}  // namespace powerloc
