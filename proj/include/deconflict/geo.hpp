#pragma once

namespace deconflict {

/// Mean Earth radius in nautical miles; all great-circle math uses this sphere.
inline constexpr double kEarthRadiusNm = 3440.065;

/// One sampled position of a flight: geodetic coordinates plus altitude.
struct TrajectoryPoint {
    double lat_deg = 0.0;   // [-90, 90]
    double lon_deg = 0.0;   // [-180, 180)
    double alt_ft = 0.0;    // >= 0

    bool operator==(const TrajectoryPoint&) const = default;
};

/// Throws Error if coordinates are non-finite or out of range.
void validate_point(const TrajectoryPoint& p);

/// Haversine distance in nautical miles on the kEarthRadiusNm sphere.
/// Altitude is ignored.
double great_circle_nm(const TrajectoryPoint& p, const TrajectoryPoint& q);

/// Unit vector on the sphere, for chord-distance prefilters.
struct UnitVec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

UnitVec3 to_unit_vector(double lat_deg, double lon_deg);

/// Point at `fraction` in [0, 1] along the great circle from a to b
/// (spherical linear interpolation); altitude interpolates linearly.
TrajectoryPoint gc_interpolate(const TrajectoryPoint& a,
                               const TrajectoryPoint& b, double fraction);

}  // namespace deconflict
