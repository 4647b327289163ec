#include "deconflict/geo.hpp"

#include <cmath>
#include <string>

#include "deconflict/util.hpp"

namespace deconflict {

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

}  // namespace

void validate_point(const TrajectoryPoint& p) {
    if (!std::isfinite(p.lat_deg) || !std::isfinite(p.lon_deg) ||
        !std::isfinite(p.alt_ft)) {
        throw Error("trajectory point has non-finite coordinates");
    }
    if (p.lat_deg < -90.0 || p.lat_deg > 90.0) {
        throw Error("latitude out of range: " + std::to_string(p.lat_deg));
    }
    if (p.lon_deg < -180.0 || p.lon_deg >= 180.0) {
        throw Error("longitude out of range: " + std::to_string(p.lon_deg));
    }
    if (p.alt_ft < 0.0) {
        throw Error("negative altitude: " + std::to_string(p.alt_ft));
    }
}

double great_circle_nm(const TrajectoryPoint& p, const TrajectoryPoint& q) {
    const double lat1 = p.lat_deg * kDegToRad;
    const double lat2 = q.lat_deg * kDegToRad;
    const double dlat = (q.lat_deg - p.lat_deg) * kDegToRad;
    const double dlon = (q.lon_deg - p.lon_deg) * kDegToRad;

    const double sl = std::sin(dlat / 2.0);
    const double so = std::sin(dlon / 2.0);
    double a = sl * sl + std::cos(lat1) * std::cos(lat2) * so * so;
    if (a > 1.0) a = 1.0;
    if (a < 0.0) a = 0.0;
    const double c = 2.0 * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
    return kEarthRadiusNm * c;
}

UnitVec3 to_unit_vector(double lat_deg, double lon_deg) {
    const double lat = lat_deg * kDegToRad;
    const double lon = lon_deg * kDegToRad;
    return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon),
            std::sin(lat)};
}

TrajectoryPoint gc_interpolate(const TrajectoryPoint& a,
                               const TrajectoryPoint& b, double fraction) {
    const UnitVec3 u = to_unit_vector(a.lat_deg, a.lon_deg);
    const UnitVec3 v = to_unit_vector(b.lat_deg, b.lon_deg);

    double dot = u.x * v.x + u.y * v.y + u.z * v.z;
    if (dot > 1.0) dot = 1.0;
    if (dot < -1.0) dot = -1.0;
    const double omega = std::acos(dot);

    double wx, wy, wz;
    if (omega < 1e-12) {
        wx = u.x;
        wy = u.y;
        wz = u.z;
    } else {
        const double s = std::sin(omega);
        const double ca = std::sin((1.0 - fraction) * omega) / s;
        const double cb = std::sin(fraction * omega) / s;
        wx = ca * u.x + cb * v.x;
        wy = ca * u.y + cb * v.y;
        wz = ca * u.z + cb * v.z;
    }
    const double norm = std::sqrt(wx * wx + wy * wy + wz * wz);
    wx /= norm;
    wy /= norm;
    wz /= norm;

    TrajectoryPoint out;
    out.lat_deg = std::asin(wz) / kDegToRad;
    out.lon_deg = std::atan2(wy, wx) / kDegToRad;
    if (out.lon_deg >= 180.0) out.lon_deg -= 360.0;
    if (out.lon_deg < -180.0) out.lon_deg += 360.0;
    out.alt_ft = a.alt_ft + fraction * (b.alt_ft - a.alt_ft);
    return out;
}

}  // namespace deconflict
