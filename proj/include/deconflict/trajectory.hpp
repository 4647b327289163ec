#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "deconflict/geo.hpp"

namespace deconflict {

/// A flight's time-discretized path, sampled at consecutive whole minutes
/// from departure_min to arrival_min().
struct Trajectory {
    std::string flight_id;
    int departure_min = 0;  // minutes since midnight UTC
    std::vector<TrajectoryPoint> points;

    int arrival_min() const {
        return departure_min + static_cast<int>(points.size()) - 1;
    }

    /// Position at absolute minute t; t must lie in [departure_min, arrival_min()].
    const TrajectoryPoint& at_minute(int t) const {
        return points.at(static_cast<std::size_t>(t - departure_min));
    }

    bool operator==(const Trajectory&) const = default;
};

struct FlightSet {
    std::vector<Trajectory> flights;

    std::size_t size() const { return flights.size(); }
    const Trajectory* find(const std::string& flight_id) const;

    bool operator==(const FlightSet&) const = default;
};

/// Throws Error if any invariant is violated (empty trajectory, duplicate id,
/// out-of-range coordinates).
void validate(const FlightSet& fs);

struct GeoBox {
    double lat_min = 0.0, lat_max = 0.0;
    double lon_min = 0.0, lon_max = 0.0;

    bool operator==(const GeoBox&) const = default;
};

/// Parameters for the corridor-style synthetic flight generator. Flights fly
/// great-circle routes from a random point in `origin` to a random point in
/// `destination` at constant speed and a constant altitude picked from
/// `altitudes_ft`. Departures are uniform integer minutes in
/// [base_departure_min, base_departure_min + departure_window_min].
struct SyntheticConfig {
    int flight_count = 0;
    GeoBox origin;
    GeoBox destination;
    double speed_knots = 480.0;
    std::vector<double> altitudes_ft = {34000.0};
    int base_departure_min = 360;
    int departure_window_min = 60;
    std::uint64_t seed = 0;
};

/// A corridor dense enough that conflict detection finds work to do.
SyntheticConfig default_corridor(int flight_count, std::uint64_t seed);

/// Parse the trajectory CSV (header: flight_id,time_min,lat_deg,lon_deg,alt_ft).
/// Rows may arrive in any order; they are grouped by flight and sorted by time.
/// Throws ParseError on malformed rows, non-consecutive minutes within a
/// flight, or duplicate (flight_id, time) rows.
FlightSet load_trajectories(std::istream& in);

/// Inverse of load_trajectories; writes the same CSV format.
void save_trajectories(const FlightSet& fs, std::ostream& out);

/// Deterministic for a fixed config (including seed). Throws Error on invalid
/// configs, including a degenerate corridor where both boxes collapse to the
/// same single point.
FlightSet generate_synthetic(const SyntheticConfig& config);

SyntheticConfig synthetic_config_from_json(std::istream& in);
void synthetic_config_to_json(const SyntheticConfig& config, std::ostream& out);

}  // namespace deconflict
