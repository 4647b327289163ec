#pragma once

#include <compare>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "deconflict/trajectory.hpp"

namespace deconflict {

/// Mandatory separation standards. Defaults are the North Atlantic values:
/// 30 nm horizontally, 3 minutes temporally. The vertical threshold is our
/// own extension; point pairs at least this far apart in altitude are never
/// in conflict.
struct SeparationParams {
    double horizontal_nm = 30.0;
    int temporal_min = 3;
    double vertical_ft = 2000.0;
};

void validate(const SeparationParams& params);

/// A potentially conflicting pair of trajectory points: minute s on the
/// first flight of the pair, minute t on the second.
struct PointPair {
    int s = 0;
    int t = 0;

    auto operator<=>(const PointPair&) const = default;
};

/// A cluster of potentially conflicting point pairs between one flight pair
/// (flight_i < flight_j lexicographically), reduced to the closed forbidden
/// interval [delta_min, delta_max] for the accumulated-delay difference
/// D_i - D_j at this conflict.
struct Conflict {
    int id = 0;
    std::string flight_i;
    std::string flight_j;
    std::vector<PointPair> pairs;  // sorted
    int delta_min = 0;
    int delta_max = 0;

    /// Builds a conflict from its pair cluster; delta_min/delta_max follow
    /// from the temporal separation standard:
    ///   delta_min = 1 - dt + min(t - s),  delta_max = dt - 1 + max(t - s).
    static Conflict from_pairs(int id, std::string flight_i,
                               std::string flight_j,
                               std::vector<PointPair> pairs, int temporal_min);

    /// Minute at which `flight` (one of the two) first reaches this conflict.
    int arrival_of(const std::string& flight) const;

    bool operator==(const Conflict&) const = default;
};

struct IntInterval {
    int lo = 0;
    int hi = 0;

    bool contains(int v) const { return lo <= v && v <= hi; }
};

/// The forbidden interval B_k for the delay difference D_i - D_j.
IntInterval forbidden_interval(const Conflict& c);

/// True iff delays (delay_i, delay_j) avoid the conflict, i.e.
/// delay_i - delay_j lies outside [delta_min, delta_max].
bool is_avoided(const Conflict& c, int delay_i, int delay_j);

/// All point pairs (s, t) of flights (a, b) that are potentially conflicting:
/// horizontal distance < horizontal_nm, altitude difference < vertical_ft,
/// and d_max + temporal_min > |s - t| (departure-delays-only temporal test).
/// Result is sorted by (s, t).
std::vector<PointPair> detect_potential_pairs(const Trajectory& a,
                                              const Trajectory& b,
                                              const SeparationParams& params,
                                              int d_max);

/// Partitions the pair set of one flight pair into conflicts via connected
/// components under king-move adjacency on the (s, t) grid. Clusters are
/// returned sorted by their smallest s (ids left 0; detect_all assigns them).
std::vector<Conflict> cluster_conflicts(const std::vector<PointPair>& pairs,
                                        const std::string& flight_i,
                                        const std::string& flight_j,
                                        const SeparationParams& params);

/// All conflicts of a flight set plus the per-flight conflict index K_i,
/// each flight's conflicts sorted by the minute the flight reaches them.
struct ConflictSet {
    std::vector<Conflict> conflicts;
    std::map<std::string, std::vector<int>> flight_conflicts;

    const Conflict& by_id(int id) const;
};

/// Builds the K_i index for a conflict list (sorted by arrival minute, then id).
std::map<std::string, std::vector<int>> build_flight_index(
    const std::vector<Conflict>& conflicts);

/// Runs detection and clustering over every unordered flight pair. Conflict
/// ids are assigned deterministically: clusters sorted by
/// (flight_i, flight_j, min s) get ids 0, 1, 2, ...
ConflictSet detect_all(const FlightSet& fs, const SeparationParams& params,
                       int d_max);

void conflicts_to_json(const ConflictSet& cs, std::ostream& out);
ConflictSet conflicts_from_json(std::istream& in);

}  // namespace deconflict
