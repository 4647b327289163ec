#pragma once

// Independent reference implementations used as oracles by the test suites.
// Everything here recomputes results from first principles and must stay
// decoupled from the production code paths it checks.

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "deconflict/conflict.hpp"
#include "deconflict/graph.hpp"
#include "deconflict/qubo.hpp"
#include "deconflict/trajectory.hpp"

namespace deconflict::testing {

/// Pointwise simulation of one conflict: shift the stored trajectory-point
/// timestamps by the two delays and test the temporal separation on every
/// pair. True iff no pair violates it.
bool oracle_avoided(const Conflict& c, int delay_i, int delay_j,
                    int temporal_min);

/// Brute-force O(T^2) potential-pair detection straight from the definition:
/// haversine < horizontal, altitude difference < vertical, and
/// d_max + temporal > |s - t|. No prefilters, no unit-vector caching.
std::vector<PointPair> reference_detect(const Trajectory& a,
                                        const Trajectory& b,
                                        const SeparationParams& params,
                                        int d_max);

/// Number of connected components by plain BFS over an adjacency list.
int reference_component_count(const std::vector<std::vector<int>>& adj);

/// Exact treewidth by dynamic programming over elimination sets. Usable for
/// graphs with at most ~16 vertices.
int exact_treewidth(const std::vector<std::vector<int>>& adj);

/// Energy of a compiled model evaluated term by term from the cost-function
/// definitions (encoding, delay, conflict, consistency), using only the
/// model metadata and the variable-key layout. Never reads the coefficients
/// of the compiled quadratic form.
double reference_energy(const CompiledModel& m,
                        std::span<const std::uint8_t> bits);

/// A synthetic optimization instance with conflicts whose forbidden
/// intervals are realistic (time offsets within a few minutes), for the
/// QUBO-vs-enumeration agreement checks.
Instance random_instance(std::mt19937_64& rng, int max_flights, int d_max);

/// Dummy single-point trajectory for instances built without real paths.
Trajectory stub_flight(const std::string& id);

/// Instance with the given flights and directly constructed conflicts.
Instance make_instance(const std::vector<std::string>& flight_ids,
                       std::vector<Conflict> conflicts, int d_max);

/// Two-flight instance with a single conflict whose forbidden interval is
/// exactly [lo, hi].
Instance two_flight_instance(int lo, int hi, int d_max);

}  // namespace deconflict::testing
