#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deconflict/conflict.hpp"
#include "deconflict/trajectory.hpp"
#include "deconflict/util.hpp"

namespace deconflict {

/// Flights as vertices; an edge between two flights iff they share at least
/// one conflict. Vertices are sorted flight ids; edges carry the conflict ids
/// between the pair.
struct ConflictGraph {
    std::vector<std::string> vertices;
    std::map<std::pair<int, int>, std::vector<int>> edges;  // (u < v) -> ids
    int d_max = 0;

    int vertex_index(const std::string& flight_id) const;
    int degree(int v) const;
    std::vector<std::vector<int>> adjacency() const;
};

ConflictGraph build_conflict_graph(const FlightSet& fs, const ConflictSet& cs,
                                   int d_max);

/// A connected component of the conflict graph, the unit of optimization.
struct Instance {
    int id = 0;
    FlightSet flights;                 // sorted by flight_id
    std::vector<Conflict> conflicts;   // sorted by conflict id
    int d_max = 0;
    std::map<std::string, std::vector<int>> flight_conflicts;  // K_i

    static Instance make(int id, FlightSet flights,
                         std::vector<Conflict> conflicts, int d_max);

    const Conflict& conflict_by_id(int id) const;
    /// Conflicts of `flight` that it reaches strictly before `conflict_id`.
    std::vector<int> upstream_conflicts(const std::string& flight,
                                        int conflict_id) const;
};

/// True iff all-zero delays already avoid every conflict of the instance
/// (vacuously true for instances without conflicts, e.g. singletons).
bool is_trivial(const Instance& inst);

/// One Instance per connected component, ordered by smallest contained
/// flight id. With include_trivial == false, drops components whose
/// conflicts are all avoided at zero delays.
std::vector<Instance> extract_instances(const ConflictGraph& g,
                                        const FlightSet& fs,
                                        const ConflictSet& cs, int d_max,
                                        bool include_trivial);

/// Vertex index sets of the connected components, each sorted, ordered by
/// smallest member.
std::vector<std::vector<int>> connected_components(const ConflictGraph& g);

struct DegreeStats {
    std::map<int, int> histogram;          // degree -> vertex count
    std::optional<LinearFit> power_law;    // log(count) ~ alpha * log(degree)
};

/// Histogram of vertex degrees plus the power-law exponent alpha fitted by
/// least squares on log-log bins with nonzero degree and count. The fit is
/// absent when fewer than two such bins exist.
DegreeStats degree_stats(const ConflictGraph& g);

/// The fit itself, exposed for synthetic histograms. Bins with degree < 1
/// are skipped (log-log domain).
std::optional<LinearFit> fit_power_law(const std::map<int, int>& histogram);

/// Width of the elimination order chosen by the min-fill greedy heuristic
/// (tie-break: smallest vertex index); an upper bound on treewidth.
int treewidth_estimate(const std::vector<std::vector<int>>& adjacency);

/// Least-squares slope of treewidth vs component size over components with
/// size >= min_size. Throws GuardError with fewer than two qualifying points.
LinearFit treewidth_size_slope(
    const std::vector<std::pair<int, int>>& size_and_treewidth, int min_size);

struct GraphStats {
    std::vector<int> component_sizes;                      // per component
    std::vector<int> component_treewidths;                 // same order
    std::map<int, int> degree_histogram;
    std::optional<LinearFit> power_law;                    // alpha
    std::optional<LinearFit> treewidth_slope;              // gamma
};

GraphStats compute_graph_stats(const ConflictGraph& g, int slope_min_size);

}  // namespace deconflict
