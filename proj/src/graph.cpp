#include "deconflict/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace deconflict {

int ConflictGraph::vertex_index(const std::string& flight_id) const {
    const auto it =
        std::lower_bound(vertices.begin(), vertices.end(), flight_id);
    if (it == vertices.end() || *it != flight_id) {
        throw Error("unknown flight in conflict graph: " + flight_id);
    }
    return static_cast<int>(it - vertices.begin());
}

int ConflictGraph::degree(int v) const {
    int d = 0;
    for (const auto& [edge, ids] : edges) {
        if (edge.first == v || edge.second == v) ++d;
    }
    return d;
}

std::vector<std::vector<int>> ConflictGraph::adjacency() const {
    std::vector<std::vector<int>> adj(vertices.size());
    for (const auto& [edge, ids] : edges) {
        adj[static_cast<std::size_t>(edge.first)].push_back(edge.second);
        adj[static_cast<std::size_t>(edge.second)].push_back(edge.first);
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    return adj;
}

ConflictGraph build_conflict_graph(const FlightSet& fs, const ConflictSet& cs,
                                   int d_max) {
    ConflictGraph g;
    g.d_max = d_max;
    g.vertices.reserve(fs.flights.size());
    for (const auto& t : fs.flights) g.vertices.push_back(t.flight_id);
    std::sort(g.vertices.begin(), g.vertices.end());

    for (const auto& c : cs.conflicts) {
        int u = g.vertex_index(c.flight_i);
        int v = g.vertex_index(c.flight_j);
        if (u == v) throw Error("conflict " + std::to_string(c.id) +
                                " is a self-loop");
        if (u > v) std::swap(u, v);
        g.edges[{u, v}].push_back(c.id);
    }
    for (auto& [edge, ids] : g.edges) std::sort(ids.begin(), ids.end());
    return g;
}

std::vector<std::vector<int>> connected_components(const ConflictGraph& g) {
    const auto adj = g.adjacency();
    const int n = static_cast<int>(g.vertices.size());
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> out;
    for (int start = 0; start < n; ++start) {
        if (comp[static_cast<std::size_t>(start)] != -1) continue;
        std::vector<int> members;
        std::vector<int> stack{start};
        comp[static_cast<std::size_t>(start)] =
            static_cast<int>(out.size());
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int w : adj[static_cast<std::size_t>(v)]) {
                if (comp[static_cast<std::size_t>(w)] == -1) {
                    comp[static_cast<std::size_t>(w)] =
                        static_cast<int>(out.size());
                    stack.push_back(w);
                }
            }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;  // ordered by smallest member since starts scan ascending
}

Instance Instance::make(int id, FlightSet flights,
                        std::vector<Conflict> conflicts, int d_max) {
    Instance inst;
    inst.id = id;
    inst.flights = std::move(flights);
    std::sort(inst.flights.flights.begin(), inst.flights.flights.end(),
              [](const Trajectory& a, const Trajectory& b) {
                  return a.flight_id < b.flight_id;
              });
    inst.conflicts = std::move(conflicts);
    std::sort(inst.conflicts.begin(), inst.conflicts.end(),
              [](const Conflict& a, const Conflict& b) { return a.id < b.id; });
    inst.d_max = d_max;
    for (const auto& c : inst.conflicts) {
        if (!inst.flights.find(c.flight_i) || !inst.flights.find(c.flight_j)) {
            throw Error("conflict " + std::to_string(c.id) +
                        " references a flight outside the instance");
        }
    }
    inst.flight_conflicts = build_flight_index(inst.conflicts);
    return inst;
}

const Conflict& Instance::conflict_by_id(int cid) const {
    for (const auto& c : conflicts) {
        if (c.id == cid) return c;
    }
    throw Error("unknown conflict id " + std::to_string(cid));
}

std::vector<int> Instance::upstream_conflicts(const std::string& flight,
                                              int conflict_id) const {
    std::vector<int> out;
    const auto it = flight_conflicts.find(flight);
    if (it == flight_conflicts.end()) return out;
    for (int cid : it->second) {
        if (cid == conflict_id) break;
        out.push_back(cid);
    }
    return out;
}

bool is_trivial(const Instance& inst) {
    return std::all_of(inst.conflicts.begin(), inst.conflicts.end(),
                       [](const Conflict& c) { return is_avoided(c, 0, 0); });
}

std::vector<Instance> extract_instances(const ConflictGraph& g,
                                        const FlightSet& fs,
                                        const ConflictSet& cs, int d_max,
                                        bool include_trivial) {
    const auto components = connected_components(g);

    std::vector<Instance> out;
    int next_id = 0;
    for (const auto& comp : components) {
        std::set<std::string> members;
        for (int v : comp) members.insert(g.vertices[static_cast<std::size_t>(v)]);

        FlightSet flights;
        for (const auto& name : members) {
            const Trajectory* t = fs.find(name);
            if (t == nullptr) throw Error("flight missing from set: " + name);
            flights.flights.push_back(*t);
        }
        std::vector<Conflict> conflicts;
        for (const auto& c : cs.conflicts) {
            if (members.count(c.flight_i)) conflicts.push_back(c);
        }
        Instance inst =
            Instance::make(next_id, std::move(flights), std::move(conflicts),
                           d_max);
        if (!include_trivial && is_trivial(inst)) continue;
        inst.id = next_id++;
        out.push_back(std::move(inst));
    }
    return out;
}

std::optional<LinearFit> fit_power_law(const std::map<int, int>& histogram) {
    std::vector<double> lx, ly;
    for (const auto& [degree, count] : histogram) {
        if (degree < 1 || count <= 0) continue;
        lx.push_back(std::log(static_cast<double>(degree)));
        ly.push_back(std::log(static_cast<double>(count)));
    }
    return least_squares(lx, ly);
}

DegreeStats degree_stats(const ConflictGraph& g) {
    std::vector<int> degree(g.vertices.size(), 0);
    for (const auto& [edge, ids] : g.edges) {
        ++degree[static_cast<std::size_t>(edge.first)];
        ++degree[static_cast<std::size_t>(edge.second)];
    }
    DegreeStats stats;
    for (int d : degree) ++stats.histogram[d];
    stats.power_law = fit_power_law(stats.histogram);
    return stats;
}

int treewidth_estimate(const std::vector<std::vector<int>>& adjacency) {
    const int n = static_cast<int>(adjacency.size());
    std::vector<std::set<int>> adj(adjacency.size());
    for (int v = 0; v < n; ++v) {
        for (int w : adjacency[static_cast<std::size_t>(v)]) {
            if (w == v) continue;
            adj[static_cast<std::size_t>(v)].insert(w);
            adj[static_cast<std::size_t>(w)].insert(v);
        }
    }

    std::vector<bool> eliminated(adjacency.size(), false);
    int width = 0;
    for (int round = 0; round < n; ++round) {
        // Pick the remaining vertex whose elimination adds the fewest fill
        // edges; ties go to the smallest index.
        int best = -1;
        long best_fill = -1;
        for (int v = 0; v < n; ++v) {
            if (eliminated[static_cast<std::size_t>(v)]) continue;
            const auto& nb = adj[static_cast<std::size_t>(v)];
            long fill = 0;
            for (auto it = nb.begin(); it != nb.end(); ++it) {
                auto jt = it;
                for (++jt; jt != nb.end(); ++jt) {
                    if (!adj[static_cast<std::size_t>(*it)].count(*jt)) ++fill;
                }
            }
            if (best == -1 || fill < best_fill) {
                best = v;
                best_fill = fill;
            }
        }
        auto& nb = adj[static_cast<std::size_t>(best)];
        width = std::max(width, static_cast<int>(nb.size()));
        for (int x : nb) {
            for (int y : nb) {
                if (x < y) {
                    adj[static_cast<std::size_t>(x)].insert(y);
                    adj[static_cast<std::size_t>(y)].insert(x);
                }
            }
        }
        for (int x : nb) adj[static_cast<std::size_t>(x)].erase(best);
        nb.clear();
        eliminated[static_cast<std::size_t>(best)] = true;
    }
    return width;
}

LinearFit treewidth_size_slope(
    const std::vector<std::pair<int, int>>& size_and_treewidth, int min_size) {
    std::vector<double> x, y;
    for (const auto& [size, tw] : size_and_treewidth) {
        if (size < min_size) continue;
        x.push_back(static_cast<double>(size));
        y.push_back(static_cast<double>(tw));
    }
    const auto fit = least_squares(x, y);
    if (!fit) {
        throw GuardError(
            "treewidth slope needs two components at or above the size cutoff");
    }
    return *fit;
}

GraphStats compute_graph_stats(const ConflictGraph& g, int slope_min_size) {
    GraphStats stats;
    const auto comps = connected_components(g);
    const auto adj = g.adjacency();

    stats.component_sizes.resize(comps.size());
    stats.component_treewidths.resize(comps.size());
    parallel_for(comps.size(), [&](std::size_t c) {
        const auto& comp = comps[c];
        std::map<int, int> local;  // graph vertex -> component-local index
        for (std::size_t i = 0; i < comp.size(); ++i) {
            local[comp[i]] = static_cast<int>(i);
        }
        std::vector<std::vector<int>> sub(comp.size());
        for (std::size_t i = 0; i < comp.size(); ++i) {
            for (int w : adj[static_cast<std::size_t>(comp[i])]) {
                sub[i].push_back(local.at(w));
            }
        }
        stats.component_sizes[c] = static_cast<int>(comp.size());
        stats.component_treewidths[c] = treewidth_estimate(sub);
    });

    const auto deg = degree_stats(g);
    stats.degree_histogram = deg.histogram;
    stats.power_law = deg.power_law;

    std::vector<std::pair<int, int>> size_tw;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        size_tw.emplace_back(stats.component_sizes[c],
                             stats.component_treewidths[c]);
    }
    try {
        stats.treewidth_slope = treewidth_size_slope(size_tw, slope_min_size);
    } catch (const GuardError&) {
        stats.treewidth_slope = std::nullopt;
    }
    return stats;
}

}  // namespace deconflict
