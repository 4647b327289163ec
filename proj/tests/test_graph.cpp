#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>

#include <doctest.h>

#include "deconflict/graph.hpp"
#include "support/oracles.hpp"

using namespace deconflict;
namespace dt = deconflict::testing;

namespace {

Conflict edge_conflict(int id, const std::string& a, const std::string& b,
                       int offset = 0) {
    return Conflict::from_pairs(id, a, b, {{100 + 10 * id, 100 + 10 * id + offset}},
                                3);
}

ConflictGraph graph_of(const std::vector<std::string>& flights,
                       const std::vector<Conflict>& conflicts, int d_max = 18) {
    FlightSet fs;
    for (const auto& id : flights) fs.flights.push_back(dt::stub_flight(id));
    ConflictSet cs;
    cs.conflicts = conflicts;
    cs.flight_conflicts = build_flight_index(cs.conflicts);
    return build_conflict_graph(fs, cs, d_max);
}

}  // namespace

TEST_CASE("build_conflict_graph") {
    SUBCASE("no conflicts, no edges") {
        const auto g = graph_of({"A", "B", "C"}, {});
        CHECK(g.vertices.size() == 3);
        CHECK(g.edges.empty());
    }

    SUBCASE("path graph from two conflicts") {
        const auto g = graph_of(
            {"A", "B", "C"},
            {edge_conflict(0, "A", "B"), edge_conflict(1, "B", "C")});
        CHECK(g.edges.size() == 2);
        CHECK(g.degree(g.vertex_index("B")) == 2);
        CHECK(g.degree(g.vertex_index("A")) == 1);
    }

    SUBCASE("edge multiplicity collapses") {
        const auto g = graph_of(
            {"A", "B"}, {edge_conflict(0, "A", "B"), edge_conflict(1, "A", "B")});
        REQUIRE(g.edges.size() == 1);
        CHECK(g.edges.begin()->second == std::vector<int>{0, 1});
    }

    SUBCASE("conflict naming an unknown flight is rejected") {
        FlightSet fs;
        fs.flights.push_back(dt::stub_flight("A"));
        ConflictSet cs;
        cs.conflicts = {edge_conflict(0, "A", "Z")};
        CHECK_THROWS_AS(build_conflict_graph(fs, cs, 18), Error);
    }
}

TEST_CASE("extract_instances") {
    FlightSet fs;
    for (const auto* id : {"A", "B", "C", "D", "E"}) {
        fs.flights.push_back(dt::stub_flight(id));
    }
    ConflictSet cs;
    // component {A,B,C} needing delays; D isolated; E in a trivial conflict
    cs.conflicts = {edge_conflict(0, "A", "B"), edge_conflict(1, "B", "C")};
    // B_k = [4, 6]: already avoided at zero delays
    cs.conflicts.push_back(
        Conflict::from_pairs(2, "C", "E", {{150, 150 + 5}}, 2));
    REQUIRE(cs.conflicts[2].delta_min == 4);
    REQUIRE(cs.conflicts[2].delta_max == 6);
    cs.flight_conflicts = build_flight_index(cs.conflicts);
    const auto g = build_conflict_graph(fs, cs, 18);

    SUBCASE("everything kept") {
        const auto all = extract_instances(g, fs, cs, 18, true);
        REQUIRE(all.size() == 2);  // {A,B,C,E} and {D}
        CHECK(all[0].flights.size() == 4);
        CHECK(all[1].flights.size() == 1);
        // union of instance flights partitions the vertex set
        std::set<std::string> seen;
        for (const auto& inst : all) {
            for (const auto& t : inst.flights.flights) {
                CHECK(seen.insert(t.flight_id).second);
            }
        }
        CHECK(seen.size() == 5);
    }

    SUBCASE("trivial components are dropped") {
        // the {A,B,C,E} component has non-trivial conflicts (B around 0)
        const auto some = extract_instances(g, fs, cs, 18, false);
        REQUIRE(some.size() == 1);
        CHECK(some[0].flights.size() == 4);

        // with only the [4,6] conflict, its component becomes trivial
        ConflictSet trivial;
        trivial.conflicts = {Conflict::from_pairs(0, "C", "E", {{150, 155}}, 2)};
        trivial.flight_conflicts = build_flight_index(trivial.conflicts);
        const auto g2 = build_conflict_graph(fs, trivial, 18);
        CHECK(extract_instances(g2, fs, trivial, 18, true).size() == 4);
        CHECK(extract_instances(g2, fs, trivial, 18, false).empty());
    }
}

TEST_CASE("degree_stats") {
    SUBCASE("star graph") {
        std::vector<Conflict> conflicts;
        for (int i = 0; i < 5; ++i) {
            conflicts.push_back(edge_conflict(i, "A", "L" + std::to_string(i)));
        }
        const auto g =
            graph_of({"A", "L0", "L1", "L2", "L3", "L4"}, conflicts);
        const auto stats = degree_stats(g);
        CHECK(stats.histogram.at(1) == 5);
        CHECK(stats.histogram.at(5) == 1);
    }

    SUBCASE("planted power law recovers its exponent") {
        std::map<int, int> hist;
        for (int d = 1; d <= 20; ++d) {
            hist[d] = static_cast<int>(
                std::llround(1000.0 * std::pow(static_cast<double>(d), -2.0)));
        }
        const auto fit = fit_power_law(hist);
        REQUIRE(fit.has_value());
        CHECK(std::abs(fit->slope - (-2.0)) <= 0.05);
    }

    SUBCASE("regular graph has no fit") {
        // K_4: all degrees equal 3 -> single log-log bin
        std::vector<Conflict> conflicts;
        int id = 0;
        const std::vector<std::string> names{"A", "B", "C", "D"};
        for (std::size_t i = 0; i < names.size(); ++i) {
            for (std::size_t j = i + 1; j < names.size(); ++j) {
                conflicts.push_back(edge_conflict(id++, names[i], names[j]));
            }
        }
        const auto stats = degree_stats(graph_of(names, conflicts));
        CHECK(stats.histogram.at(3) == 4);
        CHECK(!stats.power_law.has_value());
    }
}

namespace {

std::vector<std::vector<int>> random_graph(std::mt19937_64& rng, int n,
                                           double p) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (coin(rng) < p) {
                adj[static_cast<std::size_t>(i)].push_back(j);
                adj[static_cast<std::size_t>(j)].push_back(i);
            }
        }
    }
    return adj;
}

}  // namespace

TEST_CASE("treewidth_estimate") {
    SUBCASE("trees have width 1") {
        std::mt19937_64 rng(3);
        for (int n = 2; n <= 12; ++n) {
            std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
            for (int v = 1; v < n; ++v) {
                std::uniform_int_distribution<int> parent(0, v - 1);
                const int p = parent(rng);
                adj[static_cast<std::size_t>(v)].push_back(p);
                adj[static_cast<std::size_t>(p)].push_back(v);
            }
            CHECK(treewidth_estimate(adj) == 1);
        }
    }

    SUBCASE("complete graphs have width n-1") {
        for (int n = 2; n <= 8; ++n) {
            std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    if (i != j) adj[static_cast<std::size_t>(i)].push_back(j);
                }
            }
            CHECK(treewidth_estimate(adj) == n - 1);
        }
    }

    SUBCASE("six-cycle has width 2") {
        std::vector<std::vector<int>> adj(6);
        for (int v = 0; v < 6; ++v) {
            adj[static_cast<std::size_t>(v)].push_back((v + 1) % 6);
            adj[static_cast<std::size_t>((v + 1) % 6)].push_back(v);
        }
        CHECK(treewidth_estimate(adj) == 2);
        CHECK(dt::exact_treewidth(adj) == 2);
    }

    SUBCASE("never below the exact treewidth on small random graphs") {
        std::mt19937_64 rng(17);
        for (int round = 0; round < 120; ++round) {
            std::uniform_int_distribution<int> size(2, 8);
            const int n = size(rng);
            const auto adj = random_graph(rng, n, 0.4);
            CHECK(treewidth_estimate(adj) >= dt::exact_treewidth(adj));
        }
    }
}

TEST_CASE("treewidth_size_slope") {
    SUBCASE("planted linear data") {
        const auto fit =
            treewidth_size_slope({{10, 5}, {20, 10}, {30, 15}}, 0);
        CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(fit.slope_stderr == doctest::Approx(0.0));
    }

    SUBCASE("insufficient data") {
        CHECK_THROWS_AS(treewidth_size_slope({{60, 12}}, 50), GuardError);
        CHECK_THROWS_AS(treewidth_size_slope({{10, 2}, {20, 4}, {30, 8}}, 50),
                        GuardError);
    }
}

TEST_CASE("connected components agree with the BFS reference") {
    std::mt19937_64 rng(23);
    for (int round = 0; round < 100; ++round) {
        std::uniform_int_distribution<int> size(1, 14);
        const int n = size(rng);
        const auto adj = random_graph(rng, n, 0.15);

        std::vector<std::string> names;
        for (int i = 0; i < n; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "V%02d", i);
            names.push_back(buf);
        }
        std::vector<Conflict> conflicts;
        int id = 0;
        for (int i = 0; i < n; ++i) {
            for (int j : adj[static_cast<std::size_t>(i)]) {
                if (i < j) {
                    conflicts.push_back(edge_conflict(
                        id++, names[static_cast<std::size_t>(i)],
                        names[static_cast<std::size_t>(j)]));
                }
            }
        }
        const auto g = graph_of(names, conflicts);
        const auto comps = connected_components(g);
        CHECK(static_cast<int>(comps.size()) ==
              dt::reference_component_count(adj));

        FlightSet fs;
        for (const auto& name : names) fs.flights.push_back(dt::stub_flight(name));
        ConflictSet cs;
        cs.conflicts = conflicts;
        cs.flight_conflicts = build_flight_index(cs.conflicts);
        CHECK(extract_instances(g, fs, cs, 18, true).size() == comps.size());
    }
}
