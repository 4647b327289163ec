#include "deconflict/conflict.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include <json.hpp>

#include "deconflict/util.hpp"

namespace deconflict {

void validate(const SeparationParams& params) {
    if (params.horizontal_nm <= 0.0 || params.temporal_min <= 0 ||
        params.vertical_ft <= 0.0) {
        throw Error("separation parameters must be strictly positive");
    }
}

Conflict Conflict::from_pairs(int id, std::string flight_i,
                              std::string flight_j,
                              std::vector<PointPair> pairs, int temporal_min) {
    if (pairs.empty()) throw Error("conflict needs at least one point pair");
    if (!(flight_i < flight_j)) {
        throw Error("conflict flights must be ordered: " + flight_i + " !< " +
                    flight_j);
    }
    if (temporal_min <= 0) throw Error("temporal separation must be positive");
    std::sort(pairs.begin(), pairs.end());

    int min_diff = std::numeric_limits<int>::max();
    int max_diff = std::numeric_limits<int>::min();
    for (const auto& p : pairs) {
        min_diff = std::min(min_diff, p.t - p.s);
        max_diff = std::max(max_diff, p.t - p.s);
    }

    Conflict c;
    c.id = id;
    c.flight_i = std::move(flight_i);
    c.flight_j = std::move(flight_j);
    c.pairs = std::move(pairs);
    c.delta_min = 1 - temporal_min + min_diff;
    c.delta_max = temporal_min - 1 + max_diff;
    return c;
}

int Conflict::arrival_of(const std::string& flight) const {
    const bool first = flight == flight_i;
    if (!first && flight != flight_j) {
        throw Error("flight " + flight + " not part of conflict " +
                    std::to_string(id));
    }
    int arrival = std::numeric_limits<int>::max();
    for (const auto& p : pairs) {
        arrival = std::min(arrival, first ? p.s : p.t);
    }
    return arrival;
}

IntInterval forbidden_interval(const Conflict& c) {
    return {c.delta_min, c.delta_max};
}

bool is_avoided(const Conflict& c, int delay_i, int delay_j) {
    const int diff = delay_i - delay_j;
    return diff < c.delta_min || diff > c.delta_max;
}

namespace {

struct TrajectoryScan {
    const Trajectory* traj = nullptr;
    std::vector<UnitVec3> units;
    double alt_min = 0.0, alt_max = 0.0;
    double lat_min = 0.0, lat_max = 0.0;
};

TrajectoryScan make_scan(const Trajectory& t) {
    TrajectoryScan s;
    s.traj = &t;
    s.units.reserve(t.points.size());
    s.alt_min = std::numeric_limits<double>::infinity();
    s.alt_max = -std::numeric_limits<double>::infinity();
    s.lat_min = std::numeric_limits<double>::infinity();
    s.lat_max = -std::numeric_limits<double>::infinity();
    for (const auto& p : t.points) {
        s.units.push_back(to_unit_vector(p.lat_deg, p.lon_deg));
        s.alt_min = std::min(s.alt_min, p.alt_ft);
        s.alt_max = std::max(s.alt_max, p.alt_ft);
        s.lat_min = std::min(s.lat_min, p.lat_deg);
        s.lat_max = std::max(s.lat_max, p.lat_deg);
    }
    return s;
}

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

std::vector<PointPair> detect_scanned(const TrajectoryScan& sa,
                                      const TrajectoryScan& sb,
                                      const SeparationParams& params,
                                      int d_max) {
    std::vector<PointPair> out;
    const Trajectory& a = *sa.traj;
    const Trajectory& b = *sb.traj;

    // Altitude prefilter: the closest the two flights ever come vertically.
    const double alt_gap =
        std::max({0.0, sb.alt_min - sa.alt_max, sa.alt_min - sb.alt_max});
    if (alt_gap >= params.vertical_ft) return out;

    // Latitude prefilter: great-circle distance is at least the latitude
    // separation along a meridian.
    const double lat_gap =
        std::max({0.0, sb.lat_min - sa.lat_max, sa.lat_min - sb.lat_max});
    if (kEarthRadiusNm * lat_gap * kDegToRad > params.horizontal_nm) return out;

    // Chord-length prefilter for the spatial test, with a small slack so the
    // exact haversine evaluation decides every borderline candidate.
    const double half_angle = params.horizontal_nm / (2.0 * kEarthRadiusNm);
    const double chord = 2.0 * std::sin(half_angle);
    const double chord2 = chord * chord * (1.0 + 1e-9);

    const int window = d_max + params.temporal_min - 1;  // |s - t| <= window
    for (int s = a.departure_min; s <= a.arrival_min(); ++s) {
        const int t_lo = std::max(b.departure_min, s - window);
        const int t_hi = std::min(b.arrival_min(), s + window);
        const auto& pa = a.at_minute(s);
        const auto& ua = sa.units[static_cast<std::size_t>(s - a.departure_min)];
        for (int t = t_lo; t <= t_hi; ++t) {
            const auto& pb = b.at_minute(t);
            if (std::abs(pa.alt_ft - pb.alt_ft) >= params.vertical_ft) continue;
            const auto& ub =
                sb.units[static_cast<std::size_t>(t - b.departure_min)];
            const double dx = ua.x - ub.x;
            const double dy = ua.y - ub.y;
            const double dz = ua.z - ub.z;
            if (dx * dx + dy * dy + dz * dz > chord2) continue;
            if (great_circle_nm(pa, pb) < params.horizontal_nm) {
                out.push_back({s, t});
            }
        }
    }
    return out;
}

}  // namespace

std::vector<PointPair> detect_potential_pairs(const Trajectory& a,
                                              const Trajectory& b,
                                              const SeparationParams& params,
                                              int d_max) {
    validate(params);
    if (a.flight_id == b.flight_id) {
        throw Error("cannot detect conflicts of a flight with itself");
    }
    if (d_max < 0) throw Error("d_max must be >= 0");
    return detect_scanned(make_scan(a), make_scan(b), params, d_max);
}

std::vector<Conflict> cluster_conflicts(const std::vector<PointPair>& pairs,
                                        const std::string& flight_i,
                                        const std::string& flight_j,
                                        const SeparationParams& params) {
    std::vector<Conflict> out;
    if (pairs.empty()) return out;

    const std::set<PointPair> cells(pairs.begin(), pairs.end());
    std::set<PointPair> seen;
    std::vector<std::vector<PointPair>> clusters;

    for (const auto& start : cells) {
        if (seen.count(start)) continue;
        std::vector<PointPair> cluster;
        std::vector<PointPair> stack{start};
        seen.insert(start);
        while (!stack.empty()) {
            const PointPair cur = stack.back();
            stack.pop_back();
            cluster.push_back(cur);
            for (int ds = -1; ds <= 1; ++ds) {
                for (int dt = -1; dt <= 1; ++dt) {
                    if (ds == 0 && dt == 0) continue;
                    const PointPair next{cur.s + ds, cur.t + dt};
                    if (cells.count(next) && !seen.count(next)) {
                        seen.insert(next);
                        stack.push_back(next);
                    }
                }
            }
        }
        clusters.push_back(std::move(cluster));
    }

    for (auto& cluster : clusters) {
        out.push_back(Conflict::from_pairs(0, flight_i, flight_j,
                                           std::move(cluster),
                                           params.temporal_min));
    }
    std::sort(out.begin(), out.end(), [](const Conflict& x, const Conflict& y) {
        return x.pairs.front() < y.pairs.front();
    });
    return out;
}

std::map<std::string, std::vector<int>> build_flight_index(
    const std::vector<Conflict>& conflicts) {
    std::map<std::string, std::vector<std::pair<int, int>>> arrivals;
    for (const auto& c : conflicts) {
        arrivals[c.flight_i].emplace_back(c.arrival_of(c.flight_i), c.id);
        arrivals[c.flight_j].emplace_back(c.arrival_of(c.flight_j), c.id);
    }
    std::map<std::string, std::vector<int>> index;
    for (auto& [flight, list] : arrivals) {
        std::sort(list.begin(), list.end());
        auto& ids = index[flight];
        ids.reserve(list.size());
        for (const auto& [arrival, id] : list) ids.push_back(id);
    }
    return index;
}

const Conflict& ConflictSet::by_id(int id) const {
    for (const auto& c : conflicts) {
        if (c.id == id) return c;
    }
    throw Error("unknown conflict id " + std::to_string(id));
}

ConflictSet detect_all(const FlightSet& fs, const SeparationParams& params,
                       int d_max) {
    validate(params);
    validate(fs);
    if (d_max < 0) throw Error("d_max must be >= 0");

    std::vector<const Trajectory*> order;
    order.reserve(fs.flights.size());
    for (const auto& t : fs.flights) order.push_back(&t);
    std::sort(order.begin(), order.end(),
              [](const Trajectory* a, const Trajectory* b) {
                  return a->flight_id < b->flight_id;
              });

    std::vector<TrajectoryScan> scans;
    scans.reserve(order.size());
    for (const auto* t : order) scans.push_back(make_scan(*t));

    const std::size_t n = order.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }

    std::vector<std::vector<Conflict>> per_pair(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const auto hits = detect_scanned(scans[i], scans[j], params, d_max);
        per_pair[p] = cluster_conflicts(hits, order[i]->flight_id,
                                        order[j]->flight_id, params);
    });

    ConflictSet cs;
    int next_id = 0;
    for (auto& clusters : per_pair) {
        for (auto& c : clusters) {
            c.id = next_id++;
            cs.conflicts.push_back(std::move(c));
        }
    }
    cs.flight_conflicts = build_flight_index(cs.conflicts);
    return cs;
}

void conflicts_to_json(const ConflictSet& cs, std::ostream& out) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : cs.conflicts) {
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto& p : c.pairs) {
            pairs.push_back(nlohmann::json::array({p.s, p.t}));
        }
        arr.push_back({{"k", c.id},
                       {"i", c.flight_i},
                       {"j", c.flight_j},
                       {"pairs", std::move(pairs)},
                       {"dmin", c.delta_min},
                       {"dmax", c.delta_max}});
    }
    out << arr.dump(2) << '\n';
}

ConflictSet conflicts_from_json(std::istream& in) {
    nlohmann::json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad conflicts JSON: ") + e.what());
    }
    if (!arr.is_array()) throw ParseError("conflicts JSON must be an array");
    ConflictSet cs;
    try {
        for (const auto& j : arr) {
            Conflict c;
            c.id = j.at("k").get<int>();
            c.flight_i = j.at("i").get<std::string>();
            c.flight_j = j.at("j").get<std::string>();
            for (const auto& p : j.at("pairs")) {
                c.pairs.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
            }
            c.delta_min = j.at("dmin").get<int>();
            c.delta_max = j.at("dmax").get<int>();
            if (c.pairs.empty()) throw ParseError("conflict with no pairs");
            cs.conflicts.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad conflicts JSON: ") + e.what());
    }
    cs.flight_conflicts = build_flight_index(cs.conflicts);
    return cs;
}

}  // namespace deconflict
