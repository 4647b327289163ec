#include "deconflict/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "deconflict/util.hpp"

namespace deconflict {

const Trajectory* FlightSet::find(const std::string& flight_id) const {
    for (const auto& t : flights) {
        if (t.flight_id == flight_id) return &t;
    }
    return nullptr;
}

void validate(const FlightSet& fs) {
    std::set<std::string> ids;
    for (const auto& t : fs.flights) {
        if (t.flight_id.empty()) throw Error("empty flight_id");
        if (!ids.insert(t.flight_id).second) {
            throw Error("duplicate flight_id: " + t.flight_id);
        }
        if (t.points.empty()) {
            throw Error("flight " + t.flight_id + " has no points");
        }
        for (const auto& p : t.points) validate_point(p);
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

constexpr const char* kCsvHeader = "flight_id,time_min,lat_deg,lon_deg,alt_ft";

double parse_double(const std::string& s, int line_no, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + what +
                         " '" + s + "'");
    }
    if (pos != s.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + what +
                         " '" + s + "'");
    }
    return v;
}

int parse_int(const std::string& s, int line_no, const char* what) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + what +
                         " '" + s + "'");
    }
    if (pos != s.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + what +
                         " '" + s + "'");
    }
    return static_cast<int>(v);
}

}  // namespace

FlightSet load_trajectories(std::istream& in) {
    std::string line;
    int line_no = 0;

    // Rows per flight, keyed by time; flight order = first appearance.
    std::vector<std::string> order;
    std::map<std::string, std::map<int, TrajectoryPoint>> rows;

    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (!saw_header) {
            auto fields = split_csv_line(line);
            std::string joined;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (i) joined += ',';
                joined += fields[i];
            }
            if (joined != kCsvHeader) {
                throw ParseError("line 1: expected header '" +
                                 std::string(kCsvHeader) + "'");
            }
            saw_header = true;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 5) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected 5 fields, got " +
                             std::to_string(fields.size()));
        }
        const std::string& id = fields[0];
        if (id.empty()) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": empty flight_id");
        }
        const int t = parse_int(fields[1], line_no, "time_min");
        TrajectoryPoint p;
        p.lat_deg = parse_double(fields[2], line_no, "lat_deg");
        p.lon_deg = parse_double(fields[3], line_no, "lon_deg");
        p.alt_ft = parse_double(fields[4], line_no, "alt_ft");
        try {
            validate_point(p);
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " +
                             e.what());
        }

        auto it = rows.find(id);
        if (it == rows.end()) {
            order.push_back(id);
            it = rows.emplace(id, std::map<int, TrajectoryPoint>{}).first;
        }
        if (!it->second.emplace(t, p).second) {
            throw ParseError("duplicate row for flight " + id + " at minute " +
                             std::to_string(t));
        }
    }

    FlightSet fs;
    fs.flights.reserve(order.size());
    for (const auto& id : order) {
        const auto& by_time = rows[id];
        Trajectory traj;
        traj.flight_id = id;
        traj.departure_min = by_time.begin()->first;
        int expect = traj.departure_min;
        for (const auto& [t, p] : by_time) {
            if (t != expect) {
                throw ParseError("flight " + id + ": gap between minutes " +
                                 std::to_string(expect - 1) + " and " +
                                 std::to_string(t));
            }
            traj.points.push_back(p);
            ++expect;
        }
        fs.flights.push_back(std::move(traj));
    }
    validate(fs);
    return fs;
}

void save_trajectories(const FlightSet& fs, std::ostream& out) {
    out << kCsvHeader << '\n';
    char buf[128];
    for (const auto& traj : fs.flights) {
        for (std::size_t i = 0; i < traj.points.size(); ++i) {
            const auto& p = traj.points[i];
            std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g,%.17g\n",
                          traj.flight_id.c_str(),
                          traj.departure_min + static_cast<int>(i), p.lat_deg,
                          p.lon_deg, p.alt_ft);
            out << buf;
        }
    }
}

namespace {

void validate_box(const GeoBox& b, const char* name) {
    if (b.lat_min > b.lat_max || b.lon_min > b.lon_max) {
        throw Error(std::string(name) + " box has inverted bounds");
    }
    validate_point({b.lat_min, b.lon_min, 0.0});
    validate_point({b.lat_max, std::nextafter(b.lon_max, -180.0), 0.0});
}

void validate_config(const SyntheticConfig& c) {
    if (c.flight_count < 0) throw Error("flight_count must be >= 0");
    if (c.speed_knots <= 0.0) throw Error("speed_knots must be positive");
    if (c.departure_window_min < 0) {
        throw Error("departure_window_min must be >= 0");
    }
    if (c.altitudes_ft.empty()) throw Error("altitudes_ft must be non-empty");
    validate_box(c.origin, "origin");
    validate_box(c.destination, "destination");
    const bool zero_extent = c.origin.lat_min == c.origin.lat_max &&
                             c.origin.lon_min == c.origin.lon_max;
    if (zero_extent && c.origin == c.destination) {
        throw Error("degenerate corridor: origin and destination collapse to one point");
    }
}

TrajectoryPoint sample_in_box(const GeoBox& b, double alt_ft,
                              std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lat(b.lat_min, b.lat_max);
    std::uniform_real_distribution<double> lon(b.lon_min, b.lon_max);
    return {lat(rng), lon(rng), alt_ft};
}

}  // namespace

SyntheticConfig default_corridor(int flight_count, std::uint64_t seed) {
    SyntheticConfig c;
    c.flight_count = flight_count;
    c.origin = {40.0, 44.0, -74.0, -69.0};
    c.destination = {50.0, 53.0, -9.0, -4.0};
    c.speed_knots = 480.0;
    c.altitudes_ft = {34000.0, 36000.0};
    c.base_departure_min = 360;
    c.departure_window_min = 60;
    c.seed = seed;
    return c;
}

FlightSet generate_synthetic(const SyntheticConfig& config) {
    validate_config(config);

    std::mt19937_64 rng(config.seed);
    FlightSet fs;
    fs.flights.reserve(static_cast<std::size_t>(config.flight_count));

    const double nm_per_min = config.speed_knots / 60.0;
    for (int i = 0; i < config.flight_count; ++i) {
        std::uniform_int_distribution<std::size_t> alt_pick(
            0, config.altitudes_ft.size() - 1);
        const double alt = config.altitudes_ft[alt_pick(rng)];
        const TrajectoryPoint from = sample_in_box(config.origin, alt, rng);
        const TrajectoryPoint to = sample_in_box(config.destination, alt, rng);
        std::uniform_int_distribution<int> dep(
            config.base_departure_min,
            config.base_departure_min + config.departure_window_min);

        Trajectory traj;
        char name[32];
        std::snprintf(name, sizeof(name), "F%04d", i);
        traj.flight_id = name;
        traj.departure_min = dep(rng);

        const double dist = great_circle_nm(from, to);
        const int duration =
            dist <= 0.0
                ? 0
                : std::max(1, static_cast<int>(std::ceil(dist / nm_per_min)));
        traj.points.reserve(static_cast<std::size_t>(duration) + 1);
        for (int t = 0; t <= duration; ++t) {
            const double f =
                duration == 0
                    ? 0.0
                    : std::min(1.0, static_cast<double>(t) * nm_per_min / dist);
            traj.points.push_back(gc_interpolate(from, to, f));
        }
        fs.flights.push_back(std::move(traj));
    }
    validate(fs);
    return fs;
}

namespace {

GeoBox box_from_json(const nlohmann::json& j) {
    GeoBox b;
    b.lat_min = j.at("lat_min").get<double>();
    b.lat_max = j.at("lat_max").get<double>();
    b.lon_min = j.at("lon_min").get<double>();
    b.lon_max = j.at("lon_max").get<double>();
    return b;
}

nlohmann::json box_to_json(const GeoBox& b) {
    return {{"lat_min", b.lat_min},
            {"lat_max", b.lat_max},
            {"lon_min", b.lon_min},
            {"lon_max", b.lon_max}};
}

}  // namespace

SyntheticConfig synthetic_config_from_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad synthetic config JSON: ") + e.what());
    }
    try {
        SyntheticConfig c;
        c.flight_count = j.at("flights").get<int>();
        c.origin = box_from_json(j.at("origin"));
        c.destination = box_from_json(j.at("destination"));
        c.speed_knots = j.value("speed_knots", c.speed_knots);
        if (j.contains("altitudes_ft")) {
            c.altitudes_ft = j.at("altitudes_ft").get<std::vector<double>>();
        }
        c.base_departure_min = j.value("base_departure_min", c.base_departure_min);
        c.departure_window_min =
            j.value("departure_window_min", c.departure_window_min);
        c.seed = j.value("seed", c.seed);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad synthetic config JSON: ") + e.what());
    }
}

void synthetic_config_to_json(const SyntheticConfig& config,
                              std::ostream& out) {
    nlohmann::json j{{"flights", config.flight_count},
                     {"origin", box_to_json(config.origin)},
                     {"destination", box_to_json(config.destination)},
                     {"speed_knots", config.speed_knots},
                     {"altitudes_ft", config.altitudes_ft},
                     {"base_departure_min", config.base_departure_min},
                     {"departure_window_min", config.departure_window_min},
                     {"seed", config.seed}};
    out << j.dump(2) << '\n';
}

}  // namespace deconflict
