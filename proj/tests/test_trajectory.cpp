#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "deconflict/conflict.hpp"
#include "deconflict/trajectory.hpp"
#include "deconflict/util.hpp"

using namespace deconflict;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("great circle distance basics") {
    const TrajectoryPoint origin{0.0, 0.0, 0.0};

    SUBCASE("identical points") {
        CHECK(great_circle_nm(origin, origin) == 0.0);
        const TrajectoryPoint p{51.5, -0.1, 35000.0};
        CHECK(great_circle_nm(p, p) == 0.0);
    }

    SUBCASE("antipodal points span half the sphere") {
        const TrajectoryPoint anti{0.0, -180.0, 0.0};
        CHECK(great_circle_nm(origin, anti) ==
              doctest::Approx(kPi * kEarthRadiusNm).epsilon(1e-12));
    }

    SUBCASE("half a degree of longitude at the equator") {
        const TrajectoryPoint east{0.0, 0.5, 0.0};
        const double expected = kEarthRadiusNm * 0.5 * kPi / 180.0;
        CHECK(great_circle_nm(origin, east) ==
              doctest::Approx(expected).epsilon(1e-12));
        CHECK(great_circle_nm(origin, east) == doctest::Approx(30.02).epsilon(1e-3));
    }

    SUBCASE("symmetry and non-negativity on random points") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> lat(-89.0, 89.0);
        std::uniform_real_distribution<double> lon(-180.0, 179.0);
        for (int i = 0; i < 200; ++i) {
            const TrajectoryPoint p{lat(rng), lon(rng), 0.0};
            const TrajectoryPoint q{lat(rng), lon(rng), 0.0};
            const double pq = great_circle_nm(p, q);
            CHECK(pq >= 0.0);
            CHECK(pq == doctest::Approx(great_circle_nm(q, p)).epsilon(1e-15));
        }
    }

    SUBCASE("triangle inequality on random triples") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> lat(-89.0, 89.0);
        std::uniform_real_distribution<double> lon(-180.0, 179.0);
        for (int i = 0; i < 500; ++i) {
            const TrajectoryPoint a{lat(rng), lon(rng), 0.0};
            const TrajectoryPoint b{lat(rng), lon(rng), 0.0};
            const TrajectoryPoint c{lat(rng), lon(rng), 0.0};
            const double ab = great_circle_nm(a, b);
            const double bc = great_circle_nm(b, c);
            const double ac = great_circle_nm(a, c);
            CHECK(ac <= ab + bc + 1e-9 * std::max(1.0, ac));
        }
    }
}

TEST_CASE("great circle interpolation stays on the arc") {
    const TrajectoryPoint a{40.0, -73.0, 34000.0};
    const TrajectoryPoint b{51.0, -1.0, 34000.0};
    const double total = great_circle_nm(a, b);
    for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const TrajectoryPoint mid = gc_interpolate(a, b, f);
        CHECK(great_circle_nm(a, mid) == doctest::Approx(f * total).epsilon(1e-9));
    }
}

TEST_CASE("csv loading") {
    SUBCASE("empty stream yields no flights") {
        std::istringstream in("");
        const FlightSet fs = load_trajectories(in);
        CHECK(fs.size() == 0);
    }

    SUBCASE("header only yields no flights") {
        std::istringstream in("flight_id,time_min,lat_deg,lon_deg,alt_ft\n");
        CHECK(load_trajectories(in).size() == 0);
    }

    SUBCASE("two consecutive rows make one trajectory") {
        std::istringstream in(
            "flight_id,time_min,lat_deg,lon_deg,alt_ft\n"
            "AA1,600,40.0,-73.0,34000\n"
            "AA1,601,40.1,-72.9,34000\n");
        const FlightSet fs = load_trajectories(in);
        REQUIRE(fs.size() == 1);
        CHECK(fs.flights[0].flight_id == "AA1");
        CHECK(fs.flights[0].departure_min == 600);
        CHECK(fs.flights[0].arrival_min() == 601);
    }

    SUBCASE("gap in minutes is rejected") {
        std::istringstream in(
            "flight_id,time_min,lat_deg,lon_deg,alt_ft\n"
            "AA1,600,40.0,-73.0,34000\n"
            "AA1,602,40.1,-72.9,34000\n");
        CHECK_THROWS_AS(load_trajectories(in), ParseError);
    }

    SUBCASE("duplicate (flight, minute) is rejected") {
        std::istringstream in(
            "flight_id,time_min,lat_deg,lon_deg,alt_ft\n"
            "AA1,600,40.0,-73.0,34000\n"
            "AA1,600,40.1,-72.9,34000\n");
        CHECK_THROWS_AS(load_trajectories(in), ParseError);
    }

    SUBCASE("malformed rows are rejected") {
        std::istringstream bad_field(
            "flight_id,time_min,lat_deg,lon_deg,alt_ft\n"
            "AA1,600,forty,-73.0,34000\n");
        CHECK_THROWS_AS(load_trajectories(bad_field), ParseError);

        std::istringstream short_row(
            "flight_id,time_min,lat_deg,lon_deg,alt_ft\n"
            "AA1,600,40.0\n");
        CHECK_THROWS_AS(load_trajectories(short_row), ParseError);

        std::istringstream bad_header("id,time\nAA1,600,40.0,-73.0,34000\n");
        CHECK_THROWS_AS(load_trajectories(bad_header), ParseError);

        std::istringstream bad_lat(
            "flight_id,time_min,lat_deg,lon_deg,alt_ft\n"
            "AA1,600,95.0,-73.0,34000\n");
        CHECK_THROWS_AS(load_trajectories(bad_lat), ParseError);
    }

    SUBCASE("interleaved flights are grouped") {
        std::istringstream in(
            "flight_id,time_min,lat_deg,lon_deg,alt_ft\n"
            "AA1,600,40.0,-73.0,34000\n"
            "BB2,400,42.0,-70.0,36000\n"
            "AA1,601,40.1,-72.9,34000\n"
            "BB2,401,42.1,-69.9,36000\n");
        const FlightSet fs = load_trajectories(in);
        REQUIRE(fs.size() == 2);
        CHECK(fs.flights[0].flight_id == "AA1");
        CHECK(fs.flights[1].flight_id == "BB2");
        CHECK(fs.flights[1].departure_min == 400);
    }
}

TEST_CASE("save/load round trip") {
    const FlightSet fs = generate_synthetic(default_corridor(8, 3));
    std::ostringstream out;
    save_trajectories(fs, out);
    std::istringstream in(out.str());
    const FlightSet back = load_trajectories(in);
    CHECK(back == fs);
}

TEST_CASE("synthetic generation") {
    SUBCASE("zero flights") {
        SyntheticConfig c = default_corridor(0, 7);
        CHECK(generate_synthetic(c).size() == 0);
    }

    SUBCASE("deterministic for a fixed seed") {
        const SyntheticConfig c = default_corridor(20, 5);
        const FlightSet a = generate_synthetic(c);
        const FlightSet b = generate_synthetic(c);
        CHECK(a == b);

        SyntheticConfig other = c;
        other.seed = 6;
        CHECK(generate_synthetic(other) != a);
    }

    SUBCASE("flights have constant altitude and plausible speed") {
        const SyntheticConfig c = default_corridor(5, 2);
        const FlightSet fs = generate_synthetic(c);
        for (const auto& f : fs.flights) {
            REQUIRE(!f.points.empty());
            for (const auto& p : f.points) {
                CHECK(p.alt_ft == f.points.front().alt_ft);
            }
            const double per_min = c.speed_knots / 60.0;
            for (std::size_t i = 1; i < f.points.size(); ++i) {
                CHECK(great_circle_nm(f.points[i - 1], f.points[i]) <=
                      per_min + 1e-6);
            }
        }
    }

    SUBCASE("dense corridor produces conflicts") {
        const FlightSet fs = generate_synthetic(default_corridor(100, 1));
        const ConflictSet cs = detect_all(fs, SeparationParams{}, 18);
        CHECK(cs.conflicts.size() >= 1);
    }

    SUBCASE("degenerate corridor is rejected") {
        SyntheticConfig c = default_corridor(3, 1);
        c.origin = {45.0, 45.0, -30.0, -30.0};
        c.destination = c.origin;
        CHECK_THROWS_AS(generate_synthetic(c), Error);
    }
}

TEST_CASE("synthetic config json round trip") {
    SyntheticConfig c = default_corridor(42, 9);
    c.altitudes_ft = {32000.0, 36000.0, 38000.0};
    std::ostringstream out;
    synthetic_config_to_json(c, out);
    std::istringstream in(out.str());
    const SyntheticConfig back = synthetic_config_from_json(in);
    CHECK(back.flight_count == c.flight_count);
    CHECK(back.origin == c.origin);
    CHECK(back.destination == c.destination);
    CHECK(back.speed_knots == c.speed_knots);
    CHECK(back.altitudes_ft == c.altitudes_ft);
    CHECK(back.seed == c.seed);

    std::istringstream bad("{\"flights\": 3}");
    CHECK_THROWS_AS(synthetic_config_from_json(bad), ParseError);
}
