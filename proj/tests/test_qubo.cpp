#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "deconflict/qubo.hpp"
#include "deconflict/solve.hpp"
#include "support/oracles.hpp"

using namespace deconflict;
namespace dt = deconflict::testing;

namespace {

std::vector<std::uint8_t> bits_of(std::uint32_t mask, int n) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        bits[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>((mask >> i) & 1u);
    }
    return bits;
}

BinaryQuadraticForm random_form(std::mt19937_64& rng, int n) {
    BinaryQuadraticForm q;
    for (int i = 0; i < n; ++i) {
        q.add_variable(DepartureDelayKey{"X" + std::to_string(i), 0});
    }
    std::uniform_real_distribution<double> coeff(-5.0, 5.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    q.add_offset(coeff(rng));
    for (int i = 0; i < n; ++i) {
        if (coin(rng) < 0.8) q.add_linear(i, coeff(rng));
        for (int j = i + 1; j < n; ++j) {
            if (coin(rng) < 0.4) q.add_quadratic(i, j, coeff(rng));
        }
    }
    q.prune_zeros();
    return q;
}

}  // namespace

TEST_CASE("encoding penalty expansion") {
    SUBCASE("single-bit group") {
        BinaryQuadraticForm q;
        const int x = q.add_variable(DepartureDelayKey{"A", 0});
        add_encoding_penalty(q, {{x}}, 2.5);
        CHECK(q.linear(x) == -2.5);
        CHECK(q.offset() == 2.5);
        CHECK(q.energy(bits_of(0, 1)) == 2.5);  // (0-1)^2
        CHECK(q.energy(bits_of(1, 1)) == 0.0);
    }

    SUBCASE("two-bit group") {
        BinaryQuadraticForm q;
        const int x = q.add_variable(DepartureDelayKey{"A", 0});
        const int y = q.add_variable(DepartureDelayKey{"A", 1});
        add_encoding_penalty(q, {{x, y}}, 1.0);
        CHECK(q.linear(x) == -1.0);
        CHECK(q.linear(y) == -1.0);
        CHECK(q.quadratic(x, y) == 2.0);
        CHECK(q.offset() == 1.0);
        CHECK(q.energy(bits_of(0b11, 2)) == 1.0);  // (2-1)^2
    }

    SUBCASE("three-bit group with two bits set costs one unit") {
        BinaryQuadraticForm q;
        std::vector<int> group;
        for (int l = 0; l < 3; ++l) {
            group.push_back(q.add_variable(DepartureDelayKey{"A", l}));
        }
        add_encoding_penalty(q, {group}, 4.0);
        CHECK(q.energy(bits_of(0b011, 3)) == 4.0);
        CHECK(q.energy(bits_of(0b111, 3)) == 16.0);  // (3-1)^2 * 4
        CHECK(q.energy(bits_of(0b100, 3)) == 0.0);
    }

    SUBCASE("empty group is rejected") {
        BinaryQuadraticForm q;
        CHECK_THROWS_AS(add_encoding_penalty(q, {{}}, 1.0), Error);
    }
}

TEST_CASE("departure model") {
    SUBCASE("variable count is flights times levels") {
        const Instance inst = dt::two_flight_instance(-2, 2, 6);
        const Discretization disc{3, 2};
        const auto m = build_departure_qubo(inst, disc, {1.0, 1.0, 1.0});
        CHECK(m.form.num_variables() == 6);
    }

    SUBCASE("mismatched d_max is rejected") {
        const Instance inst = dt::two_flight_instance(-2, 2, 6);
        CHECK_THROWS_AS(build_departure_qubo(inst, {3, 3}, {1.0, 1.0, 1.0}),
                        Error);
    }

    SUBCASE("all-zero bits pay one encoding penalty per flight") {
        const Instance inst = dt::two_flight_instance(-2, 2, 6);
        const auto m = build_departure_qubo(inst, {3, 2}, {7.0, 9.0, 0.0});
        const std::vector<std::uint8_t> zeros(6, 0);
        CHECK(m.form.energy(zeros) == 7.0 * 2);
    }

    SUBCASE("hand-evaluated assignment") {
        // two flights, one conflict B = [-2, 2], delta_d = 3, N_d = 1;
        // first flight delayed 3, second on time: cost is pure delay
        const Instance inst = dt::two_flight_instance(-2, 2, 3);
        const auto m = build_departure_qubo(inst, {3, 1}, {100.0, 100.0, 0.0});
        std::vector<std::uint8_t> bits(4, 0);
        bits[static_cast<std::size_t>(
            *m.form.index_of(DepartureDelayKey{"FA", 1}))] = 1;
        bits[static_cast<std::size_t>(
            *m.form.index_of(DepartureDelayKey{"FB", 0}))] = 1;
        CHECK(m.form.energy(bits) == 3.0);
        const auto decoded = decode(m, bits);
        CHECK(decoded.feasible());
        CHECK(decoded.total_delay == 3.0);
        CHECK(decoded.departure_delay.at("FA") == 3.0);

        // both on time: conflict actualized
        std::vector<std::uint8_t> zeros_set(4, 0);
        zeros_set[static_cast<std::size_t>(
            *m.form.index_of(DepartureDelayKey{"FA", 0}))] = 1;
        zeros_set[static_cast<std::size_t>(
            *m.form.index_of(DepartureDelayKey{"FB", 0}))] = 1;
        CHECK(m.form.energy(zeros_set) == 100.0);
        CHECK(!decode(m, zeros_set).conflict_free);
    }

    SUBCASE("energy matches the reference evaluator on random assignments") {
        std::mt19937_64 rng(31);
        for (int round = 0; round < 30; ++round) {
            const Instance inst = dt::random_instance(rng, 4, 9);
            const auto m =
                build_departure_qubo(inst, {3, 3}, {11.0, 13.0, 17.0});
            const int n = m.form.num_variables();
            std::uniform_int_distribution<std::uint32_t> mask(
                0, (1u << n) - 1u);
            for (int trial = 0; trial < 40; ++trial) {
                const auto bits = bits_of(mask(rng), n);
                CHECK(m.form.energy(bits) ==
                      doctest::Approx(dt::reference_energy(m, bits))
                          .epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("sufficient_penalties") {
    const Instance inst = dt::two_flight_instance(-2, 2, 18);
    const auto w = sufficient_penalties(inst, {3, 6});
    CHECK(w.encoding == 21.0);
    CHECK(w.conflict == 21.0);
    CHECK(w.consistency == 21.0);

    const Instance tiny = dt::two_flight_instance(-2, 2, 0);
    const auto w0 = sufficient_penalties(tiny, {1, 0});
    CHECK(w0.encoding == 1.0);
}

TEST_CASE("ising transform") {
    SUBCASE("single linear term") {
        BinaryQuadraticForm q;
        q.add_variable(DepartureDelayKey{"A", 0});
        q.add_linear(0, 1.0);
        const IsingForm m = to_ising(q);
        CHECK(m.h[0] == 0.5);
        CHECK(m.offset == 0.5);
        CHECK(m.coupling.empty());
    }

    SUBCASE("single quadratic term") {
        BinaryQuadraticForm q;
        q.add_variable(DepartureDelayKey{"A", 0});
        q.add_variable(DepartureDelayKey{"B", 0});
        q.add_quadratic(0, 1, 1.0);
        const IsingForm m = to_ising(q);
        CHECK(m.coupling.at({0, 1}) == 0.25);
        CHECK(m.h[0] == 0.25);
        CHECK(m.h[1] == 0.25);
        CHECK(m.offset == 0.25);
    }

    SUBCASE("empty form") {
        const IsingForm m = to_ising(BinaryQuadraticForm{});
        CHECK(m.h.empty());
        CHECK(m.coupling.empty());
        CHECK(m.offset == 0.0);
    }

    SUBCASE("energy identity under s = 2x - 1 on random forms") {
        std::mt19937_64 rng(41);
        for (int round = 0; round < 25; ++round) {
            std::uniform_int_distribution<int> size(1, 12);
            const int n = size(rng);
            const auto q = random_form(rng, n);
            const IsingForm m = to_ising(q);
            for (std::uint32_t maskv = 0; maskv < (1u << n); ++maskv) {
                const auto bits = bits_of(maskv, n);
                std::vector<int> spins(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i) {
                    spins[static_cast<std::size_t>(i)] =
                        bits[static_cast<std::size_t>(i)] ? 1 : -1;
                }
                CHECK(std::abs(q.energy(bits) - m.energy(spins)) <= 1e-9);
            }
        }
    }
}

TEST_CASE("max_coefficient_ratio") {
    SUBCASE("mixed families") {
        IsingForm m;
        m.h = {1.0, 2.0};
        m.coupling[{0, 1}] = 1.0;
        m.coupling[{0, 2}] = 4.0;  // not a real graph, ratios only
        m.h.push_back(0.0);
        CHECK(max_coefficient_ratio(m) == 4.0);
    }

    SUBCASE("uniform magnitudes") {
        IsingForm m;
        m.h = {1.0, -1.0};
        m.coupling[{0, 1}] = 1.0;
        CHECK(max_coefficient_ratio(m) == 1.0);
    }

    SUBCASE("zeros are excluded from the minimum") {
        IsingForm m;
        m.h = {0.0, 3.0, 1.0};
        CHECK(max_coefficient_ratio(m) == 3.0);
    }

    SUBCASE("all-zero model is an error") {
        IsingForm m;
        m.h = {0.0, 0.0};
        CHECK_THROWS_AS(max_coefficient_ratio(m), Error);
    }
}

TEST_CASE("decode flags") {
    const Instance inst = dt::two_flight_instance(4, 6, 3);
    const auto m = build_departure_qubo(inst, {3, 1}, {5.0, 5.0, 0.0});

    SUBCASE("clean zero assignment is feasible here") {
        // B = [4,6] does not contain 0
        std::vector<std::uint8_t> bits(4, 0);
        bits[static_cast<std::size_t>(
            *m.form.index_of(DepartureDelayKey{"FA", 0}))] = 1;
        bits[static_cast<std::size_t>(
            *m.form.index_of(DepartureDelayKey{"FB", 0}))] = 1;
        const auto d = decode(m, bits);
        CHECK(d.feasible());
        CHECK(d.total_delay == 0.0);
    }

    SUBCASE("broken one-hot group is flagged") {
        std::vector<std::uint8_t> bits(4, 1);
        const auto d = decode(m, bits);
        CHECK(!d.encoding_valid);
        CHECK(!d.notes.empty());
    }
}

TEST_CASE("qubo file round trip") {
    SUBCASE("round trip preserves everything") {
        std::mt19937_64 rng(53);
        const auto q = random_form(rng, 9);
        std::ostringstream qubo_out, vars_out;
        export_qubo(q, qubo_out);
        export_variable_map(q, vars_out);

        std::istringstream qubo_in(qubo_out.str());
        auto back = import_qubo(qubo_in);
        std::istringstream vars_in(vars_out.str());
        import_variable_map(back, vars_in);
        CHECK(back == q);
    }

    SUBCASE("empty form round trips") {
        BinaryQuadraticForm q;
        std::ostringstream out;
        export_qubo(q, out);
        std::istringstream in(out.str());
        CHECK(import_qubo(in) == q);
    }

    SUBCASE("undeclared node is rejected") {
        std::istringstream in("p qubo 0 2 1 1\n0 0 1.5\n0 5 1.0\n");
        CHECK_THROWS_AS(import_qubo(in), ParseError);
    }

    SUBCASE("garbage is rejected") {
        std::istringstream no_header("0 0 1.5\n");
        CHECK_THROWS_AS(import_qubo(no_header), ParseError);
        std::istringstream bad_line("p qubo 0 2 1 0\n0 zero 1.5\n");
        CHECK_THROWS_AS(import_qubo(bad_line), ParseError);
    }

    SUBCASE("variable map errors") {
        std::mt19937_64 rng(61);
        const auto q = random_form(rng, 4);
        auto imported = [&] {
            std::ostringstream out;
            export_qubo(q, out);
            std::istringstream in(out.str());
            return import_qubo(in);
        }();

        std::istringstream too_short("[{\"index\":0,\"kind\":\"ancilla\",\"conflict\":1}]");
        CHECK_THROWS_AS(import_variable_map(imported, too_short), ParseError);

        std::istringstream bad_kind(
            "[{\"index\":0,\"kind\":\"mystery\"},{\"index\":1,\"kind\":\"ancilla\",\"conflict\":1},"
            "{\"index\":2,\"kind\":\"ancilla\",\"conflict\":2},{\"index\":3,\"kind\":\"ancilla\",\"conflict\":3}]");
        CHECK_THROWS_AS(import_variable_map(imported, bad_kind), ParseError);

        std::istringstream duplicate(
            "[{\"index\":0,\"kind\":\"ancilla\",\"conflict\":1},{\"index\":1,\"kind\":\"ancilla\",\"conflict\":1},"
            "{\"index\":2,\"kind\":\"ancilla\",\"conflict\":2},{\"index\":3,\"kind\":\"ancilla\",\"conflict\":3}]");
        CHECK_THROWS_AS(import_variable_map(imported, duplicate), Error);
    }

    SUBCASE("energies preserved on random assignments") {
        std::mt19937_64 rng(59);
        const auto q = random_form(rng, 11);
        std::ostringstream out;
        export_qubo(q, out);
        std::istringstream in(out.str());
        const auto back = import_qubo(in);
        std::uniform_int_distribution<std::uint32_t> mask(0, (1u << 11) - 1);
        for (int trial = 0; trial < 100; ++trial) {
            const auto bits = bits_of(mask(rng), 11);
            CHECK(back.energy(bits) == doctest::Approx(q.energy(bits)).epsilon(1e-12));
        }
    }
}
