#include "deconflict/solve.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <random>

#include "deconflict/util.hpp"

namespace deconflict {

void validate(const AnnealSchedule& s) {
    if (s.sweeps < 1 || s.restarts < 1) {
        throw Error("schedule needs at least one sweep and one restart");
    }
    if (!(s.beta_end > s.beta_start) || !(s.beta_start > 0.0)) {
        throw Error("schedule needs beta_end > beta_start > 0");
    }
}

namespace {

/// Per-variable neighbor list for O(degree) single-flip energy deltas.
struct Adjacency {
    std::vector<std::vector<std::pair<int, double>>> nb;

    explicit Adjacency(const BinaryQuadraticForm& q)
        : nb(static_cast<std::size_t>(q.num_variables())) {
        for (const auto& [edge, v] : q.quadratic_terms()) {
            if (v == 0.0) continue;
            nb[static_cast<std::size_t>(edge.first)].emplace_back(edge.second, v);
            nb[static_cast<std::size_t>(edge.second)].emplace_back(edge.first, v);
        }
    }

    /// Energy change if bit i were flipped under the current assignment.
    double flip_delta(const BinaryQuadraticForm& q,
                      const std::vector<std::uint8_t>& bits, int i) const {
        double d = q.linear(i);
        for (const auto& [j, v] : nb[static_cast<std::size_t>(i)]) {
            if (bits[static_cast<std::size_t>(j)]) d += v;
        }
        return bits[static_cast<std::size_t>(i)] ? -d : d;
    }
};

}  // namespace

void for_each_assignment(
    const BinaryQuadraticForm& q,
    const std::function<void(std::span<const std::uint8_t>, double)>& visit) {
    const int n = q.num_variables();
    if (n > 62) throw GuardError("too many variables to enumerate");
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
    double energy = q.offset();
    visit(bits, energy);
    if (n == 0) return;

    const Adjacency adj(q);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t m = 1; m < total; ++m) {
        const int i = std::countr_zero(m);  // Gray-code flip position
        energy += adj.flip_delta(q, bits, i);
        bits[static_cast<std::size_t>(i)] ^= 1;
        visit(bits, energy);
    }
}

SolveResult brute_force_qubo(const BinaryQuadraticForm& q) {
    if (q.num_variables() > 30) {
        throw GuardError("brute force limited to 30 variables, got " +
                         std::to_string(q.num_variables()));
    }
    const auto start = std::chrono::steady_clock::now();

    SolveResult result;
    bool have = false;
    for_each_assignment(q, [&](std::span<const std::uint8_t> bits, double e) {
        ++result.evaluations;
        // Cheap filter first; near-candidates get an exact re-evaluation to
        // keep the incremental walk honest on non-integral coefficients.
        if (have && e > result.best_energy + 1e-9) return;
        const double exact = q.energy(bits);
        if (!have || exact < result.best_energy) {
            result.best_energy = exact;
            result.best_bits.assign(bits.begin(), bits.end());
            have = true;
        } else if (exact == result.best_energy &&
                   std::lexicographical_compare(bits.begin(), bits.end(),
                                                result.best_bits.begin(),
                                                result.best_bits.end())) {
            result.best_bits.assign(bits.begin(), bits.end());
        }
    });
    result.restart_best = {result.best_energy};
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return result;
}

DelayAssignment brute_force_delays(const Instance& inst,
                                   const Discretization& disc) {
    validate(disc);
    const std::size_t n = inst.flights.size();
    const double combos =
        std::pow(static_cast<double>(disc.n_d) + 1.0, static_cast<double>(n));
    if (combos > 1e7) {
        throw GuardError("delay enumeration too large: " +
                         std::to_string(combos) + " assignments");
    }

    std::vector<std::string> flights;
    flights.reserve(n);
    for (const auto& t : inst.flights.flights) flights.push_back(t.flight_id);
    std::map<std::string, std::size_t> flight_pos;
    for (std::size_t f = 0; f < n; ++f) flight_pos[flights[f]] = f;

    struct ConflictSlots {
        const Conflict* c;
        std::size_t i, j;
    };
    std::vector<ConflictSlots> checks;
    checks.reserve(inst.conflicts.size());
    for (const auto& c : inst.conflicts) {
        checks.push_back(
            {&c, flight_pos.at(c.flight_i), flight_pos.at(c.flight_j)});
    }

    DelayAssignment best;
    best.total_delay = std::numeric_limits<double>::infinity();

    std::vector<int> levels(n, 0);
    for (;;) {
        int total = 0;
        for (int l : levels) total += disc.delta_d * l;
        if (static_cast<double>(total) < best.total_delay) {
            bool ok = true;
            for (const auto& s : checks) {
                if (!is_avoided(*s.c, disc.delta_d * levels[s.i],
                                disc.delta_d * levels[s.j])) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                best.feasible = true;
                best.total_delay = total;
                best.delays.clear();
                for (std::size_t f = 0; f < n; ++f) {
                    best.delays[flights[f]] = disc.delta_d * levels[f];
                }
            }
        }
        // odometer: last flight varies fastest, so the first minimum found is
        // the lexicographically smallest in flight order
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (levels[pos] < disc.n_d) {
                ++levels[pos];
                std::fill(levels.begin() + static_cast<std::ptrdiff_t>(pos) + 1,
                          levels.end(), 0);
                break;
            }
            if (pos == 0) return best;
        }
        if (n == 0) break;
    }
    return best;
}

SolveResult simulated_annealing(const BinaryQuadraticForm& q,
                                const AnnealSchedule& schedule) {
    validate(schedule);
    const auto start = std::chrono::steady_clock::now();
    const int n = q.num_variables();

    SolveResult result;
    if (n == 0) {
        result.best_energy = q.offset();
        result.restart_best.assign(static_cast<std::size_t>(schedule.restarts),
                                   q.offset());
        return result;
    }

    const Adjacency adj(q);
    std::vector<double> betas(static_cast<std::size_t>(schedule.sweeps));
    for (int t = 0; t < schedule.sweeps; ++t) {
        const double frac =
            schedule.sweeps == 1
                ? 0.0
                : static_cast<double>(t) / (schedule.sweeps - 1);
        betas[static_cast<std::size_t>(t)] =
            schedule.beta_start *
            std::pow(schedule.beta_end / schedule.beta_start, frac);
    }

    struct RestartOutcome {
        std::vector<std::uint8_t> bits;
        double energy = 0.0;
    };
    std::vector<RestartOutcome> outcomes(
        static_cast<std::size_t>(schedule.restarts));

    parallel_for(static_cast<std::size_t>(schedule.restarts), [&](std::size_t r) {
        std::mt19937_64 rng(schedule.seed + r);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
        double energy = q.energy(bits);

        std::vector<std::uint8_t> best_bits = bits;
        double best_energy = energy;

        for (double beta : betas) {
            for (int i = 0; i < n; ++i) {
                const double delta = adj.flip_delta(q, bits, i);
                if (delta <= 0.0 || unit(rng) < std::exp(-beta * delta)) {
                    bits[static_cast<std::size_t>(i)] ^= 1;
                    energy += delta;
                    if (energy < best_energy) {
                        best_energy = energy;
                        best_bits = bits;
                    }
                }
            }
        }
        outcomes[r].energy = q.energy(best_bits);  // exact, not incremental
        outcomes[r].bits = std::move(best_bits);
    });

    result.evaluations = static_cast<std::uint64_t>(schedule.restarts) *
                         static_cast<std::uint64_t>(schedule.sweeps) *
                         static_cast<std::uint64_t>(n);
    result.restart_best.reserve(outcomes.size());
    for (const auto& o : outcomes) result.restart_best.push_back(o.energy);

    const RestartOutcome* best = &outcomes.front();
    for (const auto& o : outcomes) {
        if (o.energy < best->energy ||
            (o.energy == best->energy &&
             std::lexicographical_compare(o.bits.begin(), o.bits.end(),
                                          best->bits.begin(),
                                          best->bits.end()))) {
            best = &o;
        }
    }
    result.best_bits = best->bits;
    result.best_energy = best->energy;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return result;
}

ValidityMap penalty_validity_sweep(const Instance& inst,
                                   const Discretization& disc,
                                   std::span<const double> conflict_weights,
                                   std::span<const double> encoding_weights) {
    ValidityMap map;
    map.conflict_weights.assign(conflict_weights.begin(),
                                conflict_weights.end());
    map.encoding_weights.assign(encoding_weights.begin(),
                                encoding_weights.end());
    map.valid.assign(conflict_weights.size(),
                     std::vector<bool>(encoding_weights.size(), false));

    for (std::size_t ci = 0; ci < conflict_weights.size(); ++ci) {
        for (std::size_t ei = 0; ei < encoding_weights.size(); ++ei) {
            PenaltyWeights w;
            w.conflict = conflict_weights[ci];
            w.encoding = encoding_weights[ei];
            const CompiledModel m = build_departure_qubo(inst, disc, w);
            if (m.form.num_variables() > 30) {
                throw GuardError("validity sweep instance too large");
            }

            double min_energy = std::numeric_limits<double>::infinity();
            for_each_assignment(
                m.form, [&](std::span<const std::uint8_t>, double e) {
                    min_energy = std::min(min_energy, e);
                });

            bool all_feasible = true;
            for_each_assignment(
                m.form, [&](std::span<const std::uint8_t> bits, double e) {
                    if (!all_feasible || e > min_energy + 1e-9) return;
                    const DecodedSolution d = decode(m, bits);
                    if (!d.feasible()) all_feasible = false;
                });
            map.valid[ci][ei] = all_feasible;
        }
    }
    return map;
}

SweepTable discretization_sweep(const Instance& inst,
                                std::span<const int> delta_ds,
                                std::span<const int> d_maxes,
                                SolverChoice solver,
                                const AnnealSchedule& schedule) {
    SweepTable table;
    for (int delta_d : delta_ds) {
        for (int d_max : d_maxes) {
            if (delta_d <= 0 || d_max < 0 || d_max % delta_d != 0) {
                table.notes.push_back("skipped delta_d=" +
                                      std::to_string(delta_d) +
                                      " d_max=" + std::to_string(d_max) +
                                      ": not divisible");
                continue;
            }
            const Discretization disc{delta_d, d_max / delta_d};
            Instance scoped = inst;
            scoped.d_max = d_max;

            SweepRow row;
            row.delta_d = delta_d;
            row.d_max = d_max;
            if (solver == SolverChoice::exact) {
                const DelayAssignment best = brute_force_delays(scoped, disc);
                row.feasible = best.feasible;
                row.total_delay = best.feasible
                                      ? best.total_delay
                                      : std::numeric_limits<double>::infinity();
            } else {
                const CompiledModel m = build_departure_qubo(
                    scoped, disc, sufficient_penalties(scoped, disc));
                const SolveResult r = simulated_annealing(m.form, schedule);
                const DecodedSolution d = decode(m, r.best_bits);
                row.feasible = d.feasible();
                row.total_delay = d.feasible()
                                      ? d.total_delay
                                      : std::numeric_limits<double>::infinity();
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

double success_probability(std::span<const SolveResult> results,
                           double exact_energy) {
    if (results.empty()) throw Error("success probability needs results");
    std::size_t hits = 0;
    for (const auto& r : results) {
        if (std::abs(r.best_energy - exact_energy) <= 1e-9) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

double time_to_solution_99(double p, double t_anneal_seconds) {
    if (p <= 0.0) return std::numeric_limits<double>::infinity();
    if (p >= 0.99) return t_anneal_seconds;  // a single run already suffices
    return std::log(0.01) / std::log(1.0 - p) * t_anneal_seconds;
}

}  // namespace deconflict
