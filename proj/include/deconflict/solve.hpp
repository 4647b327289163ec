#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deconflict/qubo.hpp"

namespace deconflict {

struct AnnealSchedule {
    int sweeps = 1000;
    int restarts = 100;
    double beta_start = 0.1;
    double beta_end = 10.0;
    std::uint64_t seed = 0;
};

void validate(const AnnealSchedule& s);

struct SolveResult {
    std::vector<std::uint8_t> best_bits;
    double best_energy = 0.0;
    std::optional<DecodedSolution> decoded;
    std::uint64_t evaluations = 0;
    std::vector<double> restart_best;
    double wall_seconds = 0.0;
};

/// Visits all 2^n assignments in Gray-code order with incrementally updated
/// energies. The bits span stays owned by the walker; copy it to keep it.
void for_each_assignment(
    const BinaryQuadraticForm& q,
    const std::function<void(std::span<const std::uint8_t>, double)>& visit);

/// Exhaustive global optimum. Tie-break: lexicographically smallest bit
/// string. Throws GuardError above 30 variables.
SolveResult brute_force_qubo(const BinaryQuadraticForm& q);

struct DelayAssignment {
    std::map<std::string, int> delays;  // minutes per flight
    double total_delay = 0.0;
    bool feasible = false;
};

/// Enumerates every delay assignment on the discretization grid and returns
/// the minimum-total-delay one that avoids all conflicts (lexicographic
/// tie-break in flight order). feasible == false when no assignment works.
/// Throws GuardError when (n_d+1)^n_flights > 10^7.
DelayAssignment brute_force_delays(const Instance& inst,
                                   const Discretization& disc);

/// Restarted single-flip Metropolis annealing over a geometric beta ladder.
/// Deterministic for a fixed schedule seed; restart r uses seed + r.
SolveResult simulated_annealing(const BinaryQuadraticForm& q,
                                const AnnealSchedule& schedule);

struct ValidityMap {
    std::vector<double> conflict_weights;
    std::vector<double> encoding_weights;
    // valid[ci][ei] for conflict_weights[ci], encoding_weights[ei]
    std::vector<std::vector<bool>> valid;
};

/// Marks a weight pair valid iff every global optimum of the departure-model
/// QUBO at those weights decodes feasible (encoding and conflict constraints
/// both satisfied); co-optimal assignments are enumerated exhaustively.
ValidityMap penalty_validity_sweep(const Instance& inst,
                                   const Discretization& disc,
                                   std::span<const double> conflict_weights,
                                   std::span<const double> encoding_weights);

enum class SolverChoice { exact, sa };

struct SweepRow {
    int delta_d = 0;
    int d_max = 0;
    double total_delay = 0.0;
    bool feasible = false;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<std::string> notes;
};

/// Minimum total delay for each (delta_d, d_max) combination with
/// delta_d | d_max; other combinations are skipped with a note.
SweepTable discretization_sweep(const Instance& inst,
                                std::span<const int> delta_ds,
                                std::span<const int> d_maxes,
                                SolverChoice solver,
                                const AnnealSchedule& schedule = {});

/// Fraction of results whose energy matches the exact optimum to 1e-9.
double success_probability(std::span<const SolveResult> results,
                           double exact_energy);

/// Expected time to hit the optimum at least once with 99% probability:
/// ln(0.01)/ln(1-p) * t_anneal. p <= 0 gives infinity; p >= 0.99 clamps to
/// one run (t_anneal).
double time_to_solution_99(double p, double t_anneal_seconds);

}  // namespace deconflict
