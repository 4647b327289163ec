#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "deconflict/graph.hpp"

namespace deconflict {

/// Delay grid: allowed departure delays are {0, delta_d, ..., n_d * delta_d}.
struct Discretization {
    int delta_d = 1;  // minutes, > 0
    int n_d = 0;      // level count minus one, >= 0

    int d_max() const { return delta_d * n_d; }
};

void validate(const Discretization& disc);

struct PenaltyWeights {
    double encoding = 0.0;
    double conflict = 0.0;
    double consistency = 0.0;
};

// --- Variable keys ---------------------------------------------------------
// Each binary variable of a compiled model is identified by one of these.

/// d_{i,l}: departure delay of `flight` equals level * delta_d (for the
/// global model, level indexes the flight's delay-value list).
struct DepartureDelayKey {
    std::string flight;
    int level = 0;
    auto operator<=>(const DepartureDelayKey&) const = default;
};

/// theta_{i,phi}: trajectory-shape option of `flight` (global model).
struct ThetaKey {
    std::string flight;
    int option = 0;
    auto operator<=>(const ThetaKey&) const = default;
};

/// d_{(i,alpha),(j,beta)}: pair indicator for two flights' delay choices.
struct PairDelayKey {
    std::string flight_a;
    int level_a = 0;
    std::string flight_b;
    int level_b = 0;
    auto operator<=>(const PairDelayKey&) const = default;
};

/// theta_{(i,phi),(j,psi)}: pair indicator for two flights' theta choices.
struct PairThetaKey {
    std::string flight_a;
    int option_a = 0;
    std::string flight_b;
    int option_b = 0;
    auto operator<=>(const PairThetaKey&) const = default;
};

/// a_{i,k}: `flight` maneuvers at `conflict`. The exclusive model uses a
/// single shared bit per conflict, stored with an empty flight name.
struct ManeuverKey {
    int conflict = 0;
    std::string flight;
    auto operator<=>(const ManeuverKey&) const = default;
};

/// D_{k,gamma}: the accumulated-delay difference at `conflict` equals value.
struct DelayDiffKey {
    int conflict = 0;
    int value = 0;
    auto operator<=>(const DelayDiffKey&) const = default;
};

/// D_{i,k,gamma}: accumulated delay of `flight` at `conflict` equals value.
struct AccumDelayKey {
    std::string flight;
    int conflict = 0;
    int value = 0;
    auto operator<=>(const AccumDelayKey&) const = default;
};

/// a_k: at least one flight maneuvers at `conflict` (flexible model ancilla).
struct AncillaKey {
    int conflict = 0;
    auto operator<=>(const AncillaKey&) const = default;
};

using VariableKey =
    std::variant<DepartureDelayKey, ThetaKey, PairDelayKey, PairThetaKey,
                 ManeuverKey, DelayDiffKey, AccumDelayKey, AncillaKey>;

std::string describe(const VariableKey& key);

// --- Binary quadratic form --------------------------------------------------

/// minimize offset + sum_i linear_i x_i + sum_{i<j} quad_{ij} x_i x_j over
/// x in {0,1}^n. Quadratic terms are stored upper-triangular; x_i^2 folds
/// into the linear part.
class BinaryQuadraticForm {
public:
    /// Get-or-create the variable for `key`.
    int add_variable(const VariableKey& key);
    /// Create anonymous variables up to `count` (import path).
    void resize_variables(int count);
    /// Attach keys to anonymous variables; size must match and keys must be
    /// unique.
    void assign_keys(std::vector<VariableKey> keys);

    int num_variables() const { return static_cast<int>(linear_.size()); }
    bool has_keys() const { return !keys_.empty(); }
    std::optional<int> index_of(const VariableKey& key) const;
    const VariableKey& key_of(int index) const;

    void add_linear(int i, double value);
    void add_quadratic(int i, int j, double value);
    void add_offset(double value) { offset_ += value; }

    double linear(int i) const { return linear_.at(static_cast<std::size_t>(i)); }
    double quadratic(int i, int j) const;
    double offset() const { return offset_; }
    const std::vector<double>& linear_terms() const { return linear_; }
    const std::map<std::pair<int, int>, double>& quadratic_terms() const {
        return quadratic_;
    }

    /// Drop stored quadratic entries that are exactly zero.
    void prune_zeros();

    double energy(std::span<const std::uint8_t> bits) const;

    bool operator==(const BinaryQuadraticForm&) const = default;

private:
    std::vector<VariableKey> keys_;
    std::map<VariableKey, int> index_;
    std::vector<double> linear_;
    std::map<std::pair<int, int>, double> quadratic_;
    double offset_ = 0.0;
};

/// An affine expression sum_i c_i x_i + c0, used to expand squared penalties.
struct LinearExpr {
    std::map<int, double> coeff;
    double constant = 0.0;

    void add(int var, double c) { coeff[var] += c; }
};

/// Adds weight * expr^2 to q, expanded to QUBO terms (x^2 = x).
void add_squared_penalty(BinaryQuadraticForm& q, const LinearExpr& expr,
                         double weight);

/// Adds weight * sum_groups (sum_bits - 1)^2: the one-hot encoding penalty.
/// Throws Error on an empty group.
void add_encoding_penalty(BinaryQuadraticForm& q,
                          const std::vector<std::vector<int>>& groups,
                          double weight);

// --- Compiled models ---------------------------------------------------------

enum class ModelKind { departure, global, exclusive, flexible, interstitial };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// (flight id, conflict id) -> minutes of delay the maneuver would add.
using ManeuverDelays = std::map<std::pair<std::string, int>, double>;

/// (flight id, conflict id) -> maximum delay insertable on the leg ending at
/// that conflict.
using InterstitialBounds = std::map<std::pair<std::string, int>, double>;

/// Inputs of the global-modification model: per-flight delay values and
/// shape options, plus per-pair tables of forbidden joint assignments
/// (indices into the value lists).
struct GlobalConflictEntry {
    int delay_i = 0;  // index into delay_values[flight i]
    int theta_i = 0;  // index into theta_values[flight i]
    int delay_j = 0;
    int theta_j = 0;
};

struct GlobalModelInput {
    std::map<std::string, std::vector<double>> delay_values;
    std::map<std::string, std::vector<double>> theta_values;
    // key: (flight i, flight j) with i < j
    std::map<std::pair<std::string, std::string>,
             std::vector<GlobalConflictEntry>>
        conflicts;
};

/// A built QUBO plus everything needed to decode bit assignments back into
/// delays, maneuvers, and feasibility checks.
struct CompiledModel {
    ModelKind kind = ModelKind::departure;
    BinaryQuadraticForm form;
    PenaltyWeights weights;

    std::vector<std::string> flights;  // modeled flights, instance order
    Discretization disc;
    std::vector<Conflict> conflicts;
    std::map<std::string, std::vector<int>> flight_conflicts;  // K_i
    ManeuverDelays maneuver_delays;
    InterstitialBounds interstitial_bounds;
    bool allow_both = false;
    GlobalModelInput global;
};

struct DecodedSolution {
    std::map<std::string, double> departure_delay;
    std::map<std::string, double> theta;                     // global model
    std::map<int, std::vector<std::string>> maneuvers;       // conflict -> flights
    bool encoding_valid = true;
    bool consistency_valid = true;
    bool conflict_free = true;
    double total_delay = 0.0;
    std::vector<std::string> notes;

    bool feasible() const {
        return encoding_valid && consistency_valid && conflict_free;
    }
};

/// Penalty weights large enough that violating any single constraint never
/// pays off for these instances: all three weights equal d_max + delta_d.
PenaltyWeights sufficient_penalties(const Instance& inst,
                                    const Discretization& disc);

/// Departure-delays-only model: one-hot levels per flight, delay objective,
/// pairwise conflict penalties on level pairs whose delay difference falls in
/// B_k. Throws Error when disc.d_max() != inst.d_max.
CompiledModel build_departure_qubo(const Instance& inst,
                                   const Discretization& disc,
                                   const PenaltyWeights& w);

CompiledModel build_global_qubo(const Instance& inst,
                                const GlobalModelInput& input,
                                const PenaltyWeights& w);

CompiledModel build_exclusive_qubo(const Instance& inst,
                                   const ManeuverDelays& delays,
                                   const Discretization& disc,
                                   const PenaltyWeights& w);

CompiledModel build_flexible_qubo(const Instance& inst,
                                  const ManeuverDelays& delays,
                                  const Discretization& disc,
                                  const PenaltyWeights& w, bool allow_both);

CompiledModel build_interstitial_qubo(const Instance& inst,
                                      const InterstitialBounds& bounds,
                                      const Discretization& disc,
                                      const PenaltyWeights& w);

DecodedSolution decode(const CompiledModel& model,
                       std::span<const std::uint8_t> bits);

// --- Ising form --------------------------------------------------------------

struct IsingForm {
    std::vector<double> h;
    std::map<std::pair<int, int>, double> coupling;
    double offset = 0.0;

    double energy(std::span<const int> spins) const;
};

/// Exact transform under s = 2x - 1: q(x) == ising(s) for all assignments.
IsingForm to_ising(const BinaryQuadraticForm& q);

/// max(max|h|/min|h|, max|J|/min|J|) over nonzero magnitudes; families that
/// are entirely zero are ignored. Throws Error on an all-zero model.
double max_coefficient_ratio(const IsingForm& m);

// --- Import/export -----------------------------------------------------------

/// Text format: `p qubo 0 <num_vars> <n_linear> <n_quadratic>` header,
/// a `c offset <value>` line, then `i i value` lines for linear terms and
/// `i j value` (i < j) for quadratic terms. Full double precision.
void export_qubo(const BinaryQuadraticForm& q, std::ostream& out);
BinaryQuadraticForm import_qubo(std::istream& in);

/// JSON sidecar mapping variable indices to their keys.
void export_variable_map(const BinaryQuadraticForm& q, std::ostream& out);
void import_variable_map(BinaryQuadraticForm& q, std::istream& in);

}  // namespace deconflict
