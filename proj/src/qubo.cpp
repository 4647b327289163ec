#include "deconflict/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace deconflict {

void validate(const Discretization& disc) {
    if (disc.delta_d <= 0) throw Error("delta_d must be positive");
    if (disc.n_d < 0) throw Error("n_d must be >= 0");
}

std::string describe(const VariableKey& key) {
    struct Visitor {
        std::string operator()(const DepartureDelayKey& k) const {
            return "d[" + k.flight + "," + std::to_string(k.level) + "]";
        }
        std::string operator()(const ThetaKey& k) const {
            return "theta[" + k.flight + "," + std::to_string(k.option) + "]";
        }
        std::string operator()(const PairDelayKey& k) const {
            return "d[(" + k.flight_a + "," + std::to_string(k.level_a) +
                   "),(" + k.flight_b + "," + std::to_string(k.level_b) + ")]";
        }
        std::string operator()(const PairThetaKey& k) const {
            return "theta[(" + k.flight_a + "," + std::to_string(k.option_a) +
                   "),(" + k.flight_b + "," + std::to_string(k.option_b) +
                   ")]";
        }
        std::string operator()(const ManeuverKey& k) const {
            return "a[" + std::to_string(k.conflict) +
                   (k.flight.empty() ? "" : "," + k.flight) + "]";
        }
        std::string operator()(const DelayDiffKey& k) const {
            return "D[" + std::to_string(k.conflict) + "," +
                   std::to_string(k.value) + "]";
        }
        std::string operator()(const AccumDelayKey& k) const {
            return "D[" + k.flight + "," + std::to_string(k.conflict) + "," +
                   std::to_string(k.value) + "]";
        }
        std::string operator()(const AncillaKey& k) const {
            return "anc[" + std::to_string(k.conflict) + "]";
        }
    };
    return std::visit(Visitor{}, key);
}

// --- BinaryQuadraticForm -----------------------------------------------------

int BinaryQuadraticForm::add_variable(const VariableKey& key) {
    if (keys_.size() != linear_.size()) {
        throw Error("cannot mix keyed and anonymous variables");
    }
    const auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const int idx = static_cast<int>(keys_.size());
    keys_.push_back(key);
    index_.emplace(key, idx);
    linear_.push_back(0.0);
    return idx;
}

void BinaryQuadraticForm::resize_variables(int count) {
    if (count < num_variables()) throw Error("cannot shrink a form");
    if (!keys_.empty()) throw Error("form already has keyed variables");
    linear_.resize(static_cast<std::size_t>(count), 0.0);
}

void BinaryQuadraticForm::assign_keys(std::vector<VariableKey> keys) {
    if (static_cast<int>(keys.size()) != num_variables()) {
        throw Error("key count does not match variable count");
    }
    std::map<VariableKey, int> index;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (!index.emplace(keys[i], static_cast<int>(i)).second) {
            throw Error("duplicate variable key: " + describe(keys[i]));
        }
    }
    keys_ = std::move(keys);
    index_ = std::move(index);
}

std::optional<int> BinaryQuadraticForm::index_of(const VariableKey& key) const {
    const auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const VariableKey& BinaryQuadraticForm::key_of(int index) const {
    return keys_.at(static_cast<std::size_t>(index));
}

void BinaryQuadraticForm::add_linear(int i, double value) {
    linear_.at(static_cast<std::size_t>(i)) += value;
}

void BinaryQuadraticForm::add_quadratic(int i, int j, double value) {
    if (i == j) {
        add_linear(i, value);  // x^2 = x on binaries
        return;
    }
    if (i > j) std::swap(i, j);
    if (j >= num_variables() || i < 0) throw Error("variable index out of range");
    quadratic_[{i, j}] += value;
}

double BinaryQuadraticForm::quadratic(int i, int j) const {
    if (i > j) std::swap(i, j);
    const auto it = quadratic_.find({i, j});
    return it == quadratic_.end() ? 0.0 : it->second;
}

void BinaryQuadraticForm::prune_zeros() {
    for (auto it = quadratic_.begin(); it != quadratic_.end();) {
        if (it->second == 0.0) {
            it = quadratic_.erase(it);
        } else {
            ++it;
        }
    }
}

double BinaryQuadraticForm::energy(std::span<const std::uint8_t> bits) const {
    if (static_cast<int>(bits.size()) != num_variables()) {
        throw Error("bit vector length does not match variable count");
    }
    double e = offset_;
    for (int i = 0; i < num_variables(); ++i) {
        if (bits[static_cast<std::size_t>(i)]) {
            e += linear_[static_cast<std::size_t>(i)];
        }
    }
    for (const auto& [edge, v] : quadratic_) {
        if (bits[static_cast<std::size_t>(edge.first)] &&
            bits[static_cast<std::size_t>(edge.second)]) {
            e += v;
        }
    }
    return e;
}

void add_squared_penalty(BinaryQuadraticForm& q, const LinearExpr& expr,
                         double weight) {
    const double c0 = expr.constant;
    q.add_offset(weight * c0 * c0);
    for (auto it = expr.coeff.begin(); it != expr.coeff.end(); ++it) {
        const auto [var, c] = *it;
        q.add_linear(var, weight * (c * c + 2.0 * c0 * c));
        auto jt = it;
        for (++jt; jt != expr.coeff.end(); ++jt) {
            q.add_quadratic(var, jt->first, weight * 2.0 * c * jt->second);
        }
    }
}

void add_encoding_penalty(BinaryQuadraticForm& q,
                          const std::vector<std::vector<int>>& groups,
                          double weight) {
    for (const auto& group : groups) {
        if (group.empty()) throw Error("empty one-hot group");
        LinearExpr e;
        e.constant = -1.0;
        for (int idx : group) e.add(idx, 1.0);
        add_squared_penalty(q, e, weight);
    }
}

// --- Model helpers -----------------------------------------------------------

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::departure: return "departure";
        case ModelKind::global: return "global";
        case ModelKind::exclusive: return "exclusive";
        case ModelKind::flexible: return "flexible";
        case ModelKind::interstitial: return "interstitial";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "departure") return ModelKind::departure;
    if (name == "global") return ModelKind::global;
    if (name == "exclusive") return ModelKind::exclusive;
    if (name == "flexible") return ModelKind::flexible;
    if (name == "interstitial") return ModelKind::interstitial;
    throw Error("unknown model: " + name);
}

PenaltyWeights sufficient_penalties(const Instance& inst,
                                    const Discretization& disc) {
    (void)inst;
    validate(disc);
    const double w = static_cast<double>(disc.d_max() + disc.delta_d);
    return {w, w, w};
}

namespace {

/// Indices of each flight's departure-delay bits, creating them in flight
/// order. Returns groups parallel to `flights`.
std::vector<std::vector<int>> add_departure_variables(
    BinaryQuadraticForm& q, const std::vector<std::string>& flights, int n_d) {
    std::vector<std::vector<int>> groups;
    groups.reserve(flights.size());
    for (const auto& f : flights) {
        std::vector<int> group;
        group.reserve(static_cast<std::size_t>(n_d) + 1);
        for (int l = 0; l <= n_d; ++l) {
            group.push_back(q.add_variable(DepartureDelayKey{f, l}));
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

std::vector<std::string> instance_flight_order(const Instance& inst) {
    std::vector<std::string> flights;
    flights.reserve(inst.flights.size());
    for (const auto& t : inst.flights.flights) flights.push_back(t.flight_id);
    return flights;
}

double maneuver_delay_of(const ManeuverDelays& delays, const std::string& flight,
                         int conflict) {
    const auto it = delays.find({flight, conflict});
    if (it == delays.end()) {
        throw Error("missing maneuver delay for flight " + flight +
                    " at conflict " + std::to_string(conflict));
    }
    if (it->second < 0.0) {
        throw Error("negative maneuver delay for flight " + flight);
    }
    return it->second;
}

/// Maneuver delay as an exact multiple of delta_d, for gamma-grid models.
int grid_maneuver_delay(const ManeuverDelays& delays, const std::string& flight,
                        int conflict, int delta_d) {
    const double v = maneuver_delay_of(delays, flight, conflict);
    const long long steps = std::llround(v / delta_d);
    if (std::abs(static_cast<double>(steps) * delta_d - v) > 1e-9) {
        throw Error("gamma grid too small: maneuver delay " +
                    std::to_string(v) + " of flight " + flight +
                    " is not a multiple of delta_d");
    }
    return static_cast<int>(steps) * delta_d;
}

}  // namespace

CompiledModel build_departure_qubo(const Instance& inst,
                                   const Discretization& disc,
                                   const PenaltyWeights& w) {
    validate(disc);
    if (disc.d_max() != inst.d_max) {
        throw Error("discretization d_max " + std::to_string(disc.d_max()) +
                    " does not match instance d_max " +
                    std::to_string(inst.d_max));
    }

    CompiledModel m;
    m.kind = ModelKind::departure;
    m.weights = w;
    m.flights = instance_flight_order(inst);
    m.disc = disc;
    m.conflicts = inst.conflicts;
    m.flight_conflicts = inst.flight_conflicts;

    BinaryQuadraticForm& q = m.form;
    const auto groups = add_departure_variables(q, m.flights, disc.n_d);

    add_encoding_penalty(q, groups, w.encoding);

    for (int l = 0; l <= disc.n_d; ++l) {
        const double cost = static_cast<double>(disc.delta_d) * l;
        for (const auto& f : m.flights) {
            q.add_linear(*q.index_of(DepartureDelayKey{f, l}), cost);
        }
    }

    for (const auto& c : inst.conflicts) {
        for (int l = 0; l <= disc.n_d; ++l) {
            for (int lp = 0; lp <= disc.n_d; ++lp) {
                const int diff = disc.delta_d * (l - lp);
                if (diff < c.delta_min || diff > c.delta_max) continue;
                q.add_quadratic(*q.index_of(DepartureDelayKey{c.flight_i, l}),
                                *q.index_of(DepartureDelayKey{c.flight_j, lp}),
                                w.conflict);
            }
        }
    }
    q.prune_zeros();
    return m;
}

CompiledModel build_global_qubo(const Instance& inst,
                                const GlobalModelInput& input,
                                const PenaltyWeights& w) {
    CompiledModel m;
    m.kind = ModelKind::global;
    m.weights = w;
    m.flights = instance_flight_order(inst);
    m.conflicts = inst.conflicts;
    m.flight_conflicts = inst.flight_conflicts;
    m.global = input;

    BinaryQuadraticForm& q = m.form;

    std::vector<std::vector<int>> groups;
    for (const auto& f : m.flights) {
        const auto dv = input.delay_values.find(f);
        const auto tv = input.theta_values.find(f);
        if (dv == input.delay_values.end() || dv->second.empty()) {
            throw Error("no delay values declared for flight " + f);
        }
        if (tv == input.theta_values.end() || tv->second.empty()) {
            throw Error("no theta values declared for flight " + f);
        }
        std::vector<int> dgroup, tgroup;
        for (int a = 0; a < static_cast<int>(dv->second.size()); ++a) {
            dgroup.push_back(q.add_variable(DepartureDelayKey{f, a}));
        }
        for (int p = 0; p < static_cast<int>(tv->second.size()); ++p) {
            tgroup.push_back(q.add_variable(ThetaKey{f, p}));
        }
        groups.push_back(std::move(dgroup));
        groups.push_back(std::move(tgroup));
    }

    add_encoding_penalty(q, groups, w.encoding);

    for (const auto& f : m.flights) {
        const auto& values = input.delay_values.at(f);
        for (int a = 0; a < static_cast<int>(values.size()); ++a) {
            q.add_linear(*q.index_of(DepartureDelayKey{f, a}),
                         values[static_cast<std::size_t>(a)]);
        }
    }

    // Pair variables exist only for joint assignments named by some table
    // entry; each gets its consistency gadget s(x, y, z) = 3z + xy - 2xz - 2yz
    // once, on creation.
    const auto ensure_pair = [&](const VariableKey& pair_key, int single_a,
                                 int single_b) {
        const auto existing = q.index_of(pair_key);
        if (existing) return *existing;
        const int z = q.add_variable(pair_key);
        q.add_linear(z, 3.0 * w.consistency);
        q.add_quadratic(single_a, single_b, w.consistency);
        q.add_quadratic(single_a, z, -2.0 * w.consistency);
        q.add_quadratic(single_b, z, -2.0 * w.consistency);
        return z;
    };

    for (const auto& [pair, entries] : input.conflicts) {
        const auto& [fi, fj] = pair;
        if (!(fi < fj)) throw Error("conflict table pair must be ordered i < j");
        const auto di = input.delay_values.find(fi);
        const auto dj = input.delay_values.find(fj);
        const auto ti = input.theta_values.find(fi);
        const auto tj = input.theta_values.find(fj);
        if (di == input.delay_values.end() || dj == input.delay_values.end() ||
            ti == input.theta_values.end() || tj == input.theta_values.end()) {
            throw Error("conflict table references unknown flight");
        }
        for (const auto& e : entries) {
            if (e.delay_i < 0 ||
                e.delay_i >= static_cast<int>(di->second.size()) ||
                e.delay_j < 0 ||
                e.delay_j >= static_cast<int>(dj->second.size()) ||
                e.theta_i < 0 ||
                e.theta_i >= static_cast<int>(ti->second.size()) ||
                e.theta_j < 0 ||
                e.theta_j >= static_cast<int>(tj->second.size())) {
                throw Error("conflict table references unknown value");
            }
            const int d_pair = ensure_pair(
                PairDelayKey{fi, e.delay_i, fj, e.delay_j},
                *q.index_of(DepartureDelayKey{fi, e.delay_i}),
                *q.index_of(DepartureDelayKey{fj, e.delay_j}));
            const int t_pair =
                ensure_pair(PairThetaKey{fi, e.theta_i, fj, e.theta_j},
                            *q.index_of(ThetaKey{fi, e.theta_i}),
                            *q.index_of(ThetaKey{fj, e.theta_j}));
            q.add_quadratic(d_pair, t_pair, w.conflict);
        }
    }
    q.prune_zeros();
    return m;
}

CompiledModel build_exclusive_qubo(const Instance& inst,
                                   const ManeuverDelays& delays,
                                   const Discretization& disc,
                                   const PenaltyWeights& w) {
    validate(disc);
    CompiledModel m;
    m.kind = ModelKind::exclusive;
    m.weights = w;
    m.flights = instance_flight_order(inst);
    m.disc = disc;
    m.conflicts = inst.conflicts;
    m.flight_conflicts = inst.flight_conflicts;
    m.maneuver_delays = delays;

    BinaryQuadraticForm& q = m.form;
    const auto groups = add_departure_variables(q, m.flights, disc.n_d);
    add_encoding_penalty(q, groups, w.encoding);

    for (const auto& f : m.flights) {
        for (int l = 0; l <= disc.n_d; ++l) {
            q.add_linear(*q.index_of(DepartureDelayKey{f, l}),
                         static_cast<double>(disc.delta_d) * l);
        }
    }

    // One shared bit per conflict: a_k = 1 means flight i goes around,
    // a_k = 0 means flight j does (a_{j,k} = 1 - a_k).
    for (const auto& c : inst.conflicts) {
        const double di = maneuver_delay_of(delays, c.flight_i, c.id);
        const double dj = maneuver_delay_of(delays, c.flight_j, c.id);
        const int a = q.add_variable(ManeuverKey{c.id, ""});
        q.add_linear(a, di - dj);
        q.add_offset(dj);
    }
    q.prune_zeros();
    return m;
}

CompiledModel build_flexible_qubo(const Instance& inst,
                                  const ManeuverDelays& delays,
                                  const Discretization& disc,
                                  const PenaltyWeights& w, bool allow_both) {
    validate(disc);
    CompiledModel m;
    m.kind = ModelKind::flexible;
    m.weights = w;
    m.flights = instance_flight_order(inst);
    m.disc = disc;
    m.conflicts = inst.conflicts;
    m.flight_conflicts = inst.flight_conflicts;
    m.maneuver_delays = delays;
    m.allow_both = allow_both;

    BinaryQuadraticForm& q = m.form;
    auto groups = add_departure_variables(q, m.flights, disc.n_d);

    for (const auto& f : m.flights) {
        for (int l = 0; l <= disc.n_d; ++l) {
            q.add_linear(*q.index_of(DepartureDelayKey{f, l}),
                         static_cast<double>(disc.delta_d) * l);
        }
    }

    // Accumulated delay of `flight` on arrival at conflict `cid`, as an
    // affine expression over departure bits and upstream maneuver bits.
    const auto accumulated = [&](const std::string& flight, int cid) {
        LinearExpr e;
        for (int l = 0; l <= disc.n_d; ++l) {
            e.add(*q.index_of(DepartureDelayKey{flight, l}),
                  static_cast<double>(disc.delta_d) * l);
        }
        for (int up : inst.upstream_conflicts(flight, cid)) {
            e.add(*q.index_of(ManeuverKey{up, flight}),
                  maneuver_delay_of(delays, flight, up));
        }
        return e;
    };

    // Conflicts in per-flight temporal order already (K_i built in Instance);
    // create maneuver bits for all conflicts first so upstream lookups resolve.
    for (const auto& c : inst.conflicts) {
        const int ai = q.add_variable(ManeuverKey{c.id, c.flight_i});
        const int aj = q.add_variable(ManeuverKey{c.id, c.flight_j});
        q.add_linear(ai,
                     grid_maneuver_delay(delays, c.flight_i, c.id, disc.delta_d));
        q.add_linear(aj,
                     grid_maneuver_delay(delays, c.flight_j, c.id, disc.delta_d));
    }

    for (const auto& c : inst.conflicts) {
        int up_i = 0, up_j = 0;
        for (int u : inst.upstream_conflicts(c.flight_i, c.id)) {
            up_i += grid_maneuver_delay(delays, c.flight_i, u, disc.delta_d);
        }
        for (int u : inst.upstream_conflicts(c.flight_j, c.id)) {
            up_j += grid_maneuver_delay(delays, c.flight_j, u, disc.delta_d);
        }
        const int d_tot = disc.d_max() + std::max(up_i, up_j);

        std::vector<int> diff_group;
        for (int g = -d_tot; g <= d_tot; g += disc.delta_d) {
            diff_group.push_back(q.add_variable(DelayDiffKey{c.id, g}));
        }

        LinearExpr consistency = accumulated(c.flight_i, c.id);
        const LinearExpr rhs = accumulated(c.flight_j, c.id);
        for (const auto& [var, coeff] : rhs.coeff) {
            consistency.add(var, -coeff);
        }
        consistency.constant -= rhs.constant;
        for (int g = -d_tot; g <= d_tot; g += disc.delta_d) {
            consistency.add(*q.index_of(DelayDiffKey{c.id, g}),
                            -static_cast<double>(g));
        }
        add_squared_penalty(q, consistency, w.consistency);

        const int ai = *q.index_of(ManeuverKey{c.id, c.flight_i});
        const int aj = *q.index_of(ManeuverKey{c.id, c.flight_j});
        if (allow_both) {
            // Ancilla a_k == (a_i or a_j), enforced by the OR gadget
            // (a_i + a_j)(1 - 2 a_k) + a_i a_j + a_k.
            const int ak = q.add_variable(AncillaKey{c.id});
            q.add_linear(ai, w.consistency);
            q.add_linear(aj, w.consistency);
            q.add_linear(ak, w.consistency);
            q.add_quadratic(ai, ak, -2.0 * w.consistency);
            q.add_quadratic(aj, ak, -2.0 * w.consistency);
            q.add_quadratic(ai, aj, w.consistency);
            for (int g = std::max(-d_tot, c.delta_min);
                 g <= std::min(d_tot, c.delta_max); ++g) {
                if ((g + d_tot) % disc.delta_d != 0) continue;
                const int dv = *q.index_of(DelayDiffKey{c.id, g});
                q.add_linear(dv, w.conflict);
                q.add_quadratic(dv, ak, -w.conflict);
            }
        } else {
            for (int g = std::max(-d_tot, c.delta_min);
                 g <= std::min(d_tot, c.delta_max); ++g) {
                if ((g + d_tot) % disc.delta_d != 0) continue;
                const int dv = *q.index_of(DelayDiffKey{c.id, g});
                q.add_linear(dv, w.conflict);
                q.add_quadratic(dv, ai, -w.conflict);
                q.add_quadratic(dv, aj, -w.conflict);
                q.add_quadratic(ai, aj, 2.0 * w.conflict);
            }
        }

        groups.push_back(std::move(diff_group));
    }

    add_encoding_penalty(q, groups, w.encoding);
    q.prune_zeros();
    return m;
}

CompiledModel build_interstitial_qubo(const Instance& inst,
                                      const InterstitialBounds& bounds,
                                      const Discretization& disc,
                                      const PenaltyWeights& w) {
    validate(disc);
    CompiledModel m;
    m.kind = ModelKind::interstitial;
    m.weights = w;
    m.disc = disc;
    m.conflicts = inst.conflicts;
    m.flight_conflicts = inst.flight_conflicts;
    m.interstitial_bounds = bounds;

    // Flights without conflicts have no variables in this model; their
    // optimal delay is zero regardless.
    for (const auto& t : inst.flights.flights) {
        const auto it = inst.flight_conflicts.find(t.flight_id);
        if (it != inst.flight_conflicts.end() && !it->second.empty()) {
            m.flights.push_back(t.flight_id);
        }
    }

    const auto bound_of = [&](const std::string& flight, int cid) {
        const auto it = bounds.find({flight, cid});
        if (it == bounds.end()) {
            throw Error("missing interstitial bound for flight " + flight +
                        " at conflict " + std::to_string(cid));
        }
        if (it->second < 0.0) throw Error("negative interstitial bound");
        return it->second;
    };

    BinaryQuadraticForm& q = m.form;
    auto groups = add_departure_variables(q, m.flights, disc.n_d);

    // gamma grids per (flight, conflict): departure range plus everything the
    // upstream legs can add, in delta_d steps.
    std::map<std::pair<std::string, int>, int> gamma_max;
    for (const auto& f : m.flights) {
        if (inst.flight_conflicts.find(f) == inst.flight_conflicts.end()) {
            throw Error("flight " + f + " has no conflicts in this model");
        }
        int reach = disc.d_max();
        for (int cid : inst.flight_conflicts.at(f)) {
            const double b = bound_of(f, cid);
            reach += static_cast<int>(b / disc.delta_d) * disc.delta_d;
            gamma_max[{f, cid}] = reach;
            std::vector<int> group;
            for (int g = 0; g <= reach; g += disc.delta_d) {
                group.push_back(q.add_variable(AccumDelayKey{f, cid, g}));
            }
            groups.push_back(std::move(group));
        }
    }

    add_encoding_penalty(q, groups, w.encoding);

    // Consistency: accumulated delay is monotone along each flight's conflict
    // sequence and each leg adds at most its bound; the first conflict chains
    // to the departure delay.
    for (const auto& f : m.flights) {
        const auto& seq = inst.flight_conflicts.at(f);
        for (std::size_t n = 0; n < seq.size(); ++n) {
            const int cid = seq[n];
            const double bound = bound_of(f, cid);
            const int g_hi = gamma_max.at({f, cid});
            for (int g = 0; g <= g_hi; g += disc.delta_d) {
                const int cur = *q.index_of(AccumDelayKey{f, cid, g});
                if (n == 0) {
                    for (int l = 0; l <= disc.n_d; ++l) {
                        const int alpha = disc.delta_d * l;
                        if (g < alpha || g - alpha > bound) {
                            q.add_quadratic(
                                *q.index_of(DepartureDelayKey{f, l}), cur,
                                w.consistency);
                        }
                    }
                } else {
                    const int prev_cid = seq[n - 1];
                    const int prev_hi = gamma_max.at({f, prev_cid});
                    for (int gp = 0; gp <= prev_hi; gp += disc.delta_d) {
                        if (g < gp || g - gp > bound) {
                            q.add_quadratic(
                                *q.index_of(AccumDelayKey{f, prev_cid, gp}),
                                cur, w.consistency);
                        }
                    }
                }
            }
        }
    }

    // Conflicts: penalize accumulated-delay differences inside B_k.
    for (const auto& c : inst.conflicts) {
        const int hi_i = gamma_max.at({c.flight_i, c.id});
        const int hi_j = gamma_max.at({c.flight_j, c.id});
        for (int gi = 0; gi <= hi_i; gi += disc.delta_d) {
            for (int gj = 0; gj <= hi_j; gj += disc.delta_d) {
                const int diff = gi - gj;
                if (diff < c.delta_min || diff > c.delta_max) continue;
                q.add_quadratic(*q.index_of(AccumDelayKey{c.flight_i, c.id, gi}),
                                *q.index_of(AccumDelayKey{c.flight_j, c.id, gj}),
                                w.conflict);
            }
        }
    }

    // Objective: accumulated delay at each flight's last conflict.
    for (const auto& f : m.flights) {
        const int last = inst.flight_conflicts.at(f).back();
        const int hi = gamma_max.at({f, last});
        for (int g = 0; g <= hi; g += disc.delta_d) {
            q.add_linear(*q.index_of(AccumDelayKey{f, last, g}),
                         static_cast<double>(g));
        }
    }
    q.prune_zeros();
    return m;
}

// --- Decoding ----------------------------------------------------------------

namespace {

struct GroupReadout {
    double value = 0.0;  // sum of member values weighted by bits
    int set_bits = 0;
};

}  // namespace

DecodedSolution decode(const CompiledModel& model,
                       std::span<const std::uint8_t> bits) {
    const BinaryQuadraticForm& q = model.form;
    if (static_cast<int>(bits.size()) != q.num_variables()) {
        throw Error("bit vector length does not match variable count");
    }
    const auto bit = [&](const VariableKey& key) -> int {
        const auto idx = q.index_of(key);
        if (!idx) throw Error("missing variable: " + describe(key));
        return bits[static_cast<std::size_t>(*idx)] ? 1 : 0;
    };

    DecodedSolution out;

    const auto read_group = [&](auto make_key, int count,
                                auto value_of) -> GroupReadout {
        GroupReadout r;
        for (int l = 0; l < count; ++l) {
            if (bit(make_key(l))) {
                ++r.set_bits;
                r.value += value_of(l);
            }
        }
        return r;
    };

    const auto check_one_hot = [&](const GroupReadout& r, const std::string& what) {
        if (r.set_bits != 1) {
            out.encoding_valid = false;
            out.notes.push_back("broken one-hot group: " + what + " (" +
                                std::to_string(r.set_bits) + " bits set)");
        }
    };

    if (model.kind == ModelKind::global) {
        for (const auto& f : model.flights) {
            const auto& dv = model.global.delay_values.at(f);
            const auto& tv = model.global.theta_values.at(f);
            const auto d = read_group(
                [&](int l) { return VariableKey(DepartureDelayKey{f, l}); },
                static_cast<int>(dv.size()),
                [&](int l) { return dv[static_cast<std::size_t>(l)]; });
            const auto t = read_group(
                [&](int p) { return VariableKey(ThetaKey{f, p}); },
                static_cast<int>(tv.size()),
                [&](int p) { return tv[static_cast<std::size_t>(p)]; });
            check_one_hot(d, "delay of " + f);
            check_one_hot(t, "theta of " + f);
            out.departure_delay[f] = d.value;
            out.theta[f] = t.value;
            out.total_delay += d.value;
        }
        // Pair bits must equal the product of their singles.
        for (int i = 0; i < q.num_variables(); ++i) {
            const VariableKey& key = q.key_of(i);
            if (const auto* pd = std::get_if<PairDelayKey>(&key)) {
                const int z = bits[static_cast<std::size_t>(i)] ? 1 : 0;
                const int x = bit(DepartureDelayKey{pd->flight_a, pd->level_a});
                const int y = bit(DepartureDelayKey{pd->flight_b, pd->level_b});
                if (z != x * y) {
                    out.consistency_valid = false;
                    out.notes.push_back("pair bit inconsistent: " + describe(key));
                }
            } else if (const auto* pt = std::get_if<PairThetaKey>(&key)) {
                const int z = bits[static_cast<std::size_t>(i)] ? 1 : 0;
                const int x = bit(ThetaKey{pt->flight_a, pt->option_a});
                const int y = bit(ThetaKey{pt->flight_b, pt->option_b});
                if (z != x * y) {
                    out.consistency_valid = false;
                    out.notes.push_back("pair bit inconsistent: " + describe(key));
                }
            }
        }
        // A conflict is actualized when all four singles of a table entry hold.
        for (const auto& [pair, entries] : model.global.conflicts) {
            for (const auto& e : entries) {
                if (bit(DepartureDelayKey{pair.first, e.delay_i}) &&
                    bit(ThetaKey{pair.first, e.theta_i}) &&
                    bit(DepartureDelayKey{pair.second, e.delay_j}) &&
                    bit(ThetaKey{pair.second, e.theta_j})) {
                    out.conflict_free = false;
                    out.notes.push_back("conflict actualized between " +
                                        pair.first + " and " + pair.second);
                }
            }
        }
        return out;
    }

    // Discretized models share the departure-delay decoding.
    const auto departure_delay = [&](const std::string& f) {
        const auto r = read_group(
            [&](int l) { return VariableKey(DepartureDelayKey{f, l}); },
            model.disc.n_d + 1,
            [&](int l) { return static_cast<double>(model.disc.delta_d) * l; });
        check_one_hot(r, "departure delay of " + f);
        return r.value;
    };

    if (model.kind == ModelKind::interstitial) {
        for (const auto& f : model.flights) {
            out.departure_delay[f] = departure_delay(f);
        }
        // Accumulated delays per flight along its conflict sequence.
        std::map<std::pair<std::string, int>, double> accum;
        for (const auto& f : model.flights) {
            double prev = out.departure_delay[f];
            for (int cid : model.flight_conflicts.at(f)) {
                GroupReadout r;
                for (int i = 0; i < q.num_variables(); ++i) {
                    if (const auto* a = std::get_if<AccumDelayKey>(&q.key_of(i))) {
                        if (a->flight == f && a->conflict == cid &&
                            bits[static_cast<std::size_t>(i)]) {
                            ++r.set_bits;
                            r.value += a->value;
                        }
                    }
                }
                check_one_hot(r, "accumulated delay of " + f + " at conflict " +
                                     std::to_string(cid));
                accum[{f, cid}] = r.value;
                const double bound =
                    model.interstitial_bounds.count({f, cid})
                        ? model.interstitial_bounds.at({f, cid})
                        : 0.0;
                if (r.value < prev || r.value - prev > bound) {
                    out.consistency_valid = false;
                    out.notes.push_back("interstitial chain violated for " + f +
                                        " at conflict " + std::to_string(cid));
                }
                prev = r.value;
            }
            out.total_delay += prev;  // accumulated delay at the last conflict
        }
        for (const auto& c : model.conflicts) {
            const double di = accum.at({c.flight_i, c.id});
            const double dj = accum.at({c.flight_j, c.id});
            if (!is_avoided(c, static_cast<int>(std::llround(di)),
                            static_cast<int>(std::llround(dj)))) {
                out.conflict_free = false;
                out.notes.push_back("conflict " + std::to_string(c.id) +
                                    " not avoided");
            }
        }
        return out;
    }

    for (const auto& f : model.flights) {
        const double d = departure_delay(f);
        out.departure_delay[f] = d;
        out.total_delay += d;
    }

    if (model.kind == ModelKind::departure) {
        for (const auto& c : model.conflicts) {
            const double di = out.departure_delay.at(c.flight_i);
            const double dj = out.departure_delay.at(c.flight_j);
            if (!is_avoided(c, static_cast<int>(std::llround(di)),
                            static_cast<int>(std::llround(dj)))) {
                out.conflict_free = false;
                out.notes.push_back("conflict " + std::to_string(c.id) +
                                    " not avoided");
            }
        }
        return out;
    }

    if (model.kind == ModelKind::exclusive) {
        for (const auto& c : model.conflicts) {
            const bool i_moves = bit(ManeuverKey{c.id, ""}) == 1;
            const std::string& mover = i_moves ? c.flight_i : c.flight_j;
            out.maneuvers[c.id].push_back(mover);
            out.total_delay += model.maneuver_delays.at({mover, c.id});
        }
        return out;  // one flight always yields, so no conflict is actualized
    }

    // Flexible model.
    for (const auto& c : model.conflicts) {
        const bool i_moves = bit(ManeuverKey{c.id, c.flight_i}) == 1;
        const bool j_moves = bit(ManeuverKey{c.id, c.flight_j}) == 1;
        out.maneuvers[c.id];  // entry exists even when nobody maneuvers
        if (i_moves) {
            out.maneuvers[c.id].push_back(c.flight_i);
            out.total_delay += model.maneuver_delays.at({c.flight_i, c.id});
        }
        if (j_moves) {
            out.maneuvers[c.id].push_back(c.flight_j);
            out.total_delay += model.maneuver_delays.at({c.flight_j, c.id});
        }
    }
    // Accumulated delays from the decoded departure delays and maneuvers.
    const auto accum_at = [&](const std::string& f, int cid) {
        double d = out.departure_delay.at(f);
        for (int up : model.flight_conflicts.at(f)) {
            if (up == cid) break;
            const auto it = out.maneuvers.find(up);
            if (it != out.maneuvers.end() &&
                std::find(it->second.begin(), it->second.end(), f) !=
                    it->second.end()) {
                d += model.maneuver_delays.at({f, up});
            }
        }
        return d;
    };
    for (const auto& c : model.conflicts) {
        const double di = accum_at(c.flight_i, c.id);
        const double dj = accum_at(c.flight_j, c.id);
        const int diff = static_cast<int>(std::llround(di - dj));

        // The one-hot difference bits must agree with the actual difference.
        GroupReadout r;
        for (int i = 0; i < q.num_variables(); ++i) {
            if (const auto* dk = std::get_if<DelayDiffKey>(&q.key_of(i))) {
                if (dk->conflict == c.id && bits[static_cast<std::size_t>(i)]) {
                    ++r.set_bits;
                    r.value += dk->value;
                }
            }
        }
        check_one_hot(r, "delay difference at conflict " + std::to_string(c.id));
        if (r.set_bits == 1 &&
            static_cast<int>(std::llround(r.value)) != diff) {
            out.consistency_valid = false;
            out.notes.push_back("delay-difference bits disagree at conflict " +
                                std::to_string(c.id));
        }

        const bool i_moves = bit(ManeuverKey{c.id, c.flight_i}) == 1;
        const bool j_moves = bit(ManeuverKey{c.id, c.flight_j}) == 1;
        const int movers = (i_moves ? 1 : 0) + (j_moves ? 1 : 0);
        bool avoided;
        if (model.allow_both) {
            avoided = movers >= 1 || is_avoided(c, diff, 0);
        } else {
            // Without the ancilla, exactly one flight may maneuver.
            if (movers == 2) {
                avoided = false;
                out.notes.push_back("both flights maneuver at conflict " +
                                    std::to_string(c.id));
            } else {
                avoided = movers == 1 || is_avoided(c, diff, 0);
            }
        }
        if (!avoided) {
            out.conflict_free = false;
            out.notes.push_back("conflict " + std::to_string(c.id) +
                                " not avoided");
        }
    }
    return out;
}

// --- Ising -------------------------------------------------------------------

double IsingForm::energy(std::span<const int> spins) const {
    double e = offset;
    for (std::size_t i = 0; i < h.size(); ++i) {
        e += h[i] * spins[i];
    }
    for (const auto& [edge, j] : coupling) {
        e += j * spins[static_cast<std::size_t>(edge.first)] *
             spins[static_cast<std::size_t>(edge.second)];
    }
    return e;
}

IsingForm to_ising(const BinaryQuadraticForm& q) {
    IsingForm m;
    m.h.assign(static_cast<std::size_t>(q.num_variables()), 0.0);
    m.offset = q.offset();
    for (int i = 0; i < q.num_variables(); ++i) {
        const double a = q.linear(i);
        m.h[static_cast<std::size_t>(i)] += a / 2.0;
        m.offset += a / 2.0;
    }
    for (const auto& [edge, b] : q.quadratic_terms()) {
        m.coupling[edge] += b / 4.0;
        m.h[static_cast<std::size_t>(edge.first)] += b / 4.0;
        m.h[static_cast<std::size_t>(edge.second)] += b / 4.0;
        m.offset += b / 4.0;
    }
    for (auto it = m.coupling.begin(); it != m.coupling.end();) {
        it = it->second == 0.0 ? m.coupling.erase(it) : std::next(it);
    }
    return m;
}

double max_coefficient_ratio(const IsingForm& m) {
    double h_min = 0.0, h_max = 0.0, j_min = 0.0, j_max = 0.0;
    bool has_h = false, has_j = false;
    for (double v : m.h) {
        const double a = std::abs(v);
        if (a == 0.0) continue;
        if (!has_h || a < h_min) h_min = a;
        if (!has_h || a > h_max) h_max = a;
        has_h = true;
    }
    for (const auto& [edge, v] : m.coupling) {
        const double a = std::abs(v);
        if (a == 0.0) continue;
        if (!has_j || a < j_min) j_min = a;
        if (!has_j || a > j_max) j_max = a;
        has_j = true;
    }
    if (!has_h && !has_j) throw Error("all-zero Ising model");
    double ratio = 0.0;
    if (has_h) ratio = std::max(ratio, h_max / h_min);
    if (has_j) ratio = std::max(ratio, j_max / j_min);
    return ratio;
}

}  // namespace deconflict
