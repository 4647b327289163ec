#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "deconflict/qubo.hpp"

namespace deconflict {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void export_qubo(const BinaryQuadraticForm& q, std::ostream& out) {
    int n_linear = 0;
    for (int i = 0; i < q.num_variables(); ++i) {
        if (q.linear(i) != 0.0) ++n_linear;
    }
    int n_quadratic = 0;
    for (const auto& [edge, v] : q.quadratic_terms()) {
        if (v != 0.0) ++n_quadratic;
    }
    out << "p qubo 0 " << q.num_variables() << ' ' << n_linear << ' '
        << n_quadratic << '\n';
    out << "c offset " << fmt(q.offset()) << '\n';
    for (int i = 0; i < q.num_variables(); ++i) {
        if (q.linear(i) != 0.0) {
            out << i << ' ' << i << ' ' << fmt(q.linear(i)) << '\n';
        }
    }
    for (const auto& [edge, v] : q.quadratic_terms()) {
        if (v != 0.0) {
            out << edge.first << ' ' << edge.second << ' ' << fmt(v) << '\n';
        }
    }
}

BinaryQuadraticForm import_qubo(std::istream& in) {
    std::string line;
    int line_no = 0;
    BinaryQuadraticForm q;
    bool saw_header = false;
    int declared = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::istringstream ls(line);
        if (!saw_header) {
            std::string p, kind;
            int topology = -1, n_linear = -1, n_quadratic = -1;
            if (!(ls >> p >> kind >> topology >> declared >> n_linear >>
                  n_quadratic) ||
                p != "p" || kind != "qubo" || declared < 0) {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": bad qubo header");
            }
            q.resize_variables(declared);
            saw_header = true;
            continue;
        }
        if (line[0] == 'c') {
            std::string c, what;
            double v = 0.0;
            std::istringstream cs(line);
            if (cs >> c >> what >> v && what == "offset") {
                q.add_offset(v);
            }
            continue;  // other comments ignored
        }
        int i = -1, j = -1;
        double v = 0.0;
        if (!(ls >> i >> j >> v)) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": bad term line");
        }
        std::string rest;
        if (ls >> rest) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": trailing characters");
        }
        if (i < 0 || j < 0 || i >= declared || j >= declared) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": term references undeclared node");
        }
        if (i == j) {
            q.add_linear(i, v);
        } else {
            q.add_quadratic(i, j, v);
        }
    }
    if (!saw_header) throw ParseError("missing qubo header");
    q.prune_zeros();
    return q;
}

namespace {

nlohmann::json key_to_json(int index, const VariableKey& key) {
    nlohmann::json j;
    j["index"] = index;
    struct Visitor {
        nlohmann::json& j;
        void operator()(const DepartureDelayKey& k) const {
            j["kind"] = "departure_delay";
            j["flight"] = k.flight;
            j["level"] = k.level;
        }
        void operator()(const ThetaKey& k) const {
            j["kind"] = "theta";
            j["flight"] = k.flight;
            j["option"] = k.option;
        }
        void operator()(const PairDelayKey& k) const {
            j["kind"] = "pair_delay";
            j["flight_a"] = k.flight_a;
            j["level_a"] = k.level_a;
            j["flight_b"] = k.flight_b;
            j["level_b"] = k.level_b;
        }
        void operator()(const PairThetaKey& k) const {
            j["kind"] = "pair_theta";
            j["flight_a"] = k.flight_a;
            j["option_a"] = k.option_a;
            j["flight_b"] = k.flight_b;
            j["option_b"] = k.option_b;
        }
        void operator()(const ManeuverKey& k) const {
            j["kind"] = "maneuver";
            j["conflict"] = k.conflict;
            j["flight"] = k.flight;
        }
        void operator()(const DelayDiffKey& k) const {
            j["kind"] = "delay_diff";
            j["conflict"] = k.conflict;
            j["value"] = k.value;
        }
        void operator()(const AccumDelayKey& k) const {
            j["kind"] = "accum_delay";
            j["flight"] = k.flight;
            j["conflict"] = k.conflict;
            j["value"] = k.value;
        }
        void operator()(const AncillaKey& k) const {
            j["kind"] = "ancilla";
            j["conflict"] = k.conflict;
        }
    };
    std::visit(Visitor{j}, key);
    return j;
}

VariableKey key_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "departure_delay") {
        return DepartureDelayKey{j.at("flight").get<std::string>(),
                                 j.at("level").get<int>()};
    }
    if (kind == "theta") {
        return ThetaKey{j.at("flight").get<std::string>(),
                        j.at("option").get<int>()};
    }
    if (kind == "pair_delay") {
        return PairDelayKey{j.at("flight_a").get<std::string>(),
                            j.at("level_a").get<int>(),
                            j.at("flight_b").get<std::string>(),
                            j.at("level_b").get<int>()};
    }
    if (kind == "pair_theta") {
        return PairThetaKey{j.at("flight_a").get<std::string>(),
                            j.at("option_a").get<int>(),
                            j.at("flight_b").get<std::string>(),
                            j.at("option_b").get<int>()};
    }
    if (kind == "maneuver") {
        return ManeuverKey{j.at("conflict").get<int>(),
                           j.at("flight").get<std::string>()};
    }
    if (kind == "delay_diff") {
        return DelayDiffKey{j.at("conflict").get<int>(),
                            j.at("value").get<int>()};
    }
    if (kind == "accum_delay") {
        return AccumDelayKey{j.at("flight").get<std::string>(),
                             j.at("conflict").get<int>(),
                             j.at("value").get<int>()};
    }
    if (kind == "ancilla") {
        return AncillaKey{j.at("conflict").get<int>()};
    }
    throw ParseError("unknown variable kind: " + kind);
}

}  // namespace

void export_variable_map(const BinaryQuadraticForm& q, std::ostream& out) {
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < q.num_variables(); ++i) {
        arr.push_back(key_to_json(i, q.key_of(i)));
    }
    out << arr.dump(2) << '\n';
}

void import_variable_map(BinaryQuadraticForm& q, std::istream& in) {
    nlohmann::json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad variable map JSON: ") + e.what());
    }
    if (!arr.is_array()) throw ParseError("variable map must be an array");
    if (static_cast<int>(arr.size()) != q.num_variables()) {
        throw ParseError("variable map size does not match variable count");
    }
    std::vector<VariableKey> keys(arr.size(), VariableKey{});
    try {
        for (const auto& j : arr) {
            const int idx = j.at("index").get<int>();
            if (idx < 0 || idx >= q.num_variables()) {
                throw ParseError("variable map index out of range");
            }
            keys[static_cast<std::size_t>(idx)] = key_from_json(j);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad variable map JSON: ") + e.what());
    }
    q.assign_keys(std::move(keys));
}

}  // namespace deconflict
