// deconflict: turn flight trajectories into de-confliction QUBO instances,
// solve them, and report the structural statistics of the conflict graph.
//
// Subcommands: detect, stats, build, solve. Exit codes: 0 on success, 2 on
// input/config errors, 3 when some instances exceeded solver guards.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deconflict/conflict.hpp"
#include "deconflict/graph.hpp"
#include "deconflict/qubo.hpp"
#include "deconflict/solve.hpp"
#include "deconflict/trajectory.hpp"
#include "deconflict/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace deconflict;

namespace {

struct CommonOpts {
    std::string input_path;
    std::string synthetic_path;
    std::string conflicts_path;
    std::vector<int> d_max_list{18};
    std::vector<int> delta_d_list{3};
    double horizontal_nm = 30.0;
    int temporal_min = 3;
    double vertical_ft = 2000.0;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool include_trivial = false;
};

struct ModelOpts {
    std::string model = "departure";
    std::string weights = "auto";
    std::string params_path;
};

struct SolveOpts {
    std::string solver = "exact";
    int sweeps = 1000;
    int restarts = 100;
    double beta_start = 0.1;
    double beta_end = 10.0;
    bool penalty_sweep = false;
    bool disc_sweep = false;
    int t99_trials = 0;
    double t99_anneal_seconds = 20e-6;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool wants_model_inputs) {
    auto* input = cmd->add_option("--input", o.input_path,
                                  "Trajectory CSV file");
    auto* synth = cmd->add_option("--synthetic", o.synthetic_path,
                                  "Synthetic corridor config (JSON)");
    input->excludes(synth);
    if (wants_model_inputs) {
        auto* conf = cmd->add_option("--conflicts", o.conflicts_path,
                                     "Previously detected conflicts (JSON); "
                                     "skips detection");
        conf->excludes(input);
        conf->excludes(synth);
    }
    cmd->add_option("--dmax", o.d_max_list,
                    "Maximum departure delay(s), minutes")
        ->delimiter(',');
    cmd->add_option("--delta-d", o.delta_d_list, "Delay resolution(s), minutes")
        ->delimiter(',');
    cmd->add_option("--dx", o.horizontal_nm, "Horizontal separation, nm");
    cmd->add_option("--dt", o.temporal_min, "Temporal separation, minutes");
    cmd->add_option("--vert", o.vertical_ft, "Vertical separation, feet");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--seed", o.seed, "Master seed for synthesis and solvers")
        ->each([&o](const std::string&) { o.seed_given = true; });
    cmd->add_flag("--include-trivial", o.include_trivial,
                  "Keep components solvable with zero delays");
}

void add_model(CLI::App* cmd, ModelOpts& o) {
    cmd->add_option("--model", o.model,
                    "departure|global|exclusive|flexible|interstitial");
    cmd->add_option("--weights", o.weights,
                    "auto or encoding,conflict,consistency");
    cmd->add_option("--model-params", o.params_path,
                    "Model parameter file (JSON) for the maneuver models");
}

SeparationParams separation(const CommonOpts& o) {
    SeparationParams p;
    p.horizontal_nm = o.horizontal_nm;
    p.temporal_min = o.temporal_min;
    p.vertical_ft = o.vertical_ft;
    validate(p);
    return p;
}

FlightSet load_flights(const CommonOpts& o) {
    if (!o.input_path.empty()) {
        std::ifstream in(o.input_path);
        if (!in) throw Error("cannot open " + o.input_path);
        return load_trajectories(in);
    }
    if (!o.synthetic_path.empty()) {
        std::ifstream in(o.synthetic_path);
        if (!in) throw Error("cannot open " + o.synthetic_path);
        SyntheticConfig cfg = synthetic_config_from_json(in);
        if (o.seed_given) cfg.seed = o.seed;
        return generate_synthetic(cfg);
    }
    throw Error("one of --input or --synthetic is required");
}

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

/// Flights + conflicts + instances for one d_max, from whichever input the
/// command was given.
struct Pipeline {
    FlightSet flights;
    ConflictSet conflicts;
    std::vector<Instance> instances;
};

Pipeline run_pipeline(const CommonOpts& o, int d_max) {
    Pipeline p;
    if (!o.conflicts_path.empty()) {
        std::ifstream in(o.conflicts_path);
        if (!in) throw Error("cannot open " + o.conflicts_path);
        p.conflicts = conflicts_from_json(in);
        // Flights reconstructed from the conflict records; flights that
        // never conflict form trivial singletons and are not represented.
        for (const auto& [flight, ids] : p.conflicts.flight_conflicts) {
            Trajectory t;
            t.flight_id = flight;
            t.points.push_back({0.0, 0.0, 0.0});
            p.flights.flights.push_back(std::move(t));
        }
    } else {
        p.flights = load_flights(o);
        p.conflicts = detect_all(p.flights, separation(o), d_max);
    }
    const ConflictGraph g = build_conflict_graph(p.flights, p.conflicts, d_max);
    p.instances =
        extract_instances(g, p.flights, p.conflicts, d_max, o.include_trivial);
    return p;
}

// --- model parameter files ----------------------------------------------------

struct ModelParams {
    ManeuverDelays maneuver_delays;
    std::optional<double> default_maneuver_delay;
    InterstitialBounds interstitial_bounds;
    std::optional<double> default_interstitial_bound;
    bool allow_both = false;
    GlobalModelInput global;
};

ModelParams load_model_params(const std::string& path) {
    ModelParams p;
    if (path.empty()) return p;
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    json j;
    try {
        in >> j;
        if (j.contains("default_maneuver_delay")) {
            p.default_maneuver_delay = j["default_maneuver_delay"].get<double>();
        }
        for (const auto& e : j.value("maneuver_delays", json::array())) {
            p.maneuver_delays[{e.at("flight").get<std::string>(),
                               e.at("conflict").get<int>()}] =
                e.at("delay").get<double>();
        }
        if (j.contains("default_interstitial_bound")) {
            p.default_interstitial_bound =
                j["default_interstitial_bound"].get<double>();
        }
        for (const auto& e : j.value("interstitial_bounds", json::array())) {
            p.interstitial_bounds[{e.at("flight").get<std::string>(),
                                   e.at("conflict").get<int>()}] =
                e.at("bound").get<double>();
        }
        p.allow_both = j.value("allow_both", false);
        if (j.contains("global")) {
            const auto& g = j["global"];
            for (const auto& [flight, values] :
                 g.value("delay_values", json::object()).items()) {
                p.global.delay_values[flight] =
                    values.get<std::vector<double>>();
            }
            for (const auto& [flight, values] :
                 g.value("theta_values", json::object()).items()) {
                p.global.theta_values[flight] =
                    values.get<std::vector<double>>();
            }
            for (const auto& e : g.value("conflicts", json::array())) {
                auto& entries =
                    p.global.conflicts[{e.at("i").get<std::string>(),
                                        e.at("j").get<std::string>()}];
                for (const auto& row : e.at("entries")) {
                    entries.push_back({row.at(0).get<int>(),
                                       row.at(1).get<int>(),
                                       row.at(2).get<int>(),
                                       row.at(3).get<int>()});
                }
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad model-params JSON: ") + e.what());
    }
    return p;
}

ManeuverDelays resolve_maneuver_delays(const Instance& inst,
                                       const ModelParams& params) {
    ManeuverDelays delays = params.maneuver_delays;
    if (params.default_maneuver_delay) {
        for (const auto& c : inst.conflicts) {
            delays.emplace(std::make_pair(c.flight_i, c.id),
                           *params.default_maneuver_delay);
            delays.emplace(std::make_pair(c.flight_j, c.id),
                           *params.default_maneuver_delay);
        }
    }
    return delays;
}

InterstitialBounds resolve_bounds(const Instance& inst,
                                  const ModelParams& params) {
    InterstitialBounds bounds = params.interstitial_bounds;
    if (params.default_interstitial_bound) {
        for (const auto& [flight, ids] : inst.flight_conflicts) {
            for (int cid : ids) {
                bounds.emplace(std::make_pair(flight, cid),
                               *params.default_interstitial_bound);
            }
        }
    }
    return bounds;
}

PenaltyWeights resolve_weights(const std::string& arg, const Instance& inst,
                               const Discretization& disc) {
    if (arg == "auto") return sufficient_penalties(inst, disc);
    PenaltyWeights w;
    if (std::sscanf(arg.c_str(), "%lf,%lf,%lf", &w.encoding, &w.conflict,
                    &w.consistency) != 3) {
        throw Error("bad --weights: expected auto or three comma-separated "
                    "numbers, got '" + arg + "'");
    }
    return w;
}

CompiledModel build_model(const Instance& inst, const ModelOpts& mo,
                          const Discretization& disc,
                          const ModelParams& params) {
    const PenaltyWeights w = resolve_weights(mo.weights, inst, disc);
    switch (model_kind_from_string(mo.model)) {
        case ModelKind::departure:
            return build_departure_qubo(inst, disc, w);
        case ModelKind::global:
            return build_global_qubo(inst, params.global, w);
        case ModelKind::exclusive:
            return build_exclusive_qubo(inst, resolve_maneuver_delays(inst, params),
                                        disc, w);
        case ModelKind::flexible:
            return build_flexible_qubo(inst, resolve_maneuver_delays(inst, params),
                                       disc, w, params.allow_both);
        case ModelKind::interstitial:
            return build_interstitial_qubo(inst, resolve_bounds(inst, params),
                                           disc, w);
    }
    throw Error("unreachable model kind");
}

// --- subcommands ---------------------------------------------------------------

int cmd_detect(const CommonOpts& o) {
    const int d_max = o.d_max_list.front();
    const FlightSet fs = load_flights(o);
    const ConflictSet cs = detect_all(fs, separation(o), d_max);

    fs::create_directories(o.out_dir);
    std::ostringstream conflicts_json;
    conflicts_to_json(cs, conflicts_json);
    write_atomic(fs::path(o.out_dir) / "conflicts.json", conflicts_json.str());

    std::size_t pair_count = 0;
    for (const auto& c : cs.conflicts) pair_count += c.pairs.size();
    json summary{{"flights", fs.size()},
                 {"conflicts", cs.conflicts.size()},
                 {"potential_pairs", pair_count},
                 {"d_max", d_max}};
    write_atomic(fs::path(o.out_dir) / "detect_summary.json",
                 summary.dump(2) + "\n");
    std::cout << summary.dump() << '\n';
    return 0;
}

int cmd_stats(const CommonOpts& o, int tw_min_size) {
    const FlightSet fs = load_flights(o);
    const SeparationParams params = separation(o);
    fs::create_directories(o.out_dir);

    std::string counts =
        "d_max,components_with_trivial,components_without_trivial\n";
    std::string sizes = "d_max,component_size,count\n";
    std::string degrees = "d_max,degree,count\n";
    std::string alphas = "d_max,alpha,stderr\n";
    std::string tws = "d_max,component,size,treewidth\n";
    std::string gammas = "d_max,gamma,stderr\n";

    for (int d_max : o.d_max_list) {
        const ConflictSet cs = detect_all(fs, params, d_max);
        const ConflictGraph g = build_conflict_graph(fs, cs, d_max);
        const auto with = extract_instances(g, fs, cs, d_max, true);
        const auto without = extract_instances(g, fs, cs, d_max, false);
        counts += std::to_string(d_max) + "," + std::to_string(with.size()) +
                  "," + std::to_string(without.size()) + "\n";

        const GraphStats stats = compute_graph_stats(g, tw_min_size);
        std::map<int, int> size_hist;
        for (int s : stats.component_sizes) ++size_hist[s];
        for (const auto& [size, count] : size_hist) {
            sizes += std::to_string(d_max) + "," + std::to_string(size) + "," +
                     std::to_string(count) + "\n";
        }
        for (const auto& [degree, count] : stats.degree_histogram) {
            degrees += std::to_string(d_max) + "," + std::to_string(degree) +
                       "," + std::to_string(count) + "\n";
        }
        if (stats.power_law) {
            alphas += std::to_string(d_max) + "," +
                      csv_num(stats.power_law->slope) + "," +
                      csv_num(stats.power_law->slope_stderr) + "\n";
        } else {
            alphas += std::to_string(d_max) + ",undefined,undefined\n";
        }
        for (std::size_t c = 0; c < stats.component_sizes.size(); ++c) {
            tws += std::to_string(d_max) + "," + std::to_string(c) + "," +
                   std::to_string(stats.component_sizes[c]) + "," +
                   std::to_string(stats.component_treewidths[c]) + "\n";
        }
        if (stats.treewidth_slope) {
            gammas += std::to_string(d_max) + "," +
                      csv_num(stats.treewidth_slope->slope) + "," +
                      csv_num(stats.treewidth_slope->slope_stderr) + "\n";
        } else {
            gammas += std::to_string(d_max) + ",undefined,undefined\n";
        }
    }

    write_atomic(fs::path(o.out_dir) / "component_counts.csv", counts);
    write_atomic(fs::path(o.out_dir) / "component_sizes.csv", sizes);
    write_atomic(fs::path(o.out_dir) / "degree_histogram.csv", degrees);
    write_atomic(fs::path(o.out_dir) / "power_law.csv", alphas);
    write_atomic(fs::path(o.out_dir) / "treewidth.csv", tws);
    write_atomic(fs::path(o.out_dir) / "treewidth_slope.csv", gammas);
    std::cout << "stats written to " << o.out_dir << '\n';
    return 0;
}

int cmd_build(const CommonOpts& o, const ModelOpts& mo) {
    const int d_max = o.d_max_list.front();
    const int delta_d = o.delta_d_list.front();
    if (delta_d <= 0 || d_max < 0 || d_max % delta_d != 0) {
        throw Error("--dmax must be a non-negative multiple of --delta-d");
    }
    const Discretization disc{delta_d, d_max / delta_d};
    const ModelParams params = load_model_params(mo.params_path);

    const Pipeline p = run_pipeline(o, d_max);
    fs::create_directories(o.out_dir);

    std::vector<CompiledModel> models(p.instances.size());
    std::vector<std::string> errors(p.instances.size());
    parallel_for(p.instances.size(), [&](std::size_t i) {
        try {
            models[i] = build_model(p.instances[i], mo, disc, params);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i].empty()) {
            throw Error("instance " + std::to_string(p.instances[i].id) + ": " +
                        errors[i]);
        }
    }

    json manifest = json::array();
    for (std::size_t i = 0; i < p.instances.size(); ++i) {
        const Instance& inst = p.instances[i];
        const CompiledModel& m = models[i];
        char qubo_name[64], vars_name[64];
        std::snprintf(qubo_name, sizeof(qubo_name), "instance_%03d.qubo",
                      inst.id);
        std::snprintf(vars_name, sizeof(vars_name), "instance_%03d.vars.json",
                      inst.id);

        std::ostringstream qubo_out, vars_out;
        export_qubo(m.form, qubo_out);
        export_variable_map(m.form, vars_out);
        write_atomic(fs::path(o.out_dir) / qubo_name, qubo_out.str());
        write_atomic(fs::path(o.out_dir) / vars_name, vars_out.str());

        manifest.push_back({{"instance", inst.id},
                            {"flights", inst.flights.size()},
                            {"conflicts", inst.conflicts.size()},
                            {"model", to_string(m.kind)},
                            {"variables", m.form.num_variables()},
                            {"c_max", max_coefficient_ratio(to_ising(m.form))},
                            {"qubo_file", qubo_name},
                            {"vars_file", vars_name}});
    }
    write_atomic(fs::path(o.out_dir) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << manifest.size() << " instances written to " << o.out_dir
              << '\n';
    return 0;
}

int cmd_solve(const CommonOpts& o, const ModelOpts& mo, const SolveOpts& so) {
    const int d_max = o.d_max_list.front();
    const int delta_d = o.delta_d_list.front();
    if (delta_d <= 0 || d_max < 0 || d_max % delta_d != 0) {
        throw Error("--dmax must be a non-negative multiple of --delta-d");
    }
    const Discretization disc{delta_d, d_max / delta_d};
    const ModelParams params = load_model_params(mo.params_path);
    const bool exact = [&] {
        if (so.solver == "exact") return true;
        if (so.solver == "sa") return false;
        throw Error("unknown --solver: " + so.solver);
    }();

    const Pipeline p = run_pipeline(o, d_max);
    fs::create_directories(o.out_dir);

    json results = json::array();
    std::string csv =
        "instance,flights,conflicts,variables,solver,energy,total_delay,"
        "feasible,evaluations\n";
    std::string t99_csv = "instance,success_probability,t_anneal_s,t99_s\n";
    bool any_guarded = false;
    double total_wall = 0.0;

    for (const Instance& inst : p.instances) {
        json row{{"instance", inst.id},
                 {"flights", inst.flights.size()},
                 {"conflicts", inst.conflicts.size()},
                 {"model", mo.model},
                 {"solver", so.solver}};
        try {
            const CompiledModel m = build_model(inst, mo, disc, params);
            row["variables"] = m.form.num_variables();

            AnnealSchedule schedule;
            schedule.sweeps = so.sweeps;
            schedule.restarts = so.restarts;
            schedule.beta_start = so.beta_start;
            schedule.beta_end = so.beta_end;
            schedule.seed =
                o.seed * 1000003ULL + static_cast<std::uint64_t>(inst.id);

            const SolveResult r = exact ? brute_force_qubo(m.form)
                                        : simulated_annealing(m.form, schedule);
            total_wall += r.wall_seconds;
            const DecodedSolution d = decode(m, r.best_bits);

            row["energy"] = r.best_energy;
            row["total_delay"] = d.total_delay;
            row["feasible"] = d.feasible();
            row["evaluations"] = r.evaluations;
            row["delays"] = d.departure_delay;
            if (!d.maneuvers.empty()) {
                json man = json::object();
                for (const auto& [cid, flights] : d.maneuvers) {
                    man[std::to_string(cid)] = flights;
                }
                row["maneuvers"] = man;
            }
            if (!d.notes.empty()) row["notes"] = d.notes;

            csv += std::to_string(inst.id) + "," +
                   std::to_string(inst.flights.size()) + "," +
                   std::to_string(inst.conflicts.size()) + "," +
                   std::to_string(m.form.num_variables()) + "," + so.solver +
                   "," + csv_num(r.best_energy) + "," +
                   csv_num(d.total_delay) + "," +
                   (d.feasible() ? "1" : "0") + "," +
                   std::to_string(r.evaluations) + "\n";

            if (so.penalty_sweep) {
                const PenaltyWeights ref = sufficient_penalties(inst, disc);
                std::vector<double> grid;
                for (int step = 0; step <= 7; ++step) {
                    grid.push_back(ref.conflict * step / 4.0);
                }
                const ValidityMap map =
                    penalty_validity_sweep(inst, disc, grid, grid);
                std::string vcsv = "lambda_conflict,lambda_encoding,valid\n";
                for (std::size_t ci = 0; ci < grid.size(); ++ci) {
                    for (std::size_t ei = 0; ei < grid.size(); ++ei) {
                        vcsv += csv_num(grid[ci]) + "," + csv_num(grid[ei]) +
                                "," + (map.valid[ci][ei] ? "1" : "0") + "\n";
                    }
                }
                char name[64];
                std::snprintf(name, sizeof(name), "validity_%03d.csv", inst.id);
                write_atomic(fs::path(o.out_dir) / name, vcsv);
            }

            if (so.disc_sweep) {
                const SweepTable table = discretization_sweep(
                    inst, o.delta_d_list, o.d_max_list,
                    exact ? SolverChoice::exact : SolverChoice::sa, schedule);
                std::string scsv = "delta_d,d_max,total_delay,feasible\n";
                for (const auto& srow : table.rows) {
                    scsv += std::to_string(srow.delta_d) + "," +
                            std::to_string(srow.d_max) + "," +
                            csv_num(srow.total_delay) + "," +
                            (srow.feasible ? "1" : "0") + "\n";
                }
                for (const auto& note : table.notes) {
                    scsv += "# " + note + "\n";
                }
                char name[64];
                std::snprintf(name, sizeof(name), "sweep_%03d.csv", inst.id);
                write_atomic(fs::path(o.out_dir) / name, scsv);
            }

            if (so.t99_trials > 0) {
                const SolveResult exact_r = brute_force_qubo(m.form);
                std::vector<SolveResult> trials;
                trials.reserve(static_cast<std::size_t>(so.t99_trials));
                for (int trial = 0; trial < so.t99_trials; ++trial) {
                    AnnealSchedule ts = schedule;
                    ts.seed = schedule.seed + 7919ULL * (trial + 1);
                    trials.push_back(simulated_annealing(m.form, ts));
                }
                const double prob =
                    success_probability(trials, exact_r.best_energy);
                const double t99 =
                    time_to_solution_99(prob, so.t99_anneal_seconds);
                t99_csv += std::to_string(inst.id) + "," + csv_num(prob) + "," +
                           csv_num(so.t99_anneal_seconds) + "," +
                           csv_num(t99) + "\n";
            }
        } catch (const GuardError& e) {
            any_guarded = true;
            row["error"] = e.what();
            csv += std::to_string(inst.id) + ",,,,,,,," + "\n";
            std::cerr << "instance " << inst.id << " skipped: " << e.what()
                      << '\n';
        }
        results.push_back(std::move(row));
    }

    write_atomic(fs::path(o.out_dir) / "results.json", results.dump(2) + "\n");
    write_atomic(fs::path(o.out_dir) / "results.csv", csv);
    if (so.t99_trials > 0) {
        write_atomic(fs::path(o.out_dir) / "t99.csv", t99_csv);
    }
    std::cerr << "solved " << results.size() << " instances in " << total_wall
              << " s\n";
    std::cout << results.size() << " results written to " << o.out_dir << '\n';
    return any_guarded ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Air-traffic deconfliction: trajectories to QUBO instances"};
    app.require_subcommand(1);

    CommonOpts detect_opts, stats_opts, build_opts, solve_opts;
    ModelOpts build_model_opts, solve_model_opts;
    SolveOpts solver_opts;
    int tw_min_size = 50;

    auto* detect = app.add_subcommand("detect", "Detect and cluster conflicts");
    add_common(detect, detect_opts, false);

    auto* stats = app.add_subcommand("stats", "Conflict-graph statistics");
    add_common(stats, stats_opts, false);
    stats->add_option("--tw-min-size", tw_min_size,
                      "Smallest component size in the treewidth fit");

    auto* build = app.add_subcommand("build", "Compile QUBO instances");
    add_common(build, build_opts, true);
    add_model(build, build_model_opts);

    auto* solve = app.add_subcommand("solve", "Solve compiled instances");
    add_common(solve, solve_opts, true);
    add_model(solve, solve_model_opts);
    solve->add_option("--solver", solver_opts.solver, "exact|sa");
    solve->add_option("--sweeps", solver_opts.sweeps, "Annealing sweeps");
    solve->add_option("--restarts", solver_opts.restarts, "Annealing restarts");
    solve->add_option("--beta-start", solver_opts.beta_start);
    solve->add_option("--beta-end", solver_opts.beta_end);
    solve->add_flag("--penalty-sweep", solver_opts.penalty_sweep,
                    "Emit a penalty-weight validity map per instance");
    solve->add_flag("--disc-sweep", solver_opts.disc_sweep,
                    "Emit a discretization sweep per instance");
    solve->add_option("--t99", solver_opts.t99_trials,
                      "Trials for the time-to-solution report");
    solve->add_option("--t99-anneal", solver_opts.t99_anneal_seconds,
                      "Assumed anneal time per run, seconds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed()) return cmd_detect(detect_opts);
        if (stats->parsed()) return cmd_stats(stats_opts, tw_min_size);
        if (build->parsed()) return cmd_build(build_opts, build_model_opts);
        if (solve->parsed()) {
            return cmd_solve(solve_opts, solve_model_opts, solver_opts);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
