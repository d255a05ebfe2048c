#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "infoplan/agent_dp.hpp"
#include "infoplan/domains/guess.hpp"
#include "infoplan/domains/submarine.hpp"
#include "infoplan/domains/weighing.hpp"
#include "infoplan/dp.hpp"
#include "infoplan/errors.hpp"
#include "infoplan/gp/transect.hpp"
#include "infoplan/rollout.hpp"
#include "infoplan/submarine_search.hpp"
#include "infoplan/version.hpp"

namespace infoplan::harness {

using nlohmann::json;

/// One experiment's results: a full JSON document plus CSV renderings of its
/// tables. Every document embeds the resolved config, the seed, and the
/// artifact version; re-running the same config reproduces it byte-for-byte
/// (timings are log output, never part of the report).
struct Report {
    json document;
    std::string csv;
    std::optional<std::string> trajectory_csv;
};

namespace detail {

/// CSV cells are rendered through the JSON number serializer so the two
/// encodings of a report carry byte-identical values.
inline std::string cell(double v) { return json(v).dump(); }
inline std::string cell(long v) { return std::to_string(v); }
inline std::string cell(int v) { return std::to_string(v); }

template <typename T>
std::string joined(const std::vector<T>& values, char sep = ';') {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out.push_back(sep);
        out += cell(values[i]);
    }
    return out;
}

/// Leading comment lines carrying the config echo, then the header row.
inline std::string csv_preamble(const json& config, const std::string& header) {
    std::string out;
    out += "# version=" + std::string(kArtifactVersion) + "\n";
    for (const auto& [key, value] : config.items())
        out += "# " + key + "=" + (value.is_string() ? value.get<std::string>() : value.dump()) +
               "\n";
    out += header + "\n";
    return out;
}

template <typename State>
json stage_table_json(const ValueFunction<State>& values,
                      const PolicyTable<State, long>& policy) {
    json stages = json::array();
    for (int k = 0; k < policy.stages(); ++k) {
        json entries = json::array();
        std::vector<State> states;
        for (const auto& [state, value] : values.stage(k)) states.push_back(state);
        std::sort(states.begin(), states.end());
        for (const auto& state : states) {
            auto argmax = policy.at(k, state);
            std::sort(argmax.begin(), argmax.end());
            entries.push_back({{"state", state},
                               {"value_bits", values.at(k, state).value},
                               {"argmax", argmax}});
        }
        stages.push_back({{"stage", k}, {"entries", entries}});
    }
    return stages;
}

template <typename State>
std::string stage_table_csv(const json& config, const ValueFunction<State>& values,
                            const PolicyTable<State, long>& policy) {
    std::string out = csv_preamble(config, "stage,state,value_bits,argmax");
    for (int k = 0; k < policy.stages(); ++k) {
        std::vector<State> states;
        for (const auto& [state, value] : values.stage(k)) states.push_back(state);
        std::sort(states.begin(), states.end());
        for (const auto& state : states) {
            auto argmax = policy.at(k, state);
            std::sort(argmax.begin(), argmax.end());
            out += std::to_string(k) + "," + cell(state) + "," + cell(values.at(k, state).value) +
                   "," + joined(argmax) + "\n";
        }
    }
    return out;
}

} // namespace detail

inline long ternary_bound(long n) {
    return static_cast<long>(
        std::ceil(std::log2(static_cast<double>(n)) / std::log2(3.0) - 1e-12));
}

inline long binary_bound(long n) {
    return static_cast<long>(std::ceil(std::log2(static_cast<double>(n)) - 1e-12));
}

struct CountingParams {
    long n = 2;
    std::optional<int> horizon;
    std::optional<double> target_bits;
    int n_max = 48;
    std::uint64_t seed = 0;
    std::size_t state_cap = kDefaultStateCap;
};

namespace detail {

template <typename Process>
Report run_counting(const char* experiment, const Process& process, const CountingParams& params,
                    long bound) {
    SolveOptions options{params.state_cap};
    json config{{"experiment", experiment},
                {"n", params.n},
                {"seed", params.seed},
                {"state_cap", params.state_cap}};
    if (params.horizon) config["horizon"] = *params.horizon;
    if (params.target_bits) config["target_bits"] = *params.target_bits;

    std::optional<int> min_stages;
    int horizon;
    if (params.target_bits) {
        min_stages =
            min_stages_for_information(process, Bits{*params.target_bits}, params.n_max, options);
        horizon = *min_stages;
    } else if (params.horizon) {
        horizon = *params.horizon;
    } else {
        horizon = static_cast<int>(bound);
    }
    const auto solution = solve(process, horizon, options);

    Report report;
    report.document = {{"version", kArtifactVersion},
                       {"config", config},
                       {"horizon", horizon},
                       {"j0_bits", solution.values.at(0, process.initial_state()).value},
                       {"guaranteed_bound_stages", bound},
                       {"stages", detail::stage_table_json(solution.values, solution.policy)}};
    if (min_stages) report.document["min_stages"] = *min_stages;
    report.csv = detail::stage_table_csv(config, solution.values, solution.policy);
    return report;
}

} // namespace detail

/// Weighing experiment: exact solve plus the ceil(log2 n / log2 3) bound.
inline Report run_weighing(const CountingParams& params) {
    return detail::run_counting("weighing", weighing_model(params.n), params,
                                ternary_bound(params.n));
}

/// Guess-my-number experiment: exact solve plus the ceil(log2 n) bound.
inline Report run_guess(const CountingParams& params) {
    return detail::run_counting("guess", guess_model(params.n), params, binary_bound(params.n));
}

struct SubmarineExactParams {
    int width = 3;
    int height = 3;
    std::optional<int> horizon; // default: smallest horizon resolving the grid
    std::size_t state_cap = kDefaultStateCap;
    std::uint64_t seed = 0;
};

/// Exact coupled solve of the search problem. Reports the optimal value and
/// start set, the first-stage coverage per optimal start, and the optimal
/// control table along the not-found branch.
inline Report run_submarine_exact(const SubmarineExactParams& params) {
    const Grid grid(params.width, params.height);
    const SubmarineProcess process(grid);
    SolveOptions options{params.state_cap};
    const double full = std::log2(static_cast<double>(grid.cells()));

    int horizon = params.horizon.value_or(0);
    std::optional<ExtendedSolution<SubmarineProcess>> solution;
    if (params.horizon) {
        solution = solve_extended(process, *params.horizon, options);
    } else {
        for (int n = 1; n <= grid.cells(); ++n) {
            try {
                solution = solve_extended(process, n, options);
            } catch (const resource_error& e) {
                throw resource_error(std::string(e.what()) +
                                     "; use the rollout planner for grids of this size");
            }
            if (maximize_initial(*solution, process).first.value >= full - kValueTolerance) {
                horizon = n;
                break;
            }
        }
        if (horizon == 0)
            throw model_error("submarine-exact: no horizon up to the cell count resolves the grid");
    }

    const auto [value, starts_raw] = maximize_initial(*solution, process);
    auto starts = starts_raw;
    std::sort(starts.begin(), starts.end());

    json config{{"experiment", "submarine-exact"}, {"width", params.width},
                {"height", params.height},        {"seed", params.seed},
                {"state_cap", params.state_cap},  {"horizon", horizon}};

    const auto x0 = process.initial_measurement_state();
    json table = json::array();
    std::string csv = detail::csv_preamble(config, "start,u0,u1_options");
    for (int start : starts) {
        auto moves0 = solution->control_policy.at(0, {start, x0});
        std::vector<int> deltas0;
        for (int dest : moves0) deltas0.push_back(dest - start);
        std::sort(deltas0.begin(), deltas0.end());
        json branches = json::array();
        for (int delta0 : deltas0) {
            const int pos1 = start + delta0;
            const auto x1 = process.transition(0, x0, start, kNotFound);
            std::vector<int> deltas1;
            if (horizon >= 2) {
                for (int dest : solution->control_policy.at(1, {pos1, x1}))
                    deltas1.push_back(dest - pos1);
                std::sort(deltas1.begin(), deltas1.end());
            }
            branches.push_back({{"u0", delta0}, {"u1_options", deltas1}});
            csv += detail::cell(start) + "," + detail::cell(delta0) + "," +
                   detail::joined(deltas1) + "\n";
        }
        table.push_back({{"start", start},
                         {"u0_options", deltas0},
                         {"first_coverage", sonar_coverage(grid, start, CellMask{}).first},
                         {"branches", branches}});
    }

    Report report;
    report.document = {{"version", kArtifactVersion},
                       {"config", config},
                       {"horizon", horizon},
                       {"j_bits", value.value},
                       {"full_resolution_bits", full},
                       {"optimal_starts", starts},
                       {"control_table", table}};
    report.csv = std::move(csv);
    return report;
}

enum class SearchPolicy { greedy, rollout };

struct SubmarineSearchParams {
    int width = 7;
    int height = 7;
    SearchPolicy policy = SearchPolicy::rollout;
    std::uint64_t seed = 0;
    TieBreak tie_break = TieBreak::first_in_enumeration;
    std::vector<int> starts; // empty = every cell
    int step_cap_factor = 2; // step cap = factor * cells
};

inline const char* to_string(SearchPolicy p) {
    return p == SearchPolicy::greedy ? "greedy" : "rollout";
}

/// Guaranteed-find search runs per start with a Table-2-shaped summary over
/// the best completed start. Non-terminating runs are reported, not raised.
inline Report run_submarine_search(const SubmarineSearchParams& params) {
    const Grid grid(params.width, params.height);
    const int step_cap = params.step_cap_factor * grid.cells();
    std::vector<int> starts = params.starts;
    if (starts.empty())
        for (int cell = 1; cell <= grid.cells(); ++cell) starts.push_back(cell);
    std::sort(starts.begin(), starts.end());

    json config{{"experiment", "submarine-search"},
                {"width", params.width},
                {"height", params.height},
                {"policy", to_string(params.policy)},
                {"seed", params.seed},
                {"tie_break", params.tie_break == TieBreak::first_in_enumeration
                                  ? "first-in-enumeration"
                                  : "lowest-control-id"},
                {"step_cap", step_cap},
                {"starts", starts}};

    json runs = json::array();
    std::optional<SearchTrajectory> best;
    int best_start = 0;
    for (int start : starts) {
        const auto trajectory = params.policy == SearchPolicy::greedy
                                    ? greedy_search(grid, start, step_cap, params.tie_break)
                                    : plan_guaranteed_search(grid, start, step_cap,
                                                             params.tie_break);
        runs.push_back({{"start", start},
                        {"completed", trajectory.completed},
                        {"measurements", trajectory.measurements()},
                        {"u_sequence", trajectory.coverage_sequence()}});
        if (trajectory.completed &&
            (!best || trajectory.measurements() < best->measurements())) {
            best = trajectory;
            best_start = start;
        }
    }

    json summary{{"grid", std::to_string(params.width) + "x" + std::to_string(params.height)},
                 {"cells", grid.cells()}};
    std::string csv = detail::csv_preamble(config, "grid,cells,measurements,percentage");
    if (best) {
        const double percentage =
            100.0 * best->measurements() / static_cast<double>(grid.cells() - 1);
        summary["best_start"] = best_start;
        summary["measurements"] = best->measurements();
        summary["percentage"] = percentage;
        csv += summary["grid"].get<std::string>() + "," + detail::cell(grid.cells()) + "," +
               detail::cell(best->measurements()) + "," + detail::cell(percentage) + "\n";
    } else {
        summary["measurements"] = nullptr;
        summary["note"] = "no start completed within the step cap";
    }

    Report report;
    report.document = {{"version", kArtifactVersion},
                       {"config", config},
                       {"runs", runs},
                       {"summary", summary}};
    report.csv = std::move(csv);

    if (best) {
        std::string tcsv =
            detail::csv_preamble(config, "k,ship_cell,move,coverage_u_k,stage_entropy_bits,"
                                         "cumulative_bits");
        json steps = json::array();
        for (const auto& step : best->steps) {
            tcsv += std::to_string(step.k) + "," + detail::cell(step.ship) + "," +
                    detail::cell(step.move) + "," + detail::cell(step.coverage) + "," +
                    detail::cell(step.stage_bits) + "," + detail::cell(step.cumulative_bits) +
                    "\n";
            steps.push_back({{"k", step.k},
                             {"ship_cell", step.ship},
                             {"move", step.move},
                             {"coverage_u_k", step.coverage},
                             {"stage_entropy_bits", step.stage_bits},
                             {"cumulative_bits", step.cumulative_bits}});
        }
        report.document["best_trajectory"] = steps;
        report.trajectory_csv = std::move(tcsv);
    }
    return report;
}

struct GpTransectParams {
    std::string lattice = "line:5"; // line:N or grid:WxH
    double spacing = 1.0;
    double signal_variance = 1.0;
    double length_scale = 1.0;
    double noise_variance = 0.0;
    int horizon = 3;
    TransectMode mode = TransectMode::deterministic;
    PlanLookahead lookahead = PlanLookahead::rollout;
    int samples_per_control = 1;
    std::uint64_t seed = 0;
    int start = 0;
    std::optional<double> window;
    double slip_probability = 0.0;              // stochastic mode
    std::vector<double> field_variances;        // multi-field mode
    std::vector<std::vector<int>> sensor_choices;
};

inline TransectProblem build_transect(const GpTransectParams& params) {
    const SquaredExponentialKernel kernel(params.signal_variance, params.length_scale,
                                          params.noise_variance);
    TransectProblem problem;
    if (params.lattice.rfind("line:", 0) == 0) {
        problem = line_transect(std::stoi(params.lattice.substr(5)), kernel, params.spacing);
    } else if (params.lattice.rfind("grid:", 0) == 0) {
        const auto spec = params.lattice.substr(5);
        const auto x = spec.find('x');
        if (x == std::string::npos) throw model_error("gp-transect: grid spec must be grid:WxH");
        problem = grid_transect(std::stoi(spec.substr(0, x)), std::stoi(spec.substr(x + 1)),
                                kernel, params.spacing);
    } else {
        throw model_error("gp-transect: lattice must be line:N or grid:WxH");
    }
    problem.mode = params.mode;
    problem.history_window = params.window;
    if (params.mode == TransectMode::stochastic) {
        const double slip = params.slip_probability;
        problem.slip = [slip](int, int from, int intended) {
            if (slip <= 0.0) return OutcomeDistribution<int>::point_mass(intended);
            return OutcomeDistribution<int>({{intended, 1.0 - slip}, {from, slip}});
        };
    }
    if (params.mode == TransectMode::multi_field) {
        problem.fields.clear();
        for (double variance : params.field_variances)
            problem.fields.emplace_back(variance, params.length_scale, params.noise_variance);
        if (problem.fields.empty())
            throw model_error("gp-transect: multi-field mode needs field variances");
        problem.sensor_choices = params.sensor_choices;
    }
    return problem;
}

inline Report run_gp_transect(const GpTransectParams& params) {
    const auto problem = build_transect(params);
    RolloutConfig config;
    config.horizon = params.horizon;
    config.step_cap = params.horizon;
    config.samples_per_control = params.samples_per_control;
    config.rng_seed = params.seed;
    const auto plan = plan_transect(problem, params.start, config, params.lookahead);

    json cfg{{"experiment", "gp-transect"},
             {"lattice", params.lattice},
             {"spacing", params.spacing},
             {"signal_variance", params.signal_variance},
             {"length_scale", params.length_scale},
             {"noise_variance", params.noise_variance},
             {"horizon", params.horizon},
             {"mode", params.mode == TransectMode::deterministic  ? "deterministic"
                      : params.mode == TransectMode::stochastic   ? "stochastic"
                                                                  : "multi-field"},
             {"lookahead",
              params.lookahead == PlanLookahead::rollout ? "rollout" : "exhaustive"},
             {"samples_per_control", params.samples_per_control},
             {"seed", params.seed},
             {"start", params.start}};
    if (params.window) cfg["window"] = *params.window;
    if (params.mode == TransectMode::stochastic) cfg["slip"] = params.slip_probability;
    if (params.mode == TransectMode::multi_field) {
        cfg["field_variances"] = params.field_variances;
        cfg["sensor_choices"] = params.sensor_choices;
    }

    std::string csv = detail::csv_preamble(
        cfg, "k,waypoint,x,y,sensors,stage_entropy_bits,cumulative_bits");
    json steps = json::array();
    double cumulative = 0.0;
    for (std::size_t k = 0; k < plan.path.size(); ++k) {
        cumulative += plan.stage_bits[k];
        csv += std::to_string(k) + "," + detail::cell(plan.path[k]) + "," +
               detail::cell(plan.locations[k].x) + "," + detail::cell(plan.locations[k].y) + "," +
               detail::joined(plan.sensors[k]) + "," + detail::cell(plan.stage_bits[k]) + "," +
               detail::cell(cumulative) + "\n";
        steps.push_back({{"k", k},
                         {"waypoint", plan.path[k]},
                         {"x", plan.locations[k].x},
                         {"y", plan.locations[k].y},
                         {"sensors", plan.sensors[k]},
                         {"stage_entropy_bits", plan.stage_bits[k]},
                         {"cumulative_bits", cumulative}});
    }

    Report report;
    report.document = {{"version", kArtifactVersion},
                       {"config", cfg},
                       {"path", steps},
                       {"total_bits", plan.total_bits},
                       {"joint_path_bits", plan.joint_bits}};
    report.csv = std::move(csv);
    return report;
}

} // namespace infoplan::harness
