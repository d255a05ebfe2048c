// Command-line experiment runner for the measurement-planning library.
//
// Subcommands construct a domain instance, run the requested solver, and
// write the report as JSON or CSV. Reports embed config + seed + version and
// are byte-identical across reruns of the same config; wall-clock timing is
// logged to stderr only.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infoplan/harness.hpp"

namespace {

using namespace infoplan;
using namespace infoplan::harness;

constexpr int kExitModelError = 2;
constexpr int kExitResourceError = 3;
constexpr int kExitNumericalError = 4;
constexpr int kExitTargetNotReached = 5;

std::size_t state_cap_from_env() {
    if (const char* cap = std::getenv("INFOPLAN_STATE_CAP")) return std::stoull(cap);
    return kDefaultStateCap;
}

struct OutputOptions {
    std::string format = "json";
    std::string out;
    std::string trajectory_out;
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", opts.out, "Output file (stdout when omitted)");
    cmd->add_option("--trajectory-out", opts.trajectory_out,
                    "Write the best trajectory series as CSV to this path");
}

void emit(const Report& report, const OutputOptions& opts) {
    const std::string payload =
        opts.format == "json" ? report.document.dump(2) + "\n" : report.csv;
    if (opts.out.empty()) {
        std::cout << payload;
    } else {
        std::ofstream file(opts.out, std::ios::binary);
        if (!file) throw model_error("cannot open output file " + opts.out);
        file << payload;
    }
    if (!opts.trajectory_out.empty()) {
        if (!report.trajectory_csv)
            throw model_error("this run produced no trajectory series");
        std::ofstream file(opts.trajectory_out, std::ios::binary);
        if (!file) throw model_error("cannot open output file " + opts.trajectory_out);
        file << *report.trajectory_csv;
    }
}

TieBreak parse_tie(const std::string& name) {
    return name == "lowest-control-id" ? TieBreak::lowest_control_id
                                       : TieBreak::first_in_enumeration;
}

std::vector<std::vector<int>> parse_sensor_choices(const std::string& spec) {
    std::vector<std::vector<int>> choices;
    std::string group;
    std::istringstream groups(spec);
    while (std::getline(groups, group, ';')) {
        std::vector<int> fields;
        std::string field;
        std::istringstream items(group);
        while (std::getline(items, field, ',')) fields.push_back(std::stoi(field));
        choices.push_back(std::move(fields));
    }
    return choices;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal sequences of informative measurements: exact DP, rollout, and GP "
                 "planners"};
    app.require_subcommand(1);
    app.fallthrough(); // --seed and --config may follow the subcommand
    app.set_config("--config")->configurable(false);

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "RNG seed recorded into every report")->capture_default_str();

    OutputOptions output;

    // weighing ---------------------------------------------------------
    CountingParams weighing;
    auto* weighing_cmd = app.add_subcommand("weighing", "Find-the-heavy-ball weighing problem");
    weighing_cmd->add_option("--n", weighing.n, "Number of balls")->required();
    std::optional<int> weighing_horizon;
    std::optional<double> weighing_target;
    weighing_cmd->add_option("--horizon", weighing_horizon, "Number of weighings");
    weighing_cmd->add_option("--target-bits", weighing_target,
                             "Find the fewest weighings reaching this information");
    weighing_cmd->add_option("--n-max", weighing.n_max, "Stage cap for --target-bits");
    add_output_options(weighing_cmd, output);

    // guess ------------------------------------------------------------
    CountingParams guess;
    auto* guess_cmd = app.add_subcommand("guess", "Guess-my-number with yes/no questions");
    guess_cmd->add_option("--n", guess.n, "Size of the integer range")->required();
    std::optional<int> guess_horizon;
    std::optional<double> guess_target;
    guess_cmd->add_option("--horizon", guess_horizon, "Number of questions");
    guess_cmd->add_option("--target-bits", guess_target,
                          "Find the fewest questions reaching this information");
    guess_cmd->add_option("--n-max", guess.n_max, "Stage cap for --target-bits");
    add_output_options(guess_cmd, output);

    // submarine-exact ----------------------------------------------------
    SubmarineExactParams exact;
    std::optional<int> exact_horizon;
    auto* exact_cmd =
        app.add_subcommand("submarine-exact", "Exact coupled solve of the sonar search");
    exact_cmd->add_option("--width", exact.width, "Grid width")->required();
    exact_cmd->add_option("--height", exact.height, "Grid height")->required();
    exact_cmd->add_option("--horizon", exact_horizon,
                          "Fixed horizon (default: smallest resolving horizon)");
    add_output_options(exact_cmd, output);

    // submarine-rollout --------------------------------------------------
    SubmarineSearchParams search;
    std::string search_policy = "rollout";
    std::string search_tie = "first-in-enumeration";
    auto* search_cmd = app.add_subcommand(
        "submarine-rollout", "Guaranteed-find search with the greedy or rollout policy");
    search_cmd->add_option("--width", search.width, "Grid width")->required();
    search_cmd->add_option("--height", search.height, "Grid height")->required();
    search_cmd->add_option("--policy", search_policy, "greedy or rollout")
        ->check(CLI::IsMember({"greedy", "rollout"}))
        ->capture_default_str();
    search_cmd->add_option("--starts", search.starts,
                           "Start cells (default: every cell)");
    search_cmd->add_option("--tie-break", search_tie, "Tie-breaking rule")
        ->check(CLI::IsMember({"first-in-enumeration", "lowest-control-id"}))
        ->capture_default_str();
    search_cmd->add_option("--step-cap-factor", search.step_cap_factor,
                           "Step cap as a multiple of the cell count");
    add_output_options(search_cmd, output);

    // gp-transect --------------------------------------------------------
    GpTransectParams gp;
    std::string gp_mode = "deterministic";
    std::string gp_lookahead = "rollout";
    std::string gp_sensors;
    std::optional<double> gp_window;
    auto* gp_cmd = app.add_subcommand("gp-transect",
                                      "Gaussian-process transect sampling planner");
    gp_cmd->add_option("--lattice", gp.lattice, "line:N or grid:WxH")->capture_default_str();
    gp_cmd->add_option("--spacing", gp.spacing, "Waypoint spacing")->capture_default_str();
    gp_cmd->add_option("--signal-var", gp.signal_variance, "Kernel signal variance")
        ->capture_default_str();
    gp_cmd->add_option("--length-scale", gp.length_scale, "Kernel length scale")
        ->capture_default_str();
    gp_cmd->add_option("--noise-var", gp.noise_variance, "Observation noise variance")
        ->capture_default_str();
    gp_cmd->add_option("--horizon", gp.horizon, "Number of measurements")->capture_default_str();
    gp_cmd->add_option("--start", gp.start, "Start waypoint index")->capture_default_str();
    gp_cmd->add_option("--mode", gp_mode, "deterministic, stochastic, or multi-field")
        ->check(CLI::IsMember({"deterministic", "stochastic", "multi-field"}))
        ->capture_default_str();
    gp_cmd->add_option("--lookahead", gp_lookahead, "rollout or exhaustive")
        ->check(CLI::IsMember({"rollout", "exhaustive"}))
        ->capture_default_str();
    gp_cmd->add_option("--samples", gp.samples_per_control,
                       "Continuation samples per control");
    gp_cmd->add_option("--slip", gp.slip_probability,
                       "Stochastic mode: probability a move slips back");
    gp_cmd->add_option("--field-vars", gp.field_variances,
                       "Multi-field mode: per-field signal variances");
    gp_cmd->add_option("--sensor-choices", gp_sensors,
                       "Multi-field selections, e.g. \"0;1;0,1\"");
    gp_cmd->add_option("--window", gp_window, "Conditioning radius (default: exact)");
    add_output_options(gp_cmd, output);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto started = std::chrono::steady_clock::now();
        Report report;
        if (*weighing_cmd) {
            weighing.horizon = weighing_horizon;
            weighing.target_bits = weighing_target;
            weighing.seed = seed;
            weighing.state_cap = state_cap_from_env();
            report = run_weighing(weighing);
        } else if (*guess_cmd) {
            guess.horizon = guess_horizon;
            guess.target_bits = guess_target;
            guess.seed = seed;
            guess.state_cap = state_cap_from_env();
            report = run_guess(guess);
        } else if (*exact_cmd) {
            exact.horizon = exact_horizon;
            exact.seed = seed;
            exact.state_cap = state_cap_from_env();
            report = run_submarine_exact(exact);
        } else if (*search_cmd) {
            search.policy =
                search_policy == "greedy" ? SearchPolicy::greedy : SearchPolicy::rollout;
            search.tie_break = parse_tie(search_tie);
            search.seed = seed;
            report = run_submarine_search(search);
        } else {
            gp.mode = gp_mode == "deterministic"  ? TransectMode::deterministic
                      : gp_mode == "stochastic"   ? TransectMode::stochastic
                                                  : TransectMode::multi_field;
            gp.lookahead = gp_lookahead == "exhaustive" ? PlanLookahead::exhaustive
                                                        : PlanLookahead::rollout;
            if (!gp_sensors.empty()) gp.sensor_choices = parse_sensor_choices(gp_sensors);
            gp.window = gp_window;
            gp.seed = seed;
            report = run_gp_transect(gp);
        }
        emit(report, output);
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started);
        std::cerr << "done in " << elapsed.count() << " ms\n";
        return 0;
    } catch (const target_not_reached& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTargetNotReached;
    } catch (const resource_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitResourceError;
    } catch (const numerical_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalError;
    } catch (const model_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModelError;
    }
}
