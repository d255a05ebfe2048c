#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "infoplan/agent_dp.hpp"
#include "infoplan/domains/guess.hpp"
#include "infoplan/domains/submarine.hpp"
#include "infoplan/domains/weighing.hpp"

using namespace infoplan;
using Catch::Approx;

namespace {

template <typename T>
std::vector<T> sorted(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    return v;
}

/// Toy coupled process on a 3-cell line: the admissible subinterval sizes of
/// a guess-style measurement depend on the agent position, and the agent
/// dynamics may slip (stay in place) with the given probability.
struct LineGuess {
    using agent_state_type = int;   // position 0..2
    using agent_control_type = int; // -1 or +1
    using disturbance_type = int;   // 0 = move as intended, 1 = slip (stay)
    using meas_state_type = long;
    using measurement_type = long;
    using outcome_type = GuessOutcome;

    long n = 6;
    double slip = 0.0;

    std::vector<int> initial_positions() const { return {0, 1, 2}; }
    long initial_measurement_state() const { return n; }
    std::vector<int> control_set(int, int pos) const {
        std::vector<int> controls;
        if (pos > 0) controls.push_back(-1);
        if (pos < 2) controls.push_back(+1);
        return controls;
    }
    OutcomeDistribution<int> disturbance_distribution(int, int, int) const {
        if (slip == 0.0) return OutcomeDistribution<int>::point_mass(0);
        return OutcomeDistribution<int>({{0, 1.0 - slip}, {1, slip}});
    }
    int dynamics(int, int pos, int control, int w) const { return w == 1 ? pos : pos + control; }
    std::vector<long> measurement_set(int, int pos, long x) const {
        if (x <= 1) return {0};
        std::vector<long> set;
        for (long u = 1; u < std::min<long>(x, pos + 2); ++u) set.push_back(u);
        return set;
    }
    OutcomeDistribution<GuessOutcome> outcome_distribution(int, long x, long u) const {
        using D = OutcomeDistribution<GuessOutcome>;
        if (x <= 1 || u == 0) return D::point_mass(GuessOutcome::resolved);
        return D({{GuessOutcome::yes, double(u) / double(x)},
                  {GuessOutcome::no, double(x - u) / double(x)}});
    }
    long transition(int, long x, long u, GuessOutcome m) const {
        switch (m) {
            case GuessOutcome::yes: return u;
            case GuessOutcome::no: return x - u;
            case GuessOutcome::resolved: return 1;
        }
        return 1;
    }
    Bits terminal_entropy(int, long) const { return Bits{0.0}; }
};

/// Direct-substitution evaluator for deterministic dynamics: the recurrence
/// with the disturbance expectation removed (the point mass substituted).
double substituted_value(const LineGuess& p, int k, int horizon, int pos, long x) {
    if (k == horizon) return 0.0;
    double best_control = -1e300;
    for (int control : p.control_set(k, pos)) {
        const int next_pos = p.dynamics(k, pos, control, 0);
        double best_meas = -1e300;
        for (long u : p.measurement_set(k, pos, x)) {
            double expected = 0.0;
            const auto dist = p.outcome_distribution(k, x, u);
            for (const auto& o : dist.outcomes()) {
                if (o.probability <= 0.0) continue;
                expected += o.probability *
                            (std::log2(1.0 / o.probability) +
                             substituted_value(p, k + 1, horizon, next_pos,
                                               p.transition(k, x, u, o.label)));
            }
            best_meas = std::max(best_meas, expected);
        }
        best_control = std::max(best_control, best_meas);
    }
    return best_control;
}

} // namespace

TEST_CASE("submarine 3x3: log2 9 bits in three measurements from the right starts") {
    const SubmarineProcess proc{Grid(3, 3)};
    const auto solution = solve_extended(proc, 3);
    auto [value, starts] = maximize_initial(solution, proc);
    CHECK(value.value == Approx(std::log2(9.0)).margin(1e-9));
    CHECK(sorted(starts) == std::vector<int>{2, 4, 6, 8});
    for (int start : starts)
        CHECK(sonar_coverage(proc.grid(), start, CellMask{}).first == 4);
}

TEST_CASE("submarine 3x3 optimal controls contain the known table") {
    const SubmarineProcess proc{Grid(3, 3)};
    const auto solution = solve_extended(proc, 3);
    const auto x0 = proc.initial_measurement_state();

    struct Row {
        int start;
        int u0;
        std::vector<int> u1;
    };
    const std::vector<Row> table{
        {2, 6, {-4, -2}}, {4, 2, {-4, 2}}, {6, -2, {-2, 4}}, {8, -6, {2, 4}}};

    for (const auto& row : table) {
        CAPTURE(row.start);
        const AugmentedState<int, SubmarineMeasState> s0{row.start, x0};
        auto controls0 = solution.control_policy.at(0, s0);
        std::vector<int> deltas0;
        for (int dest : controls0) deltas0.push_back(dest - row.start);
        CHECK(std::count(deltas0.begin(), deltas0.end(), row.u0) == 1);

        // Follow the listed first move along the not-found branch.
        const int pos1 = row.start + row.u0;
        const auto x1 = proc.transition(0, x0, row.start, kNotFound);
        auto controls1 = solution.control_policy.at(1, {pos1, x1});
        std::vector<int> deltas1;
        for (int dest : controls1) deltas1.push_back(dest - pos1);
        for (int expected : row.u1)
            CHECK(std::count(deltas1.begin(), deltas1.end(), expected) == 1);
    }
}

TEST_CASE("submarine 3x3 values respect the grid symmetry classes") {
    const SubmarineProcess proc{Grid(3, 3)};
    const auto solution = solve_extended(proc, 3);
    const auto x0 = proc.initial_measurement_state();
    auto value_at = [&](int start) { return solution.values.at(0, {start, x0}).value; };
    for (int edge : {4, 6, 8}) CHECK(value_at(edge) == Approx(value_at(2)).margin(1e-9));
    for (int corner : {3, 7, 9}) CHECK(value_at(corner) == Approx(value_at(1)).margin(1e-9));
}

TEST_CASE("corner starts cannot reach log2 9 in three measurements") {
    const SubmarineProcess corners{Grid(3, 3), {1, 3, 7, 9}};
    const auto solution = solve_extended(corners, 3);
    auto [value, starts] = maximize_initial(solution, corners);
    CHECK(value.value < std::log2(9.0) - 1e-6);
    CHECK(starts.size() == 4); // all corners equivalent by symmetry
}

TEST_CASE("maximize_initial with a single candidate returns it") {
    const SubmarineProcess proc{Grid(3, 3), {5}};
    const auto solution = solve_extended(proc, 2);
    auto [value, starts] = maximize_initial(solution, proc);
    CHECK(starts == std::vector<int>{5});
    CHECK(value.value == Approx(solution.values.at(0, {5, proc.initial_measurement_state()}).value));
}

TEST_CASE("oracle equivalence on the 2x2 and 3x3 submarine") {
    for (int n : {2, 3}) {
        const SubmarineProcess proc{Grid(n, n)};
        for (int horizon = 1; horizon <= 3; ++horizon) {
            CAPTURE(n, horizon);
            const auto solution = solve_extended(proc, horizon);
            const auto [value, starts] = maximize_initial(solution, proc);
            CHECK(value.value == Approx(brute_force_value(proc, horizon).value).margin(1e-9));
        }
    }
}

TEST_CASE("oracle equivalence on weighing wrapped as a coupled process") {
    for (long n = 2; n <= 4; ++n) {
        const TrivialCoupling proc{weighing_model(n)};
        for (int horizon = 1; horizon <= 2; ++horizon) {
            CAPTURE(n, horizon);
            const auto solution = solve_extended(proc, horizon);
            const auto [value, starts] = maximize_initial(solution, proc);
            CHECK(value.value == Approx(brute_force_value(proc, horizon).value).margin(1e-9));
        }
    }
}

TEST_CASE("weighing n=3 as a coupled process with one dummy position") {
    const TrivialCoupling proc{weighing_model(3)};
    CHECK(brute_force_value(proc, 1).value == Approx(std::log2(3.0)).margin(1e-9));
}

TEST_CASE("brute force at horizon zero returns the terminal entropy") {
    const TrivialCoupling proc{weighing_model(3)};
    CHECK(brute_force_value(proc, 0).value == Approx(0.0).margin(1e-15));
}

TEST_CASE("all-searched state with zero terminal entropy is worth zero") {
    const SubmarineProcess proc{Grid(3, 3)};
    const auto solution = solve_extended(proc, 3);
    const auto resolved = proc.resolved_state();
    // Resolved states reachable at stage 1 carry no further value.
    for (const auto& [state, value] : solution.values.stage(1))
        if (state.meas.resolved) CHECK(value.value == Approx(0.0).margin(1e-12));
}

TEST_CASE("point-mass disturbances reduce to direct substitution") {
    const LineGuess proc{.n = 6, .slip = 0.0};
    const auto solution = solve_extended(proc, 3);
    for (int pos : proc.initial_positions()) {
        CHECK(solution.values.at(0, {pos, 6L}).value ==
              Approx(substituted_value(proc, 0, 3, pos, 6)).margin(1e-12));
    }
}

TEST_CASE("oracle equivalence under stochastic agent dynamics") {
    const LineGuess proc{.n = 5, .slip = 0.3};
    for (int horizon = 1; horizon <= 3; ++horizon) {
        const auto solution = solve_extended(proc, horizon);
        const auto [value, starts] = maximize_initial(solution, proc);
        CHECK(value.value == Approx(brute_force_value(proc, horizon).value).margin(1e-9));
    }
}

TEST_CASE("extended value is monotone in the horizon") {
    const SubmarineProcess proc{Grid(3, 3)};
    double previous = 0.0;
    for (int horizon = 1; horizon <= 4; ++horizon) {
        const auto solution = solve_extended(proc, horizon);
        const auto [value, starts] = maximize_initial(solution, proc);
        CHECK(value.value >= previous - 1e-12);
        previous = value.value;
    }
}

TEST_CASE("brute force node cap raises a resource error") {
    const SubmarineProcess proc{Grid(3, 3)};
    BruteForceOptions tiny;
    tiny.node_cap = 10;
    CHECK_THROWS_AS(brute_force_value(proc, 3, tiny), resource_error);
}
