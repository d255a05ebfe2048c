#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "infoplan/agent_dp.hpp"
#include "infoplan/domains/guess.hpp"
#include "infoplan/domains/weighing.hpp"
#include "infoplan/dp.hpp"
#include "infoplan/errors.hpp"

using namespace infoplan;
using Catch::Approx;

namespace {

template <typename T>
std::vector<T> sorted(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    return v;
}

/// Wraps a process with reversed measurement enumeration order.
template <typename P>
struct ReversedMeasurements {
    using state_type = typename P::state_type;
    using measurement_type = typename P::measurement_type;
    using outcome_type = typename P::outcome_type;

    P inner;

    state_type initial_state() const { return inner.initial_state(); }
    std::vector<measurement_type> measurement_set(int k, const state_type& x) const {
        auto set = inner.measurement_set(k, x);
        std::reverse(set.begin(), set.end());
        return set;
    }
    auto outcome_distribution(int k, const state_type& x, const measurement_type& u) const {
        return inner.outcome_distribution(k, x, u);
    }
    state_type transition(int k, const state_type& x, const measurement_type& u,
                          const outcome_type& m) const {
        return inner.transition(k, x, u, m);
    }
    Bits terminal_entropy(const state_type& x) const { return inner.terminal_entropy(x); }
};

} // namespace

TEST_CASE("bellman backup on weighing tail subproblems") {
    const WeighingProcess w(4);
    std::unordered_map<long, Bits> zero{{1, Bits{0.0}}, {2, Bits{0.0}}, {3, Bits{0.0}}};

    auto [v2, a2] = bellman_backup(w, 0, 2L, zero);
    CHECK(v2.value == Approx(1.0));
    CHECK(a2 == std::vector<long>{2});

    auto [v3, a3] = bellman_backup(w, 0, 3L, zero);
    CHECK(v3.value == Approx(std::log2(3.0)));
    CHECK(a3 == std::vector<long>{2});
}

TEST_CASE("bellman backup on a deterministic single-measurement state") {
    // Resolved weighing state: one no-op measurement, point-mass outcome.
    const WeighingProcess w(4);
    std::unordered_map<long, Bits> zero{{1, Bits{0.0}}};
    auto [v, a] = bellman_backup(w, 0, 1L, zero);
    CHECK(v.value == Approx(0.0).margin(1e-15));
    CHECK(a == std::vector<long>{0});
}

TEST_CASE("weighing four balls over two measurements") {
    const auto solution = solve(weighing_model(4), 2);
    CHECK(solution.values.at(0, 4).value == Approx(2.0).margin(1e-9));
    CHECK(sorted(solution.policy.at(0, 4)) == std::vector<long>{2, 4});
}

TEST_CASE("guess-my-number exact solves") {
    const auto s4 = solve(guess_model(4), 2);
    CHECK(s4.values.at(0, 4).value == Approx(2.0).margin(1e-9));
    CHECK(sorted(s4.policy.at(0, 4)) == std::vector<long>{2});

    const auto s3 = solve(guess_model(3), 2);
    CHECK(s3.values.at(0, 3).value == Approx(std::log2(3.0)).margin(1e-9));
    CHECK(sorted(s3.policy.at(0, 3)) == std::vector<long>{1, 2});
}

TEST_CASE("minimum stages to reach an information target") {
    CHECK(min_stages_for_information(weighing_model(9), Bits{std::log2(9.0)}, 8) == 2);
    CHECK(min_stages_for_information(guess_model(8), Bits{3.0}, 8) == 3);
    CHECK(min_stages_for_information(weighing_model(3), Bits{std::log2(3.0)}, 8) == 1);
}

TEST_CASE("unreachable target reports the best achieved value") {
    try {
        min_stages_for_information(guess_model(16), Bits{4.0}, 2);
        FAIL("expected target_not_reached");
    } catch (const target_not_reached& e) {
        CHECK(e.best_achieved_bits() == Approx(2.0).margin(1e-9));
    }
}

TEST_CASE("solver input validation") {
    CHECK_THROWS_AS(solve(weighing_model(4), 0), model_error);
    CHECK_THROWS_AS(weighing_model(1), model_error);
    CHECK_THROWS_AS(guess_model(1), model_error);
    SolveOptions tiny;
    tiny.state_cap = 2;
    CHECK_THROWS_AS(solve(weighing_model(12), 3, tiny), resource_error);
}

TEST_CASE("value is monotone in the horizon") {
    for (long n : {5L, 9L, 17L}) {
        double previous = 0.0;
        for (int horizon = 1; horizon <= 4; ++horizon) {
            const auto s = solve(guess_model(n), horizon);
            const double j0 = s.values.at(0, n).value;
            CHECK(j0 >= previous - 1e-12);
            previous = j0;
        }
    }
}

TEST_CASE("counting-domain values never exceed log2 of the hypothesis count") {
    for (long n = 2; n <= 30; ++n) {
        const auto w = solve(weighing_model(n), 3);
        CHECK(w.values.at(0, n).value <= std::log2(static_cast<double>(n)) + 1e-9);
        const auto g = solve(guess_model(n), 5);
        CHECK(g.values.at(0, n).value <= std::log2(static_cast<double>(n)) + 1e-9);
    }
}

TEST_CASE("solve agrees with exhaustive policy enumeration on small instances") {
    for (long n = 2; n <= 8; ++n) {
        for (int horizon = 1; horizon <= 4; ++horizon) {
            if (n >= 7 && horizon == 4) continue; // policy-tree blowup, no extra coverage
            const auto exact = solve(guess_model(n), horizon).values.at(0, n).value;
            const auto oracle =
                brute_force_value(TrivialCoupling(guess_model(n)), horizon).value;
            CHECK(exact == Approx(oracle).margin(1e-9));
        }
    }
    for (long n = 2; n <= 8; ++n) {
        for (int horizon = 1; horizon <= 4; ++horizon) {
            const auto exact = solve(weighing_model(n), horizon).values.at(0, n).value;
            const auto oracle =
                brute_force_value(TrivialCoupling(weighing_model(n)), horizon).value;
            CHECK(exact == Approx(oracle).margin(1e-9));
        }
    }
}

TEST_CASE("argmax sets are independent of measurement enumeration order") {
    for (long n : {4L, 7L, 12L}) {
        const auto forward = solve(weighing_model(n), 2);
        const auto reversed = solve(ReversedMeasurements<WeighingProcess>{weighing_model(n)}, 2);
        CHECK(forward.values.at(0, n).value ==
              Approx(reversed.values.at(0, n).value).margin(1e-12));
        for (int k = 0; k < 2; ++k) {
            for (const auto& [state, argmax] : forward.policy.stage(k)) {
                CAPTURE(n, k, state);
                CHECK(sorted(argmax) == sorted(reversed.policy.at(k, state)));
            }
        }
    }
}
