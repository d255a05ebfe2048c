#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "infoplan/bits.hpp"
#include "infoplan/distribution.hpp"
#include "infoplan/entropy.hpp"
#include "infoplan/errors.hpp"

namespace infoplan {

/// Two values within this absolute distance (in bits) are tied; argmax sets
/// contain every decision within the tolerance of the maximum.
inline constexpr double kValueTolerance = 1e-9;

/// Default bound on the total number of enumerated reachable states.
inline constexpr std::size_t kDefaultStateCap = 5'000'000;

/// A finite-horizon measurement process: the solver treats states as opaque
/// hashable identifiers and only calls these five members.
template <typename P>
concept MeasurementProcessModel = requires(const P& p, int k,
                                           const typename P::state_type& x,
                                           const typename P::measurement_type& u,
                                           const typename P::outcome_type& m) {
    { p.initial_state() } -> std::convertible_to<typename P::state_type>;
    { p.measurement_set(k, x) } -> std::convertible_to<std::vector<typename P::measurement_type>>;
    { p.outcome_distribution(k, x, u) } -> std::convertible_to<OutcomeDistribution<typename P::outcome_type>>;
    { p.transition(k, x, u, m) } -> std::convertible_to<typename P::state_type>;
    { p.terminal_entropy(x) } -> std::convertible_to<Bits>;
};

/// Stage-indexed map from states to values in bits. Index k runs from 0 to
/// the horizon inclusive; the final stage holds the terminal entropies.
template <typename State, typename Hash = std::hash<State>>
class ValueFunction {
public:
    using StageMap = std::unordered_map<State, Bits, Hash>;

    explicit ValueFunction(int horizon = 0) : stages_(static_cast<std::size_t>(horizon) + 1) {}

    StageMap& stage(int k) { return stages_.at(static_cast<std::size_t>(k)); }
    const StageMap& stage(int k) const { return stages_.at(static_cast<std::size_t>(k)); }

    Bits at(int k, const State& x) const {
        const auto& m = stage(k);
        auto it = m.find(x);
        if (it == m.end())
            throw model_error("value function has no entry for a queried state at stage " +
                              std::to_string(k));
        return it->second;
    }

    int horizon() const { return static_cast<int>(stages_.size()) - 1; }

private:
    std::vector<StageMap> stages_;
};

/// Stage-indexed map from states to the full set of maximizing decisions,
/// every decision within kValueTolerance of the stage optimum.
template <typename State, typename Decision, typename Hash = std::hash<State>>
class PolicyTable {
public:
    using StageMap = std::unordered_map<State, std::vector<Decision>, Hash>;

    explicit PolicyTable(int horizon = 0) : stages_(static_cast<std::size_t>(horizon)) {}

    StageMap& stage(int k) { return stages_.at(static_cast<std::size_t>(k)); }
    const StageMap& stage(int k) const { return stages_.at(static_cast<std::size_t>(k)); }

    const std::vector<Decision>& at(int k, const State& x) const {
        const auto& m = stage(k);
        auto it = m.find(x);
        if (it == m.end())
            throw model_error("policy table has no entry for a queried state at stage " +
                              std::to_string(k));
        return it->second;
    }

    int stages() const { return static_cast<int>(stages_.size()); }

private:
    std::vector<StageMap> stages_;
};

struct SolveOptions {
    std::size_t state_cap = kDefaultStateCap;
};

/// One step of the backward recurrence at (k, x): the maximum over admissible
/// measurements of the expected information content plus continuation value,
/// together with every maximizing measurement.
template <MeasurementProcessModel P, typename NextValues>
std::pair<Bits, std::vector<typename P::measurement_type>>
bellman_backup(const P& proc, int k, const typename P::state_type& x, const NextValues& next) {
    const auto measurements = proc.measurement_set(k, x);
    if (measurements.empty())
        throw model_error("empty measurement set at a pre-horizon state, stage " +
                          std::to_string(k));
    double best = 0.0;
    bool have_best = false;
    std::vector<typename P::measurement_type> argmax;
    for (const auto& u : measurements) {
        const auto dist = proc.outcome_distribution(k, x, u);
        double expected = 0.0;
        for (const auto& o : dist.outcomes()) {
            if (o.probability <= 0.0) continue;
            const auto successor = proc.transition(k, x, u, o.label);
            auto it = next.find(successor);
            if (it == next.end())
                throw model_error("successor state missing from continuation values at stage " +
                                  std::to_string(k));
            expected += o.probability *
                        (std::log2(1.0 / o.probability) + it->second.value);
        }
        if (!have_best || expected > best + kValueTolerance) {
            best = expected;
            have_best = true;
            argmax.clear();
            argmax.push_back(u);
        } else if (expected >= best - kValueTolerance) {
            // Tie within tolerance; keep the larger value as the reference.
            if (expected > best) best = expected;
            argmax.push_back(u);
        }
    }
    return {Bits{best}, std::move(argmax)};
}

template <MeasurementProcessModel P>
struct DpSolution {
    using State = typename P::state_type;
    using Measurement = typename P::measurement_type;

    ValueFunction<State> values;
    PolicyTable<State, Measurement> policy;

    Bits initial_value(const P& proc) const { return values.at(0, proc.initial_state()); }
};

/// Exact finite-horizon solve by forward reachability followed by backward
/// induction. Only states reachable from the initial state under some
/// admissible decision sequence are enumerated.
template <MeasurementProcessModel P>
DpSolution<P> solve(const P& proc, int horizon, const SolveOptions& options = {}) {
    using State = typename P::state_type;
    if (horizon < 1) throw model_error("solve: horizon must be at least 1");

    std::vector<std::vector<State>> reachable(static_cast<std::size_t>(horizon) + 1);
    std::vector<std::unordered_set<State>> seen(static_cast<std::size_t>(horizon) + 1);
    std::size_t total = 0;
    auto add_state = [&](int k, const State& x) {
        if (seen[static_cast<std::size_t>(k)].insert(x).second) {
            reachable[static_cast<std::size_t>(k)].push_back(x);
            if (++total > options.state_cap)
                throw resource_error("reachable state count exceeds cap of " +
                                     std::to_string(options.state_cap));
        }
    };
    add_state(0, proc.initial_state());
    for (int k = 0; k < horizon; ++k) {
        for (const auto& x : reachable[static_cast<std::size_t>(k)]) {
            const auto measurements = proc.measurement_set(k, x);
            if (measurements.empty())
                throw model_error("empty measurement set at a reachable pre-horizon state, stage " +
                                  std::to_string(k));
            for (const auto& u : measurements) {
                const auto dist = proc.outcome_distribution(k, x, u);
                for (const auto& o : dist.outcomes())
                    if (o.probability > 0.0)
                        add_state(k + 1, proc.transition(k, x, u, o.label));
            }
        }
    }

    DpSolution<P> solution{ValueFunction<State>(horizon),
                           PolicyTable<State, typename P::measurement_type>(horizon)};
    for (const auto& x : reachable[static_cast<std::size_t>(horizon)])
        solution.values.stage(horizon).emplace(x, proc.terminal_entropy(x));
    for (int k = horizon - 1; k >= 0; --k) {
        const auto& next = solution.values.stage(k + 1);
        for (const auto& x : reachable[static_cast<std::size_t>(k)]) {
            auto [value, argmax] = bellman_backup(proc, k, x, next);
            solution.values.stage(k).emplace(x, value);
            solution.policy.stage(k).emplace(x, std::move(argmax));
        }
    }
    return solution;
}

/// Smallest horizon N <= n_max whose optimal value reaches the target,
/// found by re-solving with increasing N (the value is monotone in N for
/// zero terminal entropy, and the first hit is minimal by construction).
template <MeasurementProcessModel P>
int min_stages_for_information(const P& proc, Bits target, int n_max,
                               const SolveOptions& options = {}) {
    if (!(target.value > 0.0)) throw model_error("information target must be positive");
    if (n_max < 1) throw model_error("min_stages_for_information: n_max must be at least 1");
    double best = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const auto solution = solve(proc, n, options);
        const double j0 = solution.initial_value(proc).value;
        if (j0 >= target.value - kValueTolerance) return n;
        if (j0 > best) best = j0;
    }
    throw target_not_reached("information target " + std::to_string(target.value) +
                                 " bits not reached within " + std::to_string(n_max) +
                                 " stages; best achieved " + std::to_string(best) + " bits",
                             best);
}

} // namespace infoplan
