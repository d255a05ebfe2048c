#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "infoplan/bits.hpp"
#include "infoplan/distribution.hpp"
#include "infoplan/dp.hpp"
#include "infoplan/errors.hpp"

namespace infoplan {

namespace detail {
inline std::size_t hash_combine(std::size_t a, std::size_t b) {
    return a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
}

template <typename T, typename = void>
struct state_hash_of {
    using type = std::hash<T>;
};
template <typename P>
using meas_hash_t = typename P::meas_state_hash;
} // namespace detail

/// Agent-coupled measurement process: agent motion under controls and
/// disturbances, with the admissible measurement set depending on the agent
/// position as well as the measurement state.
template <typename P>
concept CoupledProcessModel = requires(const P& p, int k,
                                       const typename P::agent_state_type& xa,
                                       const typename P::agent_control_type& uc,
                                       const typename P::disturbance_type& w,
                                       const typename P::meas_state_type& xm,
                                       const typename P::measurement_type& u,
                                       const typename P::outcome_type& m) {
    { p.initial_positions() } -> std::convertible_to<std::vector<typename P::agent_state_type>>;
    { p.initial_measurement_state() } -> std::convertible_to<typename P::meas_state_type>;
    { p.control_set(k, xa) } -> std::convertible_to<std::vector<typename P::agent_control_type>>;
    { p.disturbance_distribution(k, xa, uc) } -> std::convertible_to<OutcomeDistribution<typename P::disturbance_type>>;
    { p.dynamics(k, xa, uc, w) } -> std::convertible_to<typename P::agent_state_type>;
    { p.measurement_set(k, xa, xm) } -> std::convertible_to<std::vector<typename P::measurement_type>>;
    { p.outcome_distribution(k, xm, u) } -> std::convertible_to<OutcomeDistribution<typename P::outcome_type>>;
    { p.transition(k, xm, u, m) } -> std::convertible_to<typename P::meas_state_type>;
    { p.terminal_entropy(xa, xm) } -> std::convertible_to<Bits>;
};

/// Augmented state (agent position, measurement state) restoring the Markov
/// property of the coupled problem.
template <typename A, typename X>
struct AugmentedState {
    A agent;
    X meas;

    friend bool operator==(const AugmentedState&, const AugmentedState&) = default;
};

template <typename A, typename X, typename AHash = std::hash<A>, typename XHash = std::hash<X>>
struct AugmentedStateHash {
    std::size_t operator()(const AugmentedState<A, X>& s) const {
        return detail::hash_combine(AHash{}(s.agent), XHash{}(s.meas));
    }
};

template <CoupledProcessModel P>
using AugmentedStateOf = AugmentedState<typename P::agent_state_type, typename P::meas_state_type>;

namespace detail {
template <typename P>
concept has_meas_hash = requires { typename P::meas_state_hash; };

template <CoupledProcessModel P>
struct aug_hash_of {
    using meas_hash = std::hash<typename P::meas_state_type>;
    using type = AugmentedStateHash<typename P::agent_state_type, typename P::meas_state_type,
                                    std::hash<typename P::agent_state_type>, meas_hash>;
};
template <CoupledProcessModel P>
    requires has_meas_hash<P>
struct aug_hash_of<P> {
    using type = AugmentedStateHash<typename P::agent_state_type, typename P::meas_state_type,
                                    std::hash<typename P::agent_state_type>,
                                    typename P::meas_state_hash>;
};
} // namespace detail

template <CoupledProcessModel P>
using AugmentedHashOf = typename detail::aug_hash_of<P>::type;

/// Solution of the extended recurrence. Both policies are keyed by the full
/// augmented state: the maximizing control generally depends on the
/// measurement state as well as the agent position (two histories reaching
/// the same position can demand different moves), so a position-only table
/// would be ill-defined. Position-keyed views are a reporting projection.
template <CoupledProcessModel P>
struct ExtendedSolution {
    using Aug = AugmentedStateOf<P>;
    using Hash = AugmentedHashOf<P>;

    ValueFunction<Aug, Hash> values;
    PolicyTable<Aug, typename P::measurement_type, Hash> measurement_policy;
    PolicyTable<Aug, typename P::agent_control_type, Hash> control_policy;
};

/// Backward induction for the coupled recurrence
///   J_k(x', x) = max_{u'} E_w { max_u E_m { h_k + J_{k+1}(v_k, f_k) } },
/// over the forward-reachable set of augmented states from every candidate
/// initial position. The literal nesting is kept: under stochastic
/// disturbances the inner measurement choice may condition on the realized
/// disturbance, and the stored measurement argmax is the union over optimal
/// control/disturbance branches (for point-mass disturbances this is exactly
/// the per-state argmax).
template <CoupledProcessModel P>
ExtendedSolution<P> solve_extended(const P& proc, int horizon, const SolveOptions& options = {}) {
    using Aug = AugmentedStateOf<P>;
    using Hash = AugmentedHashOf<P>;
    if (horizon < 1) throw model_error("solve_extended: horizon must be at least 1");
    const auto positions = proc.initial_positions();
    if (positions.empty()) throw model_error("solve_extended: no initial positions");

    std::vector<std::vector<Aug>> reachable(static_cast<std::size_t>(horizon) + 1);
    std::vector<std::unordered_set<Aug, Hash>> seen(static_cast<std::size_t>(horizon) + 1);
    std::size_t total = 0;
    auto add_state = [&](int k, const Aug& s) {
        if (seen[static_cast<std::size_t>(k)].insert(s).second) {
            reachable[static_cast<std::size_t>(k)].push_back(s);
            if (++total > options.state_cap)
                throw resource_error("coupled reachable state count exceeds cap of " +
                                     std::to_string(options.state_cap));
        }
    };
    const auto x0 = proc.initial_measurement_state();
    for (const auto& p0 : positions) add_state(0, Aug{p0, x0});

    for (int k = 0; k < horizon; ++k) {
        for (const auto& s : reachable[static_cast<std::size_t>(k)]) {
            const auto measurements = proc.measurement_set(k, s.agent, s.meas);
            if (measurements.empty())
                throw model_error("empty measurement set at a reachable augmented state, stage " +
                                  std::to_string(k));
            std::vector<typename P::meas_state_type> successors;
            for (const auto& u : measurements) {
                const auto dist = proc.outcome_distribution(k, s.meas, u);
                for (const auto& o : dist.outcomes())
                    if (o.probability > 0.0)
                        successors.push_back(proc.transition(k, s.meas, u, o.label));
            }
            const auto controls = proc.control_set(k, s.agent);
            if (controls.empty())
                throw model_error("empty control set at a reachable agent position, stage " +
                                  std::to_string(k));
            for (const auto& uc : controls) {
                const auto wdist = proc.disturbance_distribution(k, s.agent, uc);
                for (const auto& w : wdist.outcomes()) {
                    if (w.probability <= 0.0) continue;
                    const auto next_agent = proc.dynamics(k, s.agent, uc, w.label);
                    for (const auto& xm : successors) add_state(k + 1, Aug{next_agent, xm});
                }
            }
        }
    }

    ExtendedSolution<P> solution{
        ValueFunction<Aug, Hash>(horizon),
        PolicyTable<Aug, typename P::measurement_type, Hash>(horizon),
        PolicyTable<Aug, typename P::agent_control_type, Hash>(horizon)};
    for (const auto& s : reachable[static_cast<std::size_t>(horizon)])
        solution.values.stage(horizon).emplace(s, proc.terminal_entropy(s.agent, s.meas));

    for (int k = horizon - 1; k >= 0; --k) {
        const auto& next = solution.values.stage(k + 1);
        for (const auto& s : reachable[static_cast<std::size_t>(k)]) {
            const auto controls = proc.control_set(k, s.agent);
            const auto measurements = proc.measurement_set(k, s.agent, s.meas);
            double best_control_value = 0.0;
            bool have_control = false;
            std::vector<std::size_t> control_argmax;
            // Measurement argmax across optimal branches, kept duplicate-free.
            std::vector<typename P::measurement_type> measurement_argmax;
            std::vector<std::vector<typename P::measurement_type>> per_control_meas(controls.size());

            for (std::size_t ci = 0; ci < controls.size(); ++ci) {
                const auto& uc = controls[ci];
                const auto wdist = proc.disturbance_distribution(k, s.agent, uc);
                double control_value = 0.0;
                for (const auto& w : wdist.outcomes()) {
                    if (w.probability <= 0.0) continue;
                    const auto next_agent = proc.dynamics(k, s.agent, uc, w.label);
                    double best_meas = 0.0;
                    bool have_meas = false;
                    std::vector<typename P::measurement_type> meas_argmax;
                    for (const auto& u : measurements) {
                        const auto dist = proc.outcome_distribution(k, s.meas, u);
                        double expected = 0.0;
                        for (const auto& o : dist.outcomes()) {
                            if (o.probability <= 0.0) continue;
                            const Aug succ{next_agent, proc.transition(k, s.meas, u, o.label)};
                            auto it = next.find(succ);
                            if (it == next.end())
                                throw model_error("augmented successor missing at stage " +
                                                  std::to_string(k));
                            expected += o.probability *
                                        (std::log2(1.0 / o.probability) + it->second.value);
                        }
                        if (!have_meas || expected > best_meas + kValueTolerance) {
                            best_meas = expected;
                            have_meas = true;
                            meas_argmax.assign(1, u);
                        } else if (expected >= best_meas - kValueTolerance) {
                            if (expected > best_meas) best_meas = expected;
                            meas_argmax.push_back(u);
                        }
                    }
                    control_value += w.probability * best_meas;
                    for (const auto& u : meas_argmax) {
                        auto& bucket = per_control_meas[ci];
                        bool present = false;
                        for (const auto& existing : bucket)
                            if (existing == u) { present = true; break; }
                        if (!present) bucket.push_back(u);
                    }
                }
                if (!have_control || control_value > best_control_value + kValueTolerance) {
                    best_control_value = control_value;
                    have_control = true;
                    control_argmax.assign(1, ci);
                } else if (control_value >= best_control_value - kValueTolerance) {
                    if (control_value > best_control_value) best_control_value = control_value;
                    control_argmax.push_back(ci);
                }
            }
            std::vector<typename P::agent_control_type> control_set;
            for (std::size_t ci : control_argmax) {
                control_set.push_back(controls[ci]);
                for (const auto& u : per_control_meas[ci]) {
                    bool present = false;
                    for (const auto& existing : measurement_argmax)
                        if (existing == u) { present = true; break; }
                    if (!present) measurement_argmax.push_back(u);
                }
            }
            solution.values.stage(k).emplace(s, Bits{best_control_value});
            solution.control_policy.stage(k).emplace(s, std::move(control_set));
            solution.measurement_policy.stage(k).emplace(s, std::move(measurement_argmax));
        }
    }
    return solution;
}

/// Maximum of J_0 over candidate initial positions, with the full argmax set.
template <CoupledProcessModel P>
std::pair<Bits, std::vector<typename P::agent_state_type>>
maximize_initial(const ExtendedSolution<P>& solution, const P& proc) {
    const auto positions = proc.initial_positions();
    if (positions.empty()) throw model_error("maximize_initial: no candidate positions");
    const auto x0 = proc.initial_measurement_state();
    double best = 0.0;
    bool have = false;
    std::vector<typename P::agent_state_type> argmax;
    for (const auto& p0 : positions) {
        const double v = solution.values.at(0, {p0, x0}).value;
        if (!have || v > best + kValueTolerance) {
            best = v;
            have = true;
            argmax.assign(1, p0);
        } else if (v >= best - kValueTolerance) {
            if (v > best) best = v;
            argmax.push_back(p0);
        }
    }
    return {Bits{best}, std::move(argmax)};
}

struct BruteForceOptions {
    std::size_t node_cap = 20'000'000;
};

namespace detail {
template <CoupledProcessModel P>
double brute_force_recurse(const P& proc, int k, int horizon,
                           const typename P::agent_state_type& xa,
                           const typename P::meas_state_type& xm,
                           std::size_t& nodes, const BruteForceOptions& options) {
    if (++nodes > options.node_cap)
        throw resource_error("policy enumeration exceeds node cap of " +
                             std::to_string(options.node_cap));
    if (k == horizon) return proc.terminal_entropy(xa, xm).value;
    const auto controls = proc.control_set(k, xa);
    if (controls.empty())
        throw model_error("brute force: empty control set at stage " + std::to_string(k));
    const auto measurements = proc.measurement_set(k, xa, xm);
    if (measurements.empty())
        throw model_error("brute force: empty measurement set at stage " + std::to_string(k));
    double best_control = 0.0;
    bool have_control = false;
    for (const auto& uc : controls) {
        const auto wdist = proc.disturbance_distribution(k, xa, uc);
        double control_value = 0.0;
        for (const auto& w : wdist.outcomes()) {
            if (w.probability <= 0.0) continue;
            const auto next_agent = proc.dynamics(k, xa, uc, w.label);
            double best_meas = 0.0;
            bool have_meas = false;
            for (const auto& u : measurements) {
                const auto dist = proc.outcome_distribution(k, xm, u);
                double expected = 0.0;
                for (const auto& o : dist.outcomes()) {
                    if (o.probability <= 0.0) continue;
                    expected += o.probability *
                                (std::log2(1.0 / o.probability) +
                                 brute_force_recurse(proc, k + 1, horizon, next_agent,
                                                     proc.transition(k, xm, u, o.label), nodes,
                                                     options));
                }
                if (!have_meas || expected > best_meas) {
                    best_meas = expected;
                    have_meas = true;
                }
            }
            control_value += w.probability * best_meas;
        }
        if (!have_control || control_value > best_control) {
            best_control = control_value;
            have_control = true;
        }
    }
    return best_control;
}
} // namespace detail

/// Independent oracle for the coupled objective: a depth-first walk of the
/// full realization tree, choosing controls and measurements at every node
/// with no state merging, memoization, or stage tables. Exponential in the
/// horizon; intended for tiny instances only.
template <CoupledProcessModel P>
Bits brute_force_value_at(const P& proc, const typename P::agent_state_type& start, int horizon,
                          const BruteForceOptions& options = {}) {
    std::size_t nodes = 0;
    return Bits{detail::brute_force_recurse(proc, 0, horizon, start,
                                            proc.initial_measurement_state(), nodes, options)};
}

template <CoupledProcessModel P>
Bits brute_force_value(const P& proc, int horizon, const BruteForceOptions& options = {}) {
    double best = 0.0;
    bool have = false;
    for (const auto& p0 : proc.initial_positions()) {
        const double v = brute_force_value_at(proc, p0, horizon, options).value;
        if (!have || v > best) {
            best = v;
            have = true;
        }
    }
    if (!have) throw model_error("brute_force_value: no initial positions");
    return Bits{best};
}

/// Wraps a plain measurement process as a coupled process with a single
/// motionless dummy agent, so the extended machinery and its oracle apply to
/// agent-free problems unchanged.
template <MeasurementProcessModel M>
class TrivialCoupling {
public:
    using agent_state_type = int;
    using agent_control_type = int;
    using disturbance_type = int;
    using meas_state_type = typename M::state_type;
    using measurement_type = typename M::measurement_type;
    using outcome_type = typename M::outcome_type;

    explicit TrivialCoupling(M process) : process_(std::move(process)) {}

    std::vector<int> initial_positions() const { return {0}; }
    meas_state_type initial_measurement_state() const { return process_.initial_state(); }
    std::vector<int> control_set(int, int) const { return {0}; }
    OutcomeDistribution<int> disturbance_distribution(int, int, int) const {
        return OutcomeDistribution<int>::point_mass(0);
    }
    int dynamics(int, int, int, int) const { return 0; }
    std::vector<measurement_type> measurement_set(int k, int, const meas_state_type& x) const {
        return process_.measurement_set(k, x);
    }
    OutcomeDistribution<outcome_type> outcome_distribution(int k, const meas_state_type& x,
                                                           const measurement_type& u) const {
        return process_.outcome_distribution(k, x, u);
    }
    meas_state_type transition(int k, const meas_state_type& x, const measurement_type& u,
                               const outcome_type& m) const {
        return process_.transition(k, x, u, m);
    }
    Bits terminal_entropy(int, const meas_state_type& x) const {
        return process_.terminal_entropy(x);
    }

private:
    M process_;
};

} // namespace infoplan
