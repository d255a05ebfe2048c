#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "infoplan/agent_dp.hpp"
#include "infoplan/bits.hpp"
#include "infoplan/distribution.hpp"
#include "infoplan/errors.hpp"

namespace infoplan {

enum class TieBreak {
    first_in_enumeration, // first maximizer in the admissible enumeration order
    lowest_control_id,    // maximizer with the smallest control value
};

/// Configuration of the on-line rollout. The Monte Carlo stopping criterion
/// is a fixed sample count per control so that runs are reproducible from
/// the seed alone.
struct RolloutConfig {
    int samples_per_control = 1;
    std::uint64_t rng_seed = 0;
    int horizon = 1;
    TieBreak tie_break = TieBreak::first_in_enumeration;
    int step_cap = 1;

    void validate() const {
        if (samples_per_control < 1) throw model_error("rollout: samples_per_control must be >= 1");
        if (horizon < 1) throw model_error("rollout: horizon must be >= 1");
        if (step_cap < horizon) throw model_error("rollout: step_cap must be >= horizon");
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Counter-based generator: every (seed, stage, control, lane) tuple names an
/// independent deterministic stream, so concurrent evaluation order can never
/// change results.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stage, std::uint64_t control, std::uint64_t lane = 0) {
        state_ = seed;
        state_ = splitmix64(state_) ^ (stage * 0x9e3779b97f4a7c15ull);
        state_ = splitmix64(state_) ^ (control * 0xc2b2ae3d27d4eb4full);
        state_ = splitmix64(state_) ^ (lane * 0x165667b19e3779f9ull);
    }

    double uniform() { // [0, 1)
        return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

// Labels are returned by value: callers routinely sample from temporary
// distributions, and a reference into one would dangle.
template <typename Label>
Label pick(const OutcomeDistribution<Label>& dist, double r) {
    double acc = 0.0;
    const auto& outcomes = dist.outcomes();
    for (const auto& o : outcomes) {
        acc += o.probability;
        if (r < acc) return o.label;
    }
    return outcomes.back().label;
}

template <typename Label>
Label sample(const OutcomeDistribution<Label>& dist, Rng& rng) {
    return pick(dist, rng.uniform());
}

} // namespace detail

/// Per-stage record of a simulated run: states and decisions before the
/// stage, the realized outcome, and its information content.
template <CoupledProcessModel P>
struct RolloutTrajectory {
    struct Step {
        int k;
        typename P::agent_state_type agent;
        typename P::meas_state_type meas;
        typename P::agent_control_type control;
        typename P::measurement_type measurement;
        typename P::outcome_type outcome;
        double stage_bits;
        double cumulative_bits;
    };

    std::vector<Step> steps;
    bool completed = false; // stopping rule reached (true for plain fixed-horizon runs)
};

/// Base-policy pair from an optimistic one-step lookahead: the two-stage
/// information content is evaluated on single sampled realizations (common
/// random numbers across candidates) and maximized in closed form; the
/// stage-(k+1) maximizer is discarded.
template <CoupledProcessModel P>
std::pair<typename P::agent_control_type, typename P::measurement_type>
generate_base_policy(const P& proc, int k, int horizon,
                     const typename P::agent_state_type& xa,
                     const typename P::meas_state_type& xm, detail::Rng& rng) {
    const auto controls = proc.control_set(k, xa);
    const auto measurements = proc.measurement_set(k, xa, xm);
    if (controls.empty() || measurements.empty())
        throw model_error("base policy: empty admissible set at stage " + std::to_string(k));
    const double rw = rng.uniform();
    const double rm = rng.uniform();
    const double rm2 = rng.uniform();

    double best = 0.0;
    bool have = false;
    std::pair<typename P::agent_control_type, typename P::measurement_type> choice{controls[0],
                                                                                    measurements[0]};
    for (const auto& u : measurements) {
        const auto dist = proc.outcome_distribution(k, xm, u);
        const auto m = detail::pick(dist, rm);
        double h = 0.0;
        for (const auto& o : dist.outcomes())
            if (o.label == m && o.probability > 0.0) h = std::log2(1.0 / o.probability);
        const auto x_next = proc.transition(k, xm, u, m);
        for (const auto& uc : controls) {
            double value = h;
            if (k + 1 < horizon) {
                const auto w = detail::pick(proc.disturbance_distribution(k, xa, uc), rw);
                const auto y = proc.dynamics(k, xa, uc, w);
                double best_next = 0.0;
                bool have_next = false;
                for (const auto& u2 : proc.measurement_set(k + 1, y, x_next)) {
                    const auto dist2 = proc.outcome_distribution(k + 1, x_next, u2);
                    const auto m2 = detail::pick(dist2, rm2);
                    for (const auto& o : dist2.outcomes())
                        if (o.label == m2 && o.probability > 0.0) {
                            const double h2 = std::log2(1.0 / o.probability);
                            if (!have_next || h2 > best_next) {
                                best_next = h2;
                                have_next = true;
                            }
                        }
                }
                value += best_next;
            }
            if (!have || value > best) {
                best = value;
                have = true;
                choice = {uc, u};
            }
        }
    }
    return choice;
}

namespace detail {

/// Simulated base-policy continuation from (xa, xm) at stage `from` to the
/// horizon; returns accumulated realized information content.
template <CoupledProcessModel P>
double simulate_base_policy(const P& proc, int from, int horizon,
                            typename P::agent_state_type xa, typename P::meas_state_type xm,
                            Rng& rng) {
    double total = 0.0;
    for (int i = from; i < horizon; ++i) {
        auto [uc, um] = generate_base_policy(proc, i, horizon, xa, xm, rng);
        const auto w = sample(proc.disturbance_distribution(i, xa, uc), rng);
        const auto dist = proc.outcome_distribution(i, xm, um);
        const auto m = sample(dist, rng);
        for (const auto& o : dist.outcomes())
            if (o.label == m && o.probability > 0.0) total += std::log2(1.0 / o.probability);
        xa = proc.dynamics(i, xa, uc, w);
        xm = proc.transition(i, xm, um, m);
    }
    return total;
}

} // namespace detail

/// Q-value estimate for one (control, measurement) pair: the stage-k
/// expectation is taken exactly over the finite disturbance and outcome
/// distributions, and the continuation to the horizon is the average of
/// samples_per_control base-policy simulations.
template <CoupledProcessModel P>
Bits estimate_q(const P& proc, int k, const typename P::agent_state_type& xa,
                const typename P::meas_state_type& xm,
                const typename P::agent_control_type& uc,
                const typename P::measurement_type& um, const RolloutConfig& config,
                detail::Rng& rng) {
    config.validate(); // step_cap >= horizon bounds every continuation here
    const int remaining = config.horizon - (k + 1);
    double q = 0.0;
    const auto wdist = proc.disturbance_distribution(k, xa, uc);
    const auto mdist = proc.outcome_distribution(k, xm, um);
    for (const auto& w : wdist.outcomes()) {
        if (w.probability <= 0.0) continue;
        const auto y = proc.dynamics(k, xa, uc, w.label);
        for (const auto& o : mdist.outcomes()) {
            if (o.probability <= 0.0) continue;
            double branch = std::log2(1.0 / o.probability);
            if (remaining > 0) {
                const auto x_next = proc.transition(k, xm, um, o.label);
                double continuation = 0.0;
                for (int s = 0; s < config.samples_per_control; ++s)
                    continuation +=
                        detail::simulate_base_policy(proc, k + 1, config.horizon, y, x_next, rng);
                branch += continuation / config.samples_per_control;
            }
            q += w.probability * o.probability * branch;
        }
    }
    return Bits{q};
}

namespace detail {

template <typename T>
bool control_id_less(const T& a, const T& b) {
    if constexpr (std::totally_ordered<T>) {
        return a < b;
    } else {
        (void)a;
        (void)b;
        return false; // unordered control types fall back to enumeration order
    }
}

} // namespace detail

/// One-step-lookahead rollout (the stochastic rollout algorithm): at every
/// stage the (control, measurement) pair with the best Q estimate is played
/// on the realized dynamics. `stop` is an optional predicate on the
/// measurement state checked after each stage; a run that exhausts the
/// horizon without satisfying it is returned with completed = false rather
/// than raising.
template <CoupledProcessModel P>
RolloutTrajectory<P> run_rollout(
    const P& proc, const typename P::agent_state_type& start, const RolloutConfig& config,
    const std::function<bool(const typename P::meas_state_type&)>& stop = nullptr) {
    config.validate();
    RolloutTrajectory<P> trajectory;
    auto xa = start;
    auto xm = proc.initial_measurement_state();
    double cumulative = 0.0;
    for (int k = 0; k < config.horizon; ++k) {
        const auto controls = proc.control_set(k, xa);
        const auto measurements = proc.measurement_set(k, xa, xm);
        if (controls.empty() || measurements.empty())
            throw model_error("rollout: empty admissible set at stage " + std::to_string(k));

        double best = 0.0;
        bool have = false;
        std::pair<typename P::agent_control_type, typename P::measurement_type> chosen{
            controls[0], measurements[0]};
        std::uint64_t index = 0;
        for (const auto& uc : controls) {
            for (const auto& um : measurements) {
                detail::Rng rng(config.rng_seed, static_cast<std::uint64_t>(k), index++);
                const double q = estimate_q(proc, k, xa, xm, uc, um, config, rng).value;
                const bool better =
                    !have || q > best + kValueTolerance ||
                    (config.tie_break == TieBreak::lowest_control_id && q >= best - kValueTolerance &&
                     detail::control_id_less(uc, chosen.first));
                if (better) {
                    if (!have || q > best) best = q;
                    have = true;
                    chosen = {uc, um};
                }
            }
        }

        detail::Rng realize(config.rng_seed, static_cast<std::uint64_t>(k), 0xfffffffful, 1);
        const auto w = detail::sample(proc.disturbance_distribution(k, xa, chosen.first), realize);
        const auto dist = proc.outcome_distribution(k, xm, chosen.second);
        const auto m = detail::sample(dist, realize);
        double h = 0.0;
        for (const auto& o : dist.outcomes())
            if (o.label == m && o.probability > 0.0) h = std::log2(1.0 / o.probability);
        cumulative += h;
        trajectory.steps.push_back({k, xa, xm, chosen.first, chosen.second, m, h, cumulative});
        xa = proc.dynamics(k, xa, chosen.first, w);
        xm = proc.transition(k, xm, chosen.second, m);
        if (stop && stop(xm)) {
            trajectory.completed = true;
            return trajectory;
        }
    }
    trajectory.completed = !stop;
    return trajectory;
}

/// The base policy played directly, with no rollout layer on top.
template <CoupledProcessModel P>
RolloutTrajectory<P> run_base_policy(
    const P& proc, const typename P::agent_state_type& start, const RolloutConfig& config,
    const std::function<bool(const typename P::meas_state_type&)>& stop = nullptr) {
    config.validate();
    RolloutTrajectory<P> trajectory;
    auto xa = start;
    auto xm = proc.initial_measurement_state();
    double cumulative = 0.0;
    for (int k = 0; k < config.horizon; ++k) {
        detail::Rng rng(config.rng_seed, static_cast<std::uint64_t>(k), 0, 2);
        auto [uc, um] = generate_base_policy(proc, k, config.horizon, xa, xm, rng);
        const auto w = detail::sample(proc.disturbance_distribution(k, xa, uc), rng);
        const auto dist = proc.outcome_distribution(k, xm, um);
        const auto m = detail::sample(dist, rng);
        double h = 0.0;
        for (const auto& o : dist.outcomes())
            if (o.label == m && o.probability > 0.0) h = std::log2(1.0 / o.probability);
        cumulative += h;
        trajectory.steps.push_back({k, xa, xm, uc, um, m, h, cumulative});
        xa = proc.dynamics(k, xa, uc, w);
        xm = proc.transition(k, xm, um, m);
        if (stop && stop(xm)) {
            trajectory.completed = true;
            return trajectory;
        }
    }
    trajectory.completed = !stop;
    return trajectory;
}

} // namespace infoplan
