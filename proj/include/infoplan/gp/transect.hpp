#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "infoplan/distribution.hpp"
#include "infoplan/errors.hpp"
#include "infoplan/gp/kernel.hpp"
#include "infoplan/gp/posterior.hpp"
#include "infoplan/rollout.hpp"

namespace infoplan {

enum class TransectMode {
    deterministic, // exact agent dynamics
    stochastic,    // moves subject to a slip distribution over destinations
    multi_field,   // several fields, per-stage sensor selection (deterministic dynamics)
};

enum class PlanLookahead {
    rollout,    // base-policy simulation of continuations
    exhaustive, // exact maximization over all continuations (tiny instances)
};

/// Robot transect sampling task over a finite waypoint lattice. Measurements
/// are taken at the waypoint reached by each move; `moves` lists reachable
/// waypoint indices per waypoint in enumeration order.
struct TransectProblem {
    std::vector<Vec2> waypoints;
    std::vector<std::vector<int>> moves;
    TransectMode mode = TransectMode::deterministic;

    /// One kernel per sensed field; a single entry outside multi_field mode.
    std::vector<SquaredExponentialKernel> fields;
    /// Admissible sensor selections per stage (subsets of field indices).
    /// The constraint set is problem input; defaults to "all fields".
    std::vector<std::vector<int>> sensor_choices;

    /// Stochastic mode: distribution of the realized destination for an
    /// intended move.
    std::function<OutcomeDistribution<int>(int k, int from, int intended)> slip;

    /// Optional conditioning radius: past locations farther than this from a
    /// query are dropped when predicting. Off by default (exact conditioning).
    std::optional<double> history_window;

    /// Locations already sampled before planning starts; they condition every
    /// field but are not part of the planned path.
    std::vector<Vec2> initial_history;

    void validate() const {
        if (waypoints.empty()) throw model_error("transect: no waypoints");
        if (moves.size() != waypoints.size())
            throw model_error("transect: moves must be given per waypoint");
        for (const auto& m : moves)
            for (int dest : m)
                if (dest < 0 || dest >= static_cast<int>(waypoints.size()))
                    throw model_error("transect: move destination off the lattice");
        if (fields.empty()) throw model_error("transect: no field kernels");
        if (mode != TransectMode::multi_field && fields.size() != 1)
            throw model_error("transect: multiple fields require multi_field mode");
        if (mode == TransectMode::stochastic && !slip)
            throw model_error("transect: stochastic mode needs a slip distribution");
        for (const auto& choice : sensor_choices) {
            if (choice.empty()) throw model_error("transect: empty sensor selection");
            for (int f : choice)
                if (f < 0 || f >= static_cast<int>(fields.size()))
                    throw model_error("transect: sensor selection names an unknown field");
        }
    }

    std::vector<std::vector<int>> effective_choices() const {
        if (!sensor_choices.empty()) return sensor_choices;
        std::vector<int> all;
        for (int f = 0; f < static_cast<int>(fields.size()); ++f) all.push_back(f);
        return {all};
    }
};

/// Planned sampling run: one waypoint, sensor selection, and differential
/// entropy per stage, plus the chain-rule cross-check total.
struct TransectPlan {
    std::vector<int> path; // waypoint index sampled at each stage
    std::vector<Vec2> locations;
    std::vector<std::vector<int>> sensors;
    std::vector<double> stage_bits;
    double total_bits = 0.0;
    double joint_bits = 0.0; // sum over fields of the joint entropy of its samples
};

namespace detail {

inline constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

/// Stage entropy of measuring field `post` at `q`, honoring the optional
/// conditioning window; degenerate (zero-variance) measurements come back as
/// -infinity so candidate maximization skips them.
inline double transect_stage_bits(const GpPosterior& post, Vec2 q,
                                  const std::optional<double>& window) {
    if (!window) {
        const double variance = post.predictive_variance(q);
        return variance > 0.0 ? gaussian_entropy(variance).value : kMinusInf;
    }
    GpPosterior filtered(post.kernel());
    const double r2 = *window * *window;
    for (const Vec2& loc : post.locations())
        if (squared_distance(loc, q) <= r2) filtered = filtered.appended(loc);
    const double variance = filtered.predictive_variance(q);
    return variance > 0.0 ? gaussian_entropy(variance).value : kMinusInf;
}

inline double transect_stage_value(const TransectProblem& problem,
                                   const std::vector<GpPosterior>& posts, Vec2 q,
                                   const std::vector<int>& choice) {
    double v = 0.0;
    for (int f : choice) {
        const double h = transect_stage_bits(posts[static_cast<std::size_t>(f)], q,
                                             problem.history_window);
        if (h == kMinusInf) return kMinusInf;
        v += h;
    }
    return v;
}

inline std::vector<GpPosterior> transect_append(const TransectProblem& problem,
                                                std::vector<GpPosterior> posts, Vec2 q,
                                                const std::vector<int>& choice) {
    (void)problem;
    for (int f : choice)
        posts[static_cast<std::size_t>(f)] = posts[static_cast<std::size_t>(f)].appended(q);
    return posts;
}

inline OutcomeDistribution<int> transect_slip(const TransectProblem& problem, int k, int from,
                                              int intended) {
    if (problem.mode == TransectMode::stochastic) return problem.slip(k, from, intended);
    return OutcomeDistribution<int>::point_mass(intended);
}

/// Greedy base policy: the (move, selection) pair maximizing the expected
/// next-stage entropy.
inline std::pair<int, std::vector<int>> transect_base_choice(
    const TransectProblem& problem, const std::vector<GpPosterior>& posts, int k, int pos,
    const std::vector<std::vector<int>>& choices) {
    const auto& candidates = problem.moves[static_cast<std::size_t>(pos)];
    if (candidates.empty()) throw model_error("transect: no admissible moves");
    double best = kMinusInf;
    std::pair<int, std::vector<int>> pick{candidates.front(), choices.front()};
    bool have = false;
    for (int intended : candidates) {
        const auto dist = transect_slip(problem, k, pos, intended);
        for (const auto& choice : choices) {
            double value = 0.0;
            for (const auto& o : dist.outcomes()) {
                if (o.probability <= 0.0) continue;
                const Vec2 q = problem.waypoints[static_cast<std::size_t>(o.label)];
                const double sv = transect_stage_value(problem, posts, q, choice);
                if (sv == kMinusInf) {
                    value = kMinusInf;
                    break;
                }
                value += o.probability * sv;
            }
            if (!have || value > best) {
                best = value;
                have = true;
                pick = {intended, choice};
            }
        }
    }
    return pick;
}

/// Base-policy continuation value over `stages` further measurements,
/// sampling slips from `rng` in stochastic mode.
inline double transect_simulate_base(const TransectProblem& problem,
                                     std::vector<GpPosterior> posts, int k, int pos, int stages,
                                     const std::vector<std::vector<int>>& choices, Rng& rng) {
    double total = 0.0;
    for (int i = 0; i < stages; ++i) {
        auto [intended, choice] = transect_base_choice(problem, posts, k + i, pos, choices);
        const auto dist = transect_slip(problem, k + i, pos, intended);
        const int dest = sample(dist, rng);
        const Vec2 q = problem.waypoints[static_cast<std::size_t>(dest)];
        const double sv = transect_stage_value(problem, posts, q, choice);
        if (sv == kMinusInf) break; // degenerate branch contributes nothing further
        total += sv;
        posts = transect_append(problem, std::move(posts), q, choice);
        pos = dest;
    }
    return total;
}

/// Exact value of the remaining stages by full enumeration.
inline double transect_exhaustive_value(const TransectProblem& problem,
                                        const std::vector<GpPosterior>& posts, int k, int pos,
                                        int stages,
                                        const std::vector<std::vector<int>>& choices) {
    if (stages == 0) return 0.0;
    double best = kMinusInf;
    for (int intended : problem.moves[static_cast<std::size_t>(pos)]) {
        const auto dist = transect_slip(problem, k, pos, intended);
        for (const auto& choice : choices) {
            double value = 0.0;
            for (const auto& o : dist.outcomes()) {
                if (o.probability <= 0.0) continue;
                const Vec2 q = problem.waypoints[static_cast<std::size_t>(o.label)];
                const double sv = transect_stage_value(problem, posts, q, choice);
                if (sv == kMinusInf) {
                    value = kMinusInf;
                    break;
                }
                auto next = transect_append(problem, posts, q, choice);
                value += o.probability *
                         (sv + transect_exhaustive_value(problem, next, k + 1, o.label,
                                                         stages - 1, choices));
            }
            if (value > best) best = value;
        }
    }
    return best;
}

} // namespace detail

/// Plans a transect of config.horizon measurements from `start` (a waypoint
/// index; the start itself is not measured). Each stage scores every
/// (move, sensor selection) candidate by its expected stage entropy plus a
/// continuation estimate, plays the best, and records the realized entropy.
/// Deterministic given the seed.
inline TransectPlan plan_transect(const TransectProblem& problem, int start,
                                  const RolloutConfig& config,
                                  PlanLookahead lookahead = PlanLookahead::rollout) {
    problem.validate();
    config.validate();
    if (start < 0 || start >= static_cast<int>(problem.waypoints.size()))
        throw model_error("transect: start waypoint off the lattice");
    const auto choices = problem.effective_choices();

    TransectPlan plan;
    std::vector<GpPosterior> posts;
    for (const auto& kernel : problem.fields) {
        GpPosterior post(kernel);
        for (const Vec2& seen : problem.initial_history) post = post.appended(seen);
        posts.push_back(std::move(post));
    }
    int pos = start;
    for (int k = 0; k < config.horizon; ++k) {
        const auto& candidates = problem.moves[static_cast<std::size_t>(pos)];
        if (candidates.empty()) throw model_error("transect: no admissible moves");
        double best = detail::kMinusInf;
        bool have = false;
        std::pair<int, std::vector<int>> chosen{candidates.front(), choices.front()};
        std::uint64_t index = 0;
        for (int intended : candidates) {
            const auto dist = detail::transect_slip(problem, k, pos, intended);
            for (const auto& choice : choices) {
                detail::Rng rng(config.rng_seed, static_cast<std::uint64_t>(k), index++, 3);
                double value = 0.0;
                for (const auto& o : dist.outcomes()) {
                    if (o.probability <= 0.0) continue;
                    const Vec2 q = problem.waypoints[static_cast<std::size_t>(o.label)];
                    const double sv = detail::transect_stage_value(problem, posts, q, choice);
                    if (sv == detail::kMinusInf) {
                        value = detail::kMinusInf;
                        break;
                    }
                    double continuation = 0.0;
                    const int left = config.horizon - k - 1;
                    if (left > 0) {
                        auto next = detail::transect_append(problem, posts, q, choice);
                        if (lookahead == PlanLookahead::exhaustive) {
                            continuation = detail::transect_exhaustive_value(
                                problem, next, k + 1, o.label, left, choices);
                        } else {
                            for (int s = 0; s < config.samples_per_control; ++s)
                                continuation += detail::transect_simulate_base(
                                    problem, next, k + 1, o.label, left, choices, rng);
                            continuation /= config.samples_per_control;
                        }
                    }
                    value += o.probability * (sv + continuation);
                }
                const bool better =
                    !have || value > best + kValueTolerance ||
                    (config.tie_break == TieBreak::lowest_control_id &&
                     value >= best - kValueTolerance && intended < chosen.first);
                if (better) {
                    if (!have || value > best) best = value;
                    have = true;
                    chosen = {intended, choice};
                }
            }
        }
        if (best == detail::kMinusInf)
            throw numerical_error("transect: every candidate measurement is degenerate at stage " +
                                  std::to_string(k));

        detail::Rng realize(config.rng_seed, static_cast<std::uint64_t>(k), 0xfffffffful, 4);
        const auto dist = detail::transect_slip(problem, k, pos, chosen.first);
        const int dest = detail::sample(dist, realize);
        const Vec2 q = problem.waypoints[static_cast<std::size_t>(dest)];
        const double sv = detail::transect_stage_value(problem, posts, q, chosen.second);
        if (sv == detail::kMinusInf)
            throw numerical_error("transect: realized measurement is degenerate at stage " +
                                  std::to_string(k));
        plan.path.push_back(dest);
        plan.locations.push_back(q);
        plan.sensors.push_back(chosen.second);
        plan.stage_bits.push_back(sv);
        plan.total_bits += sv;
        posts = detail::transect_append(problem, std::move(posts), q, chosen.second);
        pos = dest;
    }

    // Chain-rule cross-check: per-field joint entropy of that field's
    // samples, conditioned on the initial history via the difference of
    // joints. With a conditioning window the identity is approximate, so the
    // sequential sum itself is reported.
    for (std::size_t f = 0; f < problem.fields.size(); ++f) {
        std::vector<Vec2> sampled = problem.initial_history;
        for (std::size_t k = 0; k < plan.path.size(); ++k)
            for (int chosen_field : plan.sensors[k])
                if (chosen_field == static_cast<int>(f)) sampled.push_back(plan.locations[k]);
        if (sampled.size() > problem.initial_history.size() && !problem.history_window) {
            plan.joint_bits += joint_path_entropy(problem.fields[f], sampled).value;
            if (!problem.initial_history.empty())
                plan.joint_bits -=
                    joint_path_entropy(problem.fields[f], problem.initial_history).value;
        }
    }
    if (problem.history_window) plan.joint_bits = plan.total_bits;
    return plan;
}

/// Convenience constructor for a single-field transect problem.
inline TransectProblem make_transect(std::vector<Vec2> waypoints,
                                     std::vector<std::vector<int>> moves,
                                     SquaredExponentialKernel kernel,
                                     TransectMode mode = TransectMode::deterministic) {
    TransectProblem problem;
    problem.waypoints = std::move(waypoints);
    problem.moves = std::move(moves);
    problem.fields.push_back(std::move(kernel));
    problem.mode = mode;
    return problem;
}

/// 1-D lattice of `count` unit-spaced waypoints with nearest-neighbour moves.
inline TransectProblem line_transect(int count, SquaredExponentialKernel kernel,
                                     double spacing = 1.0) {
    if (count < 2) throw model_error("transect: line needs at least 2 waypoints");
    std::vector<Vec2> waypoints;
    std::vector<std::vector<int>> moves(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        waypoints.push_back({spacing * i, 0.0});
        if (i > 0) moves[static_cast<std::size_t>(i)].push_back(i - 1);
        if (i + 1 < count) moves[static_cast<std::size_t>(i)].push_back(i + 1);
    }
    return make_transect(std::move(waypoints), std::move(moves), std::move(kernel));
}

/// Rectangular lattice with 8-neighbour moves, unit spacing.
inline TransectProblem grid_transect(int width, int height, SquaredExponentialKernel kernel,
                                     double spacing = 1.0) {
    if (width < 1 || height < 1 || width * height < 2)
        throw model_error("transect: grid needs at least 2 waypoints");
    std::vector<Vec2> waypoints;
    std::vector<std::vector<int>> moves(static_cast<std::size_t>(width * height));
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) waypoints.push_back({spacing * c, spacing * r});
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const int rr = r + dr, cc = c + dc;
                    if (rr < 0 || rr >= height || cc < 0 || cc >= width) continue;
                    moves[static_cast<std::size_t>(r * width + c)].push_back(rr * width + cc);
                }
    return make_transect(std::move(waypoints), std::move(moves), std::move(kernel));
}

} // namespace infoplan
