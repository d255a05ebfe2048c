#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "infoplan/domains/submarine.hpp"
#include "infoplan/errors.hpp"
#include "infoplan/rollout.hpp"

namespace infoplan {

/// Search trajectory along the guaranteed-find (never-found) branch. The
/// final stage resolves the last surviving locations, so its information
/// contribution is log2(survivors) and the cumulative total of a completed
/// search is log2(cell count) exactly.
struct SearchTrajectory {
    struct Step {
        int k;
        int ship;
        long survivors; // possible submarine locations before this sweep
        int move;       // control u' = destination - ship (0 after the last sweep)
        int coverage;   // newly searched cells u_k
        double stage_bits;
        double cumulative_bits;
    };

    std::vector<Step> steps;
    bool completed = false;

    int measurements() const { return static_cast<int>(steps.size()); }

    std::vector<int> coverage_sequence() const {
        std::vector<int> u;
        u.reserve(steps.size());
        for (const auto& s : steps) u.push_back(s.coverage);
        return u;
    }
};

namespace detail {

inline CellMask with_sweep(const Grid& grid, int ship, CellMask mask) {
    for (int cell : sonar_cells(grid, ship)) mask.set(cell);
    return mask;
}

inline bool search_done(const Grid& grid, const CellMask& mask) {
    return mask.count() >= grid.cells() - 1;
}

} // namespace detail

/// Greedy base policy for the search: after the sweep at `ship`, move to the
/// admissible destination with the largest next-stage coverage, which is the
/// maximizer of u_k + u_{k+1}. `searched` is the pre-sweep mask at the
/// current stage. Ties fall to the enumeration order of admissible_moves or
/// to the smallest control value, per `tie`.
inline int base_policy_submarine(const Grid& grid, int ship, const CellMask& searched,
                                 TieBreak tie = TieBreak::first_in_enumeration) {
    const CellMask after = detail::with_sweep(grid, ship, searched);
    auto moves = admissible_moves(grid, ship);
    if (moves.empty()) throw model_error("submarine base policy: no admissible moves");
    if (tie == TieBreak::lowest_control_id)
        std::sort(moves.begin(), moves.end(),
                  [ship](int a, int b) { return a - ship < b - ship; });
    int best_dest = moves.front();
    int best_coverage = -1;
    for (int dest : moves) {
        const int coverage = sonar_coverage(grid, dest, after).first;
        if (coverage > best_coverage) {
            best_coverage = coverage;
            best_dest = dest;
        }
    }
    return best_dest;
}

namespace detail {

/// Coverage accumulated by the greedy base policy from (ship, pre-sweep
/// mask) over at most `stages` further sweeps; stops early once the search
/// is complete.
inline int simulate_base_coverage(const Grid& grid, int ship, CellMask mask, int stages,
                                  TieBreak tie) {
    int total = 0;
    for (int i = 0; i < stages; ++i) {
        total += sonar_coverage(grid, ship, mask).first;
        mask = with_sweep(grid, ship, mask);
        if (search_done(grid, mask)) break;
        ship = base_policy_submarine(grid, ship, mask, tie);
    }
    return total;
}

inline void record_step(SearchTrajectory& trajectory, const Grid& grid, int k, int ship,
                        long survivors, int coverage, int move) {
    const long left = survivors - coverage;
    const double h = left >= 1 ? std::log2(static_cast<double>(survivors) / left)
                               : std::log2(static_cast<double>(survivors));
    const double prev = trajectory.steps.empty() ? 0.0 : trajectory.steps.back().cumulative_bits;
    trajectory.steps.push_back({k, ship, survivors, move, coverage, h, prev + h});
    (void)grid;
}

} // namespace detail

/// Greedy search: the base policy played directly. Runs until all cells but
/// one are searched or `step_cap` sweeps have been taken; a capped run comes
/// back with completed = false and the partial trajectory.
inline SearchTrajectory greedy_search(const Grid& grid, int start, int step_cap,
                                      TieBreak tie = TieBreak::first_in_enumeration) {
    SearchTrajectory trajectory;
    SearchState state{start, {}};
    for (int k = 0; k < step_cap; ++k) {
        const long survivors = grid.cells() - state.searched.count();
        const int coverage = sonar_coverage(grid, state.ship, state.searched).first;
        state.searched = detail::with_sweep(grid, state.ship, state.searched);
        if (detail::search_done(grid, state.searched)) {
            detail::record_step(trajectory, grid, k, state.ship, survivors, coverage, 0);
            trajectory.completed = true;
            return trajectory;
        }
        const int dest = base_policy_submarine(grid, state.ship, state.searched, tie);
        detail::record_step(trajectory, grid, k, state.ship, survivors, coverage,
                            dest - state.ship);
        state.ship = dest;
    }
    return trajectory;
}

/// Fixed-horizon rollout search: at every stage each admissible move is
/// scored by the coverage the base policy accumulates from it within the
/// remaining stages, and the best-scoring move is played.
inline SearchTrajectory rollout_search(const Grid& grid, int start, int horizon,
                                       TieBreak tie = TieBreak::first_in_enumeration) {
    SearchTrajectory trajectory;
    SearchState state{start, {}};
    for (int k = 0; k < horizon; ++k) {
        const long survivors = grid.cells() - state.searched.count();
        const int coverage = sonar_coverage(grid, state.ship, state.searched).first;
        state.searched = detail::with_sweep(grid, state.ship, state.searched);
        if (detail::search_done(grid, state.searched)) {
            detail::record_step(trajectory, grid, k, state.ship, survivors, coverage, 0);
            trajectory.completed = true;
            return trajectory;
        }
        if (k == horizon - 1) {
            detail::record_step(trajectory, grid, k, state.ship, survivors, coverage, 0);
            break;
        }
        auto moves = admissible_moves(grid, state.ship);
        if (tie == TieBreak::lowest_control_id)
            std::sort(moves.begin(), moves.end(),
                      [&state](int a, int b) { return a - state.ship < b - state.ship; });
        int best_dest = moves.front();
        int best_value = -1;
        for (int dest : moves) {
            const int value = detail::simulate_base_coverage(grid, dest, state.searched,
                                                             horizon - k - 1, tie);
            if (value > best_value) {
                best_value = value;
                best_dest = dest;
            }
        }
        detail::record_step(trajectory, grid, k, state.ship, survivors, coverage,
                            best_dest - state.ship);
        state.ship = best_dest;
    }
    return trajectory;
}

/// Guaranteed-find plan via rollout: the shortest horizon within `step_cap`
/// whose rollout run completes the search. When no horizon completes, the
/// step_cap run is returned as a non-termination report.
inline SearchTrajectory plan_guaranteed_search(const Grid& grid, int start, int step_cap,
                                               TieBreak tie = TieBreak::first_in_enumeration) {
    const int lower = std::max(1, (grid.cells() - 1 + 4) / 5);
    SearchTrajectory last;
    for (int n = lower; n <= step_cap; ++n) {
        last = rollout_search(grid, start, n, tie);
        if (last.completed) break;
    }
    return last;
}

} // namespace infoplan
