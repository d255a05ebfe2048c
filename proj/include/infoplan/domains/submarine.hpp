#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "infoplan/bits.hpp"
#include "infoplan/distribution.hpp"
#include "infoplan/errors.hpp"

namespace infoplan {

/// Fixed-capacity bitset over grid cells (1-based cell ids).
class CellMask {
public:
    static constexpr int kCapacity = 256;

    bool test(int cell) const {
        return (words_[static_cast<std::size_t>((cell - 1) >> 6)] >>
                ((cell - 1) & 63)) & 1u;
    }
    void set(int cell) {
        words_[static_cast<std::size_t>((cell - 1) >> 6)] |= std::uint64_t{1} << ((cell - 1) & 63);
    }
    int count() const {
        int c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }
    friend bool operator==(const CellMask&, const CellMask&) = default;

    std::size_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (auto w : words_) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdull;
        }
        return static_cast<std::size_t>(h);
    }

private:
    std::array<std::uint64_t, 4> words_{};
};

/// Rectangular search grid with cells numbered 1..width*height in row-major
/// order, matching the coordinate convention of the search domain.
class Grid {
public:
    Grid(int width, int height) : width_(width), height_(height) {
        if (width < 2 || height < 2)
            throw model_error("grid: dimensions must be at least 2x2");
        if (width * height > CellMask::kCapacity)
            throw resource_error("grid: at most " + std::to_string(CellMask::kCapacity) +
                                 " cells supported");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int cells() const { return width_ * height_; }

    int row(int cell) const { return (cell - 1) / width_; } // 0-based
    int col(int cell) const { return (cell - 1) % width_; }
    bool contains(int r, int c) const { return r >= 0 && r < height_ && c >= 0 && c < width_; }
    int cell_at(int r, int c) const { return r * width_ + c + 1; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int width_;
    int height_;
};

/// Plus-shaped sonar footprint: the ship's own cell and its four edge
/// neighbours, clipped at the grid boundary.
inline std::vector<int> sonar_cells(const Grid& grid, int ship) {
    const int r = grid.row(ship), c = grid.col(ship);
    std::vector<int> cells{ship};
    if (grid.contains(r - 1, c)) cells.push_back(grid.cell_at(r - 1, c));
    if (grid.contains(r + 1, c)) cells.push_back(grid.cell_at(r + 1, c));
    if (grid.contains(r, c - 1)) cells.push_back(grid.cell_at(r, c - 1));
    if (grid.contains(r, c + 1)) cells.push_back(grid.cell_at(r, c + 1));
    return cells;
}

/// Cells newly covered by a sweep from `ship` given what has already been
/// searched, and their count u_k.
inline std::pair<int, std::vector<int>> sonar_coverage(const Grid& grid, int ship,
                                                       const CellMask& searched) {
    std::vector<int> fresh;
    for (int cell : sonar_cells(grid, ship))
        if (!searched.test(cell)) fresh.push_back(cell);
    return {static_cast<int>(fresh.size()), std::move(fresh)};
}

/// Ship moves: two squares along a Cartesian direction or one square along a
/// diagonal. Returns destination cells, in the fixed enumeration order
/// (up-left, right, down, down-left, left, up, up-right, down-right) that
/// tie-breaking refers to.
inline std::vector<int> admissible_moves(const Grid& grid, int ship) {
    const int r = grid.row(ship), c = grid.col(ship);
    static constexpr std::array<std::pair<int, int>, 8> kSteps{{
        {-1, -1}, {0, 2}, {2, 0}, {1, -1}, {0, -2}, {-2, 0}, {-1, 1}, {1, 1},
    }};
    std::vector<int> destinations;
    for (auto [dr, dc] : kSteps)
        if (grid.contains(r + dr, c + dc))
            destinations.push_back(grid.cell_at(r + dr, c + dc));
    return destinations;
}

/// Ship position plus the exact set of already-searched cells. The searched
/// set, not its size, is the Markov state of the search.
struct SearchState {
    int ship = 0;
    CellMask searched;
};

/// Measurement-side state of the coupled search problem: the searched mask,
/// or "resolved" once a sweep has located the submarine.
struct SubmarineMeasState {
    CellMask searched;
    bool resolved = false;

    friend bool operator==(const SubmarineMeasState&, const SubmarineMeasState&) = default;
};

struct SubmarineMeasStateHash {
    std::size_t operator()(const SubmarineMeasState& s) const {
        return s.searched.hash() ^ (s.resolved ? 0x517cc1b727220a95ull : 0);
    }
};

/// Sonar outcome labels: kNotFound, kNoOp for the resolved no-op stage, and
/// any positive value for "found at that cell".
inline constexpr int kNotFound = 0;
inline constexpr int kNoOp = -1;

/// "Find the submarine" as a coupled agent/measurement process.
///
/// The agent is the ship; its control is the destination cell of a move. The
/// single measurement per stage is the sonar sweep at the ship's cell; its
/// outcomes are "not found" with probability (x - u)/x or "found at cell c"
/// with probability 1/x for each newly swept cell, where x counts surviving
/// submarine locations. Each found branch carries log2(x) bits at once,
/// which is the binary yes-surprisal log2(x/u) plus the log2(u) gained by
/// pinpointing the cell.
class SubmarineProcess {
public:
    using agent_state_type = int;
    using agent_control_type = int; // destination cell
    using disturbance_type = int;   // deterministic dynamics: single token
    using meas_state_type = SubmarineMeasState;
    using meas_state_hash = SubmarineMeasStateHash;
    using measurement_type = int; // the ship cell performing the sweep (0 = no-op)
    using outcome_type = int;

    explicit SubmarineProcess(Grid grid) : grid_(grid) {
        for (int cell = 1; cell <= grid_.cells(); ++cell) initial_positions_.push_back(cell);
    }
    SubmarineProcess(Grid grid, std::vector<int> initial_positions)
        : grid_(grid), initial_positions_(std::move(initial_positions)) {
        if (initial_positions_.empty())
            throw model_error("submarine: initial position set is empty");
    }

    const Grid& grid() const { return grid_; }
    const std::vector<int>& initial_positions() const { return initial_positions_; }
    meas_state_type initial_measurement_state() const { return {}; }

    std::vector<int> control_set(int, int ship) const { return admissible_moves(grid_, ship); }

    OutcomeDistribution<int> disturbance_distribution(int, int, int) const {
        return OutcomeDistribution<int>::point_mass(0);
    }

    int dynamics(int, int, int destination, int) const { return destination; }

    std::vector<int> measurement_set(int, int ship, const meas_state_type& x) const {
        return {x.resolved ? 0 : ship};
    }

    long survivors(const meas_state_type& x) const {
        return x.resolved ? 1 : grid_.cells() - x.searched.count();
    }

    OutcomeDistribution<int> outcome_distribution(int, const meas_state_type& x, int sweep_at) const {
        using D = OutcomeDistribution<int>;
        if (x.resolved || sweep_at == 0) return D::point_mass(kNoOp);
        const long alive = survivors(x);
        auto [u, fresh] = sonar_coverage(grid_, sweep_at, x.searched);
        std::vector<D::Outcome> outcomes;
        const double px = static_cast<double>(alive);
        for (int cell : fresh) outcomes.push_back({cell, 1.0 / px});
        if (alive > u)
            outcomes.push_back({kNotFound, static_cast<double>(alive - u) / px});
        return D(std::move(outcomes));
    }

    meas_state_type transition(int, const meas_state_type& x, int sweep_at, int outcome) const {
        if (x.resolved || sweep_at == 0 || outcome == kNoOp) return x;
        if (outcome > 0) return resolved_state();
        meas_state_type next = x;
        for (int cell : sonar_cells(grid_, sweep_at)) next.searched.set(cell);
        return next;
    }

    Bits terminal_entropy(int, const meas_state_type&) const { return Bits{0.0}; }

    meas_state_type resolved_state() const {
        meas_state_type s;
        for (int cell = 1; cell <= grid_.cells(); ++cell) s.searched.set(cell);
        s.resolved = true;
        return s;
    }

private:
    Grid grid_;
    std::vector<int> initial_positions_;
};

inline SubmarineProcess submarine_process(const Grid& grid) { return SubmarineProcess(grid); }

} // namespace infoplan
