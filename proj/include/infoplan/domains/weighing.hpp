#pragma once

#include <string>
#include <vector>

#include "infoplan/bits.hpp"
#include "infoplan/distribution.hpp"
#include "infoplan/errors.hpp"

namespace infoplan {

enum class WeighOutcome { left_heavier, right_heavier, balanced, resolved };

inline const char* to_string(WeighOutcome m) {
    switch (m) {
        case WeighOutcome::left_heavier: return "left-heavier";
        case WeighOutcome::right_heavier: return "right-heavier";
        case WeighOutcome::balanced: return "balanced";
        case WeighOutcome::resolved: return "resolved";
    }
    return "?";
}

/// Find-the-heavy-ball weighing problem. The state is the number of candidate
/// balls remaining; a measurement puts u balls on the pans (u even, split
/// equally). Outcome probabilities are u/2x for each heavier pan and
/// (x - u)/x for balanced, with successors u/2 and x - u.
///
/// A fully resolved state (x = 1) carries a single no-op measurement u = 0
/// so that it stays well-defined at any stage before the horizon.
class WeighingProcess {
public:
    using state_type = long;
    using measurement_type = long;
    using outcome_type = WeighOutcome;

    explicit WeighingProcess(long n) : n_(n) {
        if (n < 2) throw model_error("weighing: need at least 2 balls, got " + std::to_string(n));
    }

    long ball_count() const { return n_; }
    state_type initial_state() const { return n_; }

    std::vector<long> measurement_set(int, long x) const {
        if (x <= 1) return {0};
        std::vector<long> set;
        for (long u = 2; u <= (x % 2 == 0 ? x : x - 1); u += 2) set.push_back(u);
        return set;
    }

    OutcomeDistribution<WeighOutcome> outcome_distribution(int, long x, long u) const {
        using D = OutcomeDistribution<WeighOutcome>;
        if (x <= 1 || u == 0) return D::point_mass(WeighOutcome::resolved);
        check_admissible(x, u);
        const double px = static_cast<double>(x);
        std::vector<D::Outcome> outcomes{
            {WeighOutcome::left_heavier, static_cast<double>(u) / (2.0 * px)},
            {WeighOutcome::right_heavier, static_cast<double>(u) / (2.0 * px)},
        };
        if (x > u)
            outcomes.push_back({WeighOutcome::balanced, static_cast<double>(x - u) / px});
        return D(std::move(outcomes));
    }

    long transition(int, long x, long u, WeighOutcome m) const {
        switch (m) {
            case WeighOutcome::left_heavier:
            case WeighOutcome::right_heavier: return u / 2;
            case WeighOutcome::balanced: return x - u;
            case WeighOutcome::resolved: return 1;
        }
        throw model_error("weighing: unknown outcome");
    }

    Bits terminal_entropy(long) const { return Bits{0.0}; }

private:
    void check_admissible(long x, long u) const {
        if (u < 2 || u % 2 != 0 || u > x)
            throw model_error("weighing: measurement u=" + std::to_string(u) +
                              " inadmissible at x=" + std::to_string(x));
    }

    long n_;
};

inline WeighingProcess weighing_model(long n) { return WeighingProcess(n); }

} // namespace infoplan
