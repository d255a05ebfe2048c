#pragma once

#include <string>
#include <vector>

#include "infoplan/bits.hpp"
#include "infoplan/distribution.hpp"
#include "infoplan/errors.hpp"

namespace infoplan {

enum class GuessOutcome { yes, no, resolved };

inline const char* to_string(GuessOutcome m) {
    switch (m) {
        case GuessOutcome::yes: return "yes";
        case GuessOutcome::no: return "no";
        case GuessOutcome::resolved: return "resolved";
    }
    return "?";
}

/// Guess-my-number: an unknown integer is uniform over a range of size n; a
/// question asks whether it lies in a chosen proper subinterval of size u.
/// The state is the size of the surviving range.
class GuessProcess {
public:
    using state_type = long;
    using measurement_type = long;
    using outcome_type = GuessOutcome;

    explicit GuessProcess(long n) : n_(n) {
        if (n < 2) throw model_error("guess: need a range of at least 2, got " + std::to_string(n));
    }

    long range_size() const { return n_; }
    state_type initial_state() const { return n_; }

    std::vector<long> measurement_set(int, long x) const {
        if (x <= 1) return {0};
        std::vector<long> set;
        for (long u = 1; u < x; ++u) set.push_back(u);
        return set;
    }

    OutcomeDistribution<GuessOutcome> outcome_distribution(int, long x, long u) const {
        using D = OutcomeDistribution<GuessOutcome>;
        if (x <= 1 || u == 0) return D::point_mass(GuessOutcome::resolved);
        if (u < 1 || u >= x)
            throw model_error("guess: measurement u=" + std::to_string(u) +
                              " inadmissible at x=" + std::to_string(x));
        const double px = static_cast<double>(x);
        return D({{GuessOutcome::yes, static_cast<double>(u) / px},
                  {GuessOutcome::no, static_cast<double>(x - u) / px}});
    }

    long transition(int, long x, long u, GuessOutcome m) const {
        switch (m) {
            case GuessOutcome::yes: return u;
            case GuessOutcome::no: return x - u;
            case GuessOutcome::resolved: return 1;
        }
        throw model_error("guess: unknown outcome");
    }

    Bits terminal_entropy(long) const { return Bits{0.0}; }

private:
    long n_;
};

inline GuessProcess guess_model(long n) { return GuessProcess(n); }

} // namespace infoplan
