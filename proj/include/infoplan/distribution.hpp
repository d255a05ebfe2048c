#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "infoplan/errors.hpp"

namespace infoplan {

/// Probabilities must sum to 1 within this tolerance; distributions inside
/// it are normalized on construction, anything further off is rejected.
inline constexpr double kProbabilitySumTolerance = 1e-9;

/// Finite distribution over labelled measurement outcomes.
///
/// Labels must be equality-comparable and distinct. Zero-probability
/// outcomes are allowed (they contribute nothing to the entropy) but model
/// code normally omits them so that transitions stay defined on the support.
template <typename Label>
class OutcomeDistribution {
public:
    struct Outcome {
        Label label;
        double probability;
    };

    explicit OutcomeDistribution(std::vector<Outcome> outcomes)
        : outcomes_(std::move(outcomes)) {
        if (outcomes_.empty())
            throw model_error("outcome distribution has no outcomes");
        double sum = 0.0;
        for (const auto& o : outcomes_) {
            if (!(o.probability >= 0.0))
                throw model_error("outcome probability is negative or NaN: " +
                                  std::to_string(o.probability));
            sum += o.probability;
        }
        if (std::abs(sum - 1.0) > kProbabilitySumTolerance)
            throw model_error("outcome probabilities sum to " + std::to_string(sum) +
                              ", expected 1");
        for (std::size_t i = 0; i < outcomes_.size(); ++i)
            for (std::size_t j = i + 1; j < outcomes_.size(); ++j)
                if (outcomes_[i].label == outcomes_[j].label)
                    throw model_error("duplicate outcome label in distribution");
        if (sum != 1.0)
            for (auto& o : outcomes_) o.probability /= sum;
    }

    static OutcomeDistribution point_mass(Label label) {
        return OutcomeDistribution({Outcome{std::move(label), 1.0}});
    }

    const std::vector<Outcome>& outcomes() const& { return outcomes_; }
    // Rvalue access materializes a copy so range-for over a temporary
    // distribution cannot dangle.
    std::vector<Outcome> outcomes() && { return std::move(outcomes_); }
    std::size_t size() const { return outcomes_.size(); }

    /// True when a single outcome carries all the mass.
    bool is_point_mass() const {
        for (const auto& o : outcomes_)
            if (o.probability == 1.0) return true;
        return false;
    }

private:
    std::vector<Outcome> outcomes_;
};

} // namespace infoplan
