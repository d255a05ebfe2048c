#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "infoplan/bits.hpp"
#include "infoplan/distribution.hpp"
#include "infoplan/errors.hpp"

namespace infoplan {

/// Shannon information content (surprisal) of an outcome of probability p,
/// log2(1/p). Requires 0 < p <= 1; a zero or out-of-range probability is an
/// invalid model, never a silent infinity.
inline Bits information_content(double p) {
    if (!(p > 0.0 && p <= 1.0))
        throw model_error("information_content: probability " + std::to_string(p) +
                          " outside (0, 1]");
    return Bits{std::log2(1.0 / p)};
}

/// Shannon entropy of a finite distribution, with the 0*log(1/0) = 0
/// convention for zero-probability outcomes.
template <typename Label>
Bits entropy(const OutcomeDistribution<Label>& d) {
    double h = 0.0;
    for (const auto& o : d.outcomes())
        if (o.probability > 0.0)
            h += o.probability * std::log2(1.0 / o.probability);
    return Bits{h};
}

/// Differential entropy of a Gaussian with the given variance,
/// (1/2) log2(2 pi e variance). Negative below variance = 1/(2 pi e).
inline Bits gaussian_entropy(double variance) {
    if (!(variance > 0.0))
        throw model_error("gaussian_entropy: variance " + std::to_string(variance) +
                          " is not positive");
    return Bits{0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e * variance)};
}

} // namespace infoplan
