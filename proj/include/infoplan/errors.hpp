#pragma once

#include <stdexcept>
#include <string>

namespace infoplan {

/// Invalid model input: malformed distribution, probability out of range,
/// empty measurement set, inadmissible decision.
class model_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configured resource bound was exceeded (reachable-state cap, step cap,
/// policy-tree node cap).
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure: collapsed variance, non-positive-definite Gram matrix.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An information target could not be reached within the allowed number of
/// stages. Carries the best value achieved, in bits.
class target_not_reached : public std::runtime_error {
public:
    target_not_reached(const std::string& what, double best_achieved_bits)
        : std::runtime_error(what), best_achieved_bits_(best_achieved_bits) {}

    double best_achieved_bits() const { return best_achieved_bits_; }

private:
    double best_achieved_bits_;
};

} // namespace infoplan
