#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "infoplan/errors.hpp"

namespace infoplan {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double squared_distance(Vec2 a, Vec2 b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Squared-exponential covariance with additive observation noise. The Gram
/// matrix over a set of locations is C_ij = C(x_i, x_j) + noise * delta_ij;
/// it is strictly positive definite whenever the noise variance is positive.
class SquaredExponentialKernel {
public:
    SquaredExponentialKernel(double signal_variance, double length_scale,
                             double noise_variance = 0.0)
        : signal_variance_(signal_variance),
          length_scale_(length_scale),
          noise_variance_(noise_variance) {
        if (!(signal_variance > 0.0))
            throw model_error("kernel: signal variance must be positive");
        if (!(length_scale > 0.0)) throw model_error("kernel: length scale must be positive");
        if (!(noise_variance >= 0.0))
            throw model_error("kernel: noise variance must be nonnegative");
    }

    double operator()(Vec2 a, Vec2 b) const {
        return signal_variance_ *
               std::exp(-squared_distance(a, b) / (2.0 * length_scale_ * length_scale_));
    }

    double signal_variance() const { return signal_variance_; }
    double length_scale() const { return length_scale_; }
    double noise_variance() const { return noise_variance_; }

    /// Dense row-major Gram matrix over `locations`, noise on the diagonal.
    std::vector<double> gram(std::span<const Vec2> locations) const {
        const std::size_t n = locations.size();
        std::vector<double> g(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double v = (*this)(locations[i], locations[j]);
                g[i * n + j] = g[j * n + i] = v;
            }
            g[i * n + i] += noise_variance_;
        }
        return g;
    }

private:
    double signal_variance_;
    double length_scale_;
    double noise_variance_;
};

} // namespace infoplan
