#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "infoplan/bits.hpp"
#include "infoplan/entropy.hpp"
#include "infoplan/errors.hpp"
#include "infoplan/gp/kernel.hpp"

namespace infoplan {

/// Predictive variances within this distance below zero are clamped to zero;
/// anything lower is treated as a numerical failure.
inline constexpr double kVarianceClampTolerance = 1e-9;

/// Gaussian-process posterior over a sequence of visited locations.
///
/// Holds the kernel, the locations, and a lower-triangular Cholesky factor of
/// the noisy Gram matrix, grown one row per appended location. Outcome values
/// are not stored: predictive variance, and hence entropy, depends only on
/// where measurements were taken, so outcomes are supplied per query.
/// Instances are immutable; appended() returns an extended copy.
class GpPosterior {
public:
    explicit GpPosterior(SquaredExponentialKernel kernel) : kernel_(std::move(kernel)) {}

    const SquaredExponentialKernel& kernel() const { return kernel_; }
    std::size_t size() const { return locations_.size(); }
    std::span<const Vec2> locations() const { return locations_; }

    /// Extends the factorization by one location in O(n^2).
    GpPosterior appended(Vec2 location) const {
        GpPosterior next = *this;
        const std::size_t n = next.locations_.size();
        std::vector<double> row(n + 1);
        for (std::size_t i = 0; i < n; ++i) row[i] = kernel_(next.locations_[i], location);
        next.forward_solve(row, n);
        double d2 = kernel_(location, location) + kernel_.noise_variance();
        for (std::size_t i = 0; i < n; ++i) d2 -= row[i] * row[i];
        if (!(d2 > 0.0)) {
            std::size_t nearest = 0;
            double best = squared_distance(next.locations_[0], location);
            for (std::size_t i = 1; i < n; ++i) {
                const double d = squared_distance(next.locations_[i], location);
                if (d < best) {
                    best = d;
                    nearest = i;
                }
            }
            throw numerical_error(
                "gp: covariance factorization failed appending (" + std::to_string(location.x) +
                ", " + std::to_string(location.y) + "); conflicts with visited location " +
                std::to_string(nearest) + " at (" + std::to_string(next.locations_[nearest].x) +
                ", " + std::to_string(next.locations_[nearest].y) + ")");
        }
        row[n] = std::sqrt(d2);
        next.chol_.insert(next.chol_.end(), row.begin(), row.end());
        next.locations_.push_back(location);
        return next;
    }

    /// Predictive variance of the field value at `query`; independent of
    /// observed outcomes. Slightly negative round-off is clamped to zero.
    double predictive_variance(Vec2 query) const {
        const std::size_t n = locations_.size();
        const double prior = kernel_(query, query);
        if (n == 0) return prior;
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = kernel_(locations_[i], query);
        forward_solve(p, n);
        double variance = prior;
        for (std::size_t i = 0; i < n; ++i) variance -= p[i] * p[i];
        if (variance < 0.0) {
            if (variance < -kVarianceClampTolerance)
                throw numerical_error("gp: predictive variance " + std::to_string(variance) +
                                      " below clamp tolerance");
            variance = 0.0;
        }
        return variance;
    }

    /// Predictive mean and variance given the outcomes observed at the
    /// visited locations, in visit order.
    std::pair<double, double> predict(std::span<const double> outcomes, Vec2 query) const {
        const std::size_t n = locations_.size();
        if (outcomes.size() != n)
            throw model_error("gp: got " + std::to_string(outcomes.size()) + " outcomes for " +
                              std::to_string(n) + " locations");
        const double variance = predictive_variance(query);
        if (n == 0) return {0.0, variance};
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = kernel_(locations_[i], query);
        forward_solve(p, n);
        std::vector<double> m(outcomes.begin(), outcomes.end());
        forward_solve(m, n);
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += p[i] * m[i];
        return {mean, variance};
    }

private:
    // Solves L y = v in place over the first n rows of the packed factor.
    void forward_solve(std::vector<double>& v, std::size_t n) const {
        for (std::size_t i = 0; i < n; ++i) {
            double s = v[i];
            const double* row = chol_.data() + i * (i + 1) / 2;
            for (std::size_t j = 0; j < i; ++j) s -= row[j] * v[j];
            v[i] = s / row[i];
        }
    }

    SquaredExponentialKernel kernel_;
    std::vector<Vec2> locations_;
    std::vector<double> chol_; // packed lower triangular, row i at offset i(i+1)/2
};

/// Predictive mean and variance at `query` from exact Gaussian conditioning.
inline std::pair<double, double> posterior(const GpPosterior& gp,
                                           std::span<const double> outcomes, Vec2 query) {
    return gp.predict(outcomes, query);
}

/// Differential entropy of the next measurement at `query` given the visited
/// locations; a function of locations only, never of outcome values.
inline Bits stage_entropy(const GpPosterior& gp, Vec2 query) {
    const double variance = gp.predictive_variance(query);
    if (!(variance > 0.0))
        throw numerical_error("gp: predictive variance collapsed to zero at query");
    return gaussian_entropy(variance);
}

/// Joint differential entropy of the measurements along a path,
/// (1/2) log2((2 pi e)^n det C), via the log-determinant of a dense one-shot
/// Cholesky factorization of the full Gram matrix. Equals the sum of
/// sequential stage entropies along the path by the Gaussian chain rule
/// (for a noise-free kernel the two quantities are the same joint).
inline Bits joint_path_entropy(const SquaredExponentialKernel& kernel,
                               std::span<const Vec2> path) {
    if (path.empty()) throw model_error("joint_path_entropy: empty path");
    const std::size_t n = path.size();
    std::vector<double> a = kernel.gram(path);
    double log2_det = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * n + j];
            for (std::size_t t = 0; t < j; ++t) s -= a[i * n + t] * a[j * n + t];
            if (i == j) {
                if (!(s > 0.0))
                    throw numerical_error(
                        "joint_path_entropy: Gram matrix is not positive definite");
                a[i * n + i] = std::sqrt(s);
                log2_det += 2.0 * std::log2(a[i * n + i]);
            } else {
                a[i * n + j] = s / a[j * n + j];
            }
        }
    }
    return Bits{0.5 * (static_cast<double>(n) * std::log2(2.0 * std::numbers::pi * std::numbers::e) +
                       log2_det)};
}

} // namespace infoplan
