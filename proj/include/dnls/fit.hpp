#pragma once

#include <cstddef>
#include <span>

namespace dnls {

// Power-law fit y ~ C t^slope on log-log axes.
struct SlopeFit {
    double slope = 0.0;       // least squares
    double intercept = 0.0;   // least squares, natural log
    double theil_sen = 0.0;   // median of pairwise slopes
    std::size_t n = 0;
};

// Points with y <= 0 or t <= 0 are rejected with PreconditionError.
SlopeFit loglog_fit(std::span<const double> t, std::span<const double> y);

// Fit restricted to t in [t_lo, t_hi]; throws PreconditionError if fewer than min_points remain.
SlopeFit loglog_fit_window(std::span<const double> t, std::span<const double> y, double t_lo,
                           double t_hi, std::size_t min_points);

}  // namespace dnls
