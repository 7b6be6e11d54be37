#pragma once

#include <span>

#include "ppsim/types.hpp"

namespace ppsim::stats {

double mean(std::span<const double> xs);

/// Unbiased sample variance; zero for fewer than two samples.
double sample_variance(std::span<const double> xs);

/// Quantile by linear interpolation between order statistics
/// (h = (n - 1) q). Throws Error on an empty sample or q outside [0, 1].
double quantile(std::span<const double> xs, double q);

/// Two-sided Welch unequal-variance t-test of mean(a) - mean(b).
/// With zero standard error the result is t = 0, p = 1 when the means agree
/// and t = +-inf, p = 0 otherwise.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace ppsim::stats
