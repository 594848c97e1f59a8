#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gsa {

double mean(std::span<const double> xs);

// Variance with denominator n (the convention used throughout calibration).
double variance(std::span<const double> xs);

// k-th central moment, denominator n.
double central_moment(std::span<const double> xs, int k);

// Interpolated percentile (inclusive / linear between order statistics):
// position p*(n-1) over the sorted sample. `sorted` must be ascending.
double percentile_sorted(std::span<const double> sorted, double p);

// Convenience: copies, sorts, interpolates.
double percentile(std::span<const double> xs, double p);

double median(std::span<const double> xs);

// Median absolute deviation (raw, unscaled).
double mad(std::span<const double> xs);

std::vector<double> sorted_copy(std::span<const double> xs);

}  // namespace gsa
