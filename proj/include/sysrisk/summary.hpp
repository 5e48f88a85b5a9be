#pragma once

#include <cstddef>
#include <map>
#include <span>

namespace sysrisk {

/// Sample quantile by linear interpolation between order statistics (Hyndman-Fan type 7,
/// the R default). `sorted` must be ascending and non-empty; 0 <= p <= 1.
double quantile_type7(std::span<const double> sorted, double p);

/// The numbers behind a box plot.
struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Throws std::invalid_argument on empty input.
Summary summarize(std::span<const double> values);

/// Summary of `values` for each label 1..k. Throws std::invalid_argument when the sizes
/// differ or a regime has no members.
std::map<int, Summary> regime_summary(std::span<const double> values, std::span<const int> labels, int k);

}  // namespace sysrisk
