#include "sysrisk/summary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace sysrisk {

double quantile_type7(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile probability outside [0,1]");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("summary of an empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    Summary s;
    s.count = v.size();
    double sum = 0.0;
    for (double x : values) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    s.median = quantile_type7(v, 0.5);
    s.q1 = quantile_type7(v, 0.25);
    s.q3 = quantile_type7(v, 0.75);
    s.min = v.front();
    s.max = v.back();
    return s;
}

std::map<int, Summary> regime_summary(std::span<const double> values, std::span<const int> labels, int k) {
    if (values.size() != labels.size()) throw std::invalid_argument("regime_summary: series and partition lengths differ");
    std::vector<std::vector<double>> groups(static_cast<std::size_t>(k));
    for (std::size_t t = 0; t < values.size(); ++t) {
        if (labels[t] < 1 || labels[t] > k) throw std::invalid_argument("regime_summary: label out of range");
        groups[static_cast<std::size_t>(labels[t] - 1)].push_back(values[t]);
    }
    std::map<int, Summary> out;
    for (int r = 1; r <= k; ++r) {
        const auto& g = groups[static_cast<std::size_t>(r - 1)];
        if (g.empty()) throw std::invalid_argument("regime_summary: regime " + std::to_string(r) + " has no members");
        out[r] = summarize(g);
    }
    return out;
}

}  // namespace sysrisk
