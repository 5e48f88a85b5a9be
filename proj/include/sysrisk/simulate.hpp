#pragma once

#include "sysrisk/dist.hpp"
#include "sysrisk/marketdata.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sysrisk {

/// Weekly panel with one engineered stress block: returns inside the block are scaled up
/// and more strongly correlated. Every instrument follows an eGARCH(1,1) driven by a
/// Gaussian copula with skew-t margins; the block multiplier acts on top of it.
struct RegimePanelSpec {
    int instruments = 8;
    bool with_index = true;
    std::size_t periods = 700;
    std::size_t block_start = 190;
    std::size_t block_length = 26;
    double calm_correlation = 0.2;
    double stress_correlation = 0.5;
    double stress_scale = 6.0;
    /// Calm eGARCH: unconditional weekly volatility, then weak clustering so the block
    /// dominates the variance profile.
    double volatility = 0.03;
    double persistence = 0.5;
    double leverage = -0.05;
    double magnitude = 0.05;
    DistSpec innovations{Family::skew_student_t, 0.9, 30.0};
    /// First price date (a Friday).
    Date start = Date{std::chrono::year{2005}, std::chrono::January, std::chrono::day{7}};
};

struct SyntheticPanel {
    PriceTable prices;
    /// Ticker of the index column, empty when the panel has none.
    std::string index_ticker;
    std::vector<std::string> insurer_tickers;
    /// Stress membership per return period (prices has one more row).
    std::vector<bool> stressed;
    /// Dates of the first and last stressed return periods.
    Date block_first;
    Date block_last;
};

SyntheticPanel simulate_regime_panel(const RegimePanelSpec& spec, std::uint64_t seed);

void write_price_table(std::ostream& out, const PriceTable& p);

}  // namespace sysrisk
