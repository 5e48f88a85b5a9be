#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sysrisk {

using Date = std::chrono::year_month_day;

/// Parses YYYY-MM-DD; returns nullopt for anything else, including impossible dates.
std::optional<Date> parse_iso_date(std::string_view s);
std::string format_date(const Date& d);

/// ISO-8601 week as (iso year, week number).
std::pair<int, unsigned> iso_week(const Date& d);

struct TickerMeta {
    std::string name;
    std::string country;
    std::optional<double> total_assets_bn_usd;
};

/// Prices indexed [date x ticker]; NaN marks a missing quote.
struct PriceTable {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd prices;
    std::map<std::string, TickerMeta> meta;
};

enum class PriceFormat { wide, long_format };
enum class Frequency { as_is, weekly };

std::string_view to_string(Frequency f);
Frequency frequency_from_string(std::string_view s);
PriceFormat price_format_from_string(std::string_view s);

/// Log-returns indexed [period x ticker]. Each row is dated by the later of its two quotes.
/// NaN marks a return that could not be formed; align() removes those rows.
struct ReturnPanel {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    Eigen::MatrixXd returns;
    Frequency frequency = Frequency::weekly;

    Eigen::Index periods() const { return returns.rows(); }
    /// Column index of a ticker; throws std::out_of_range when absent.
    Eigen::Index column(std::string_view ticker) const;
};

/// Reads delimiter-separated text (comma, semicolon or tab, detected from the header).
/// Errors are DataError values carrying the 1-based line number.
PriceTable load_price_table(std::istream& in, PriceFormat format);
PriceTable load_price_table(const std::filesystem::path& path, PriceFormat format);

/// Optional descriptor file with header `ticker,name,country,total_assets`.
std::map<std::string, TickerMeta> load_ticker_meta(std::istream& in);

/// Weekly sampling keeps, per ticker, the last available quote of each ISO week.
/// Throws DataError(insufficient_data) when a ticker has fewer than two usable quotes.
ReturnPanel to_log_returns(const PriceTable& p, Frequency frequency = Frequency::weekly);

/// Drops every row with a missing cell; throws DataError(empty_table) if nothing is left.
ReturnPanel align(const ReturnPanel& p);

/// Outer join on dates; cells absent from one side are NaN. Ticker names must not repeat.
ReturnPanel merge(const ReturnPanel& a, const ReturnPanel& b);

/// Keeps the named columns in the given order.
ReturnPanel select(const ReturnPanel& p, const std::vector<std::string>& tickers);

/// Wide CSV `date,T1,T2,...`; missing cells are written empty.
void write_return_panel(std::ostream& out, const ReturnPanel& p);
ReturnPanel read_return_panel(std::istream& in);

}  // namespace sysrisk
