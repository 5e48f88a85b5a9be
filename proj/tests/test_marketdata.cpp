#include "sysrisk/error.hpp"
#include "sysrisk/marketdata.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace sysrisk;
using namespace std::chrono;

namespace {

PriceTable parse(const std::string& text, PriceFormat f = PriceFormat::wide) {
    std::istringstream in(text);
    return load_price_table(in, f);
}

DataError::Kind kind_of(const std::string& text, std::size_t* row = nullptr, PriceFormat f = PriceFormat::wide) {
    try {
        parse(text, f);
    } catch (const DataError& e) {
        if (row) *row = e.row();
        return e.kind();
    }
    ADD_FAILURE() << "no DataError for:\n" << text;
    return DataError::Kind::malformed;
}

}  // namespace

TEST(MarketData, ParsesIsoDates) {
    EXPECT_EQ(parse_iso_date("2020-02-29"), Date(2020y / February / 29d));
    EXPECT_FALSE(parse_iso_date("2019-02-29"));
    EXPECT_FALSE(parse_iso_date("2019-2-01"));
    EXPECT_FALSE(parse_iso_date("20190201"));
    EXPECT_EQ(format_date(2007y / March / 5d), "2007-03-05");
}

TEST(MarketData, IsoWeekAtYearBoundaries) {
    EXPECT_EQ(iso_week(2018y / December / 31d), std::make_pair(2019, 1u));
    EXPECT_EQ(iso_week(2021y / January / 3d), std::make_pair(2020, 53u));
    EXPECT_EQ(iso_week(2016y / January / 1d), std::make_pair(2015, 53u));
    EXPECT_EQ(iso_week(2020y / June / 15d), std::make_pair(2020, 25u));
}

TEST(MarketData, WideTableWithDetectedDelimiters) {
    for (const std::string sep : {",", ";", "\t"}) {
        const PriceTable p = parse("date" + sep + "A" + sep + "B\n2020-01-06" + sep + "10" + sep + "\n2020-01-07" + sep + "11" + sep + "5.5\n");
        ASSERT_EQ(p.tickers, (std::vector<std::string>{"A", "B"}));
        ASSERT_EQ(p.dates.size(), 2u);
        EXPECT_EQ(p.prices(1, 0), 11.0);
        EXPECT_TRUE(std::isnan(p.prices(0, 1)));
    }
}

TEST(MarketData, LongTableMatchesWide) {
    const PriceTable w = parse("date,A,B\n2020-01-06,10,20\n2020-01-07,11,21\n");
    const PriceTable l = parse("date,ticker,price\n2020-01-07,A,11\n2020-01-06,B,20\n2020-01-06,A,10\n2020-01-07,B,21\n", PriceFormat::long_format);
    EXPECT_EQ(l.dates, w.dates);
    EXPECT_EQ(l.tickers, w.tickers);
    EXPECT_EQ(l.prices, w.prices);
}

TEST(MarketData, RowErrorsCarryLineNumbers) {
    std::size_t row = 0;
    EXPECT_EQ(kind_of("date,A\n2020-01-06,10\n2020-13-01,11\n", &row), DataError::Kind::malformed_date);
    EXPECT_EQ(row, 3u);
    EXPECT_EQ(kind_of("date,A\n2020-01-06,-1\n", &row), DataError::Kind::non_positive_price);
    EXPECT_EQ(row, 2u);
    EXPECT_EQ(kind_of("date,A\n2020-01-06,abc\n"), DataError::Kind::malformed);
    EXPECT_EQ(kind_of("date,A,B\n2020-01-06,1\n"), DataError::Kind::malformed);
    EXPECT_EQ(kind_of("date,A\n2020-01-06,1\n2020-01-06,2\n"), DataError::Kind::duplicate_cell);
    EXPECT_EQ(kind_of("date,ticker,price\n2020-01-06,A,1\n2020-01-06,A,2\n", nullptr, PriceFormat::long_format),
              DataError::Kind::duplicate_cell);
    EXPECT_EQ(kind_of(""), DataError::Kind::empty_table);
    EXPECT_EQ(kind_of("date,A\n"), DataError::Kind::empty_table);
}

TEST(MarketData, WeeklyReturnsUseLastQuoteOfEachIsoWeek) {
    // Mon 2020-01-06 .. Fri 01-10 is one week; the next week's Thursday quote is its last.
    const PriceTable p = parse(
        "date,A,B\n"
        "2020-01-06,100,50\n"
        "2020-01-10,110,\n"
        "2020-01-13,120,55\n"
        "2020-01-16,121,60\n"
        "2020-01-20,,66\n");
    const ReturnPanel r = to_log_returns(p, Frequency::weekly);
    ASSERT_EQ(r.periods(), 2);
    EXPECT_EQ(r.dates[0], Date(2020y / January / 16d));
    EXPECT_EQ(r.dates[1], Date(2020y / January / 20d));
    EXPECT_DOUBLE_EQ(r.returns(0, 0), std::log(121.0 / 110.0));
    EXPECT_DOUBLE_EQ(r.returns(0, 1), std::log(60.0 / 50.0));
    EXPECT_TRUE(std::isnan(r.returns(1, 0)));
    EXPECT_DOUBLE_EQ(r.returns(1, 1), std::log(66.0 / 60.0));

    const ReturnPanel a = align(r);
    EXPECT_EQ(a.periods(), 1);
    EXPECT_EQ(a.dates[0], Date(2020y / January / 16d));
}

TEST(MarketData, DailyReturnsAreConsecutive) {
    const ReturnPanel r = to_log_returns(parse("date,A\n2020-01-06,1\n2020-01-07,2\n2020-01-08,4\n"), Frequency::as_is);
    ASSERT_EQ(r.periods(), 2);
    EXPECT_DOUBLE_EQ(r.returns(1, 0), std::log(2.0));
}

TEST(MarketData, InsufficientQuotesThrow) {
    try {
        to_log_returns(parse("date,A,B\n2020-01-06,1,2\n2020-01-13,2,\n"));
        FAIL();
    } catch (const DataError& e) {
        EXPECT_EQ(e.kind(), DataError::Kind::insufficient_data);
    }
}

TEST(MarketData, MergeIsOuterJoin) {
    ReturnPanel a, b;
    a.dates = {2020y / January / 6d, 2020y / January / 13d};
    a.tickers = {"A"};
    a.returns = Eigen::Vector2d(0.1, 0.2);
    b.dates = {2020y / January / 13d, 2020y / January / 20d};
    b.tickers = {"B"};
    b.returns = Eigen::Vector2d(0.3, 0.4);
    const ReturnPanel m = merge(a, b);
    ASSERT_EQ(m.dates.size(), 3u);
    EXPECT_TRUE(std::isnan(m.returns(0, 1)));
    EXPECT_TRUE(std::isnan(m.returns(2, 0)));
    EXPECT_EQ(m.returns(1, 0), 0.2);
    EXPECT_EQ(m.returns(1, 1), 0.3);
    EXPECT_EQ(align(m).periods(), 1);
    EXPECT_THROW(merge(a, a), std::invalid_argument);
}

TEST(MarketData, SelectAndColumnLookup) {
    ReturnPanel p;
    p.dates = {2020y / January / 6d};
    p.tickers = {"A", "B", "C"};
    p.returns = Eigen::RowVector3d(1, 2, 3);
    const ReturnPanel s = select(p, {"C", "A"});
    EXPECT_EQ(s.tickers, (std::vector<std::string>{"C", "A"}));
    EXPECT_EQ(s.returns(0, 0), 3.0);
    EXPECT_THROW(p.column("Z"), std::out_of_range);
}

TEST(MarketData, ReturnPanelRoundTrip) {
    ReturnPanel p;
    p.dates = {2020y / January / 6d, 2020y / January / 13d};
    p.tickers = {"A", "B"};
    p.returns.resize(2, 2);
    p.returns << 0.1, -1e-17, std::nan(""), 1.0 / 3.0;
    std::ostringstream out;
    write_return_panel(out, p);
    std::istringstream in(out.str());
    const ReturnPanel q = read_return_panel(in);
    EXPECT_EQ(q.dates, p.dates);
    EXPECT_EQ(q.tickers, p.tickers);
    EXPECT_EQ(q.returns(0, 1), -1e-17);
    EXPECT_EQ(q.returns(1, 1), 1.0 / 3.0);
    EXPECT_TRUE(std::isnan(q.returns(1, 0)));
    std::ostringstream again;
    write_return_panel(again, q);
    EXPECT_EQ(again.str(), out.str());
}

TEST(MarketData, TickerMetadata) {
    std::istringstream in("ticker,name,country,total_assets\nAIG,American International Group,US,500.5\nALV,Allianz,DE,\n");
    const auto m = load_ticker_meta(in);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m.at("AIG").country, "US");
    EXPECT_EQ(m.at("AIG").total_assets_bn_usd, 500.5);
    EXPECT_FALSE(m.at("ALV").total_assets_bn_usd);
}
