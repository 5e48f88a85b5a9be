#include "sysrisk/marketdata.hpp"

#include "sysrisk/error.hpp"
#include "sysrisk/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

namespace sysrisk {

namespace {

using Kind = DataError::Kind;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

char detect_delimiter(std::string_view header) {
    for (char c : {',', ';', '\t'})
        if (header.find(c) != std::string_view::npos) return c;
    return ',';
}

// Reads the next non-blank line, tracking the 1-based line number.
bool next_line(std::istream& in, std::string& line, std::size_t& row) {
    while (std::getline(in, line)) {
        ++row;
        if (row == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (!trim(line).empty()) return true;
    }
    return false;
}

Date parse_date_cell(std::string_view s, std::size_t row) {
    auto d = parse_iso_date(s);
    if (!d) throw DataError(Kind::malformed_date, "malformed date '" + std::string(s) + "'", row);
    return *d;
}

// Empty cells are missing (NaN); anything else must be a strictly positive number.
double parse_price_cell(std::string_view s, std::size_t row) {
    if (s.empty() || s == "NA" || s == "NaN" || s == "nan") return kNaN;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError(Kind::malformed, "unparseable price '" + std::string(s) + "'", row);
    if (!(v > 0.0) || !std::isfinite(v)) throw DataError(Kind::non_positive_price, "non-positive price '" + std::string(s) + "'", row);
    return v;
}

struct Cell {
    Date date;
    std::size_t ticker;
    double price;
    std::size_t row;
};

PriceTable build_table(std::vector<std::string> tickers, std::vector<Cell> cells) {
    std::vector<Date> dates;
    for (const auto& c : cells) dates.push_back(c.date);
    std::sort(dates.begin(), dates.end());
    dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
    if (dates.empty() || tickers.empty()) throw DataError(Kind::empty_table, "price table has no data rows");

    PriceTable t;
    t.tickers = std::move(tickers);
    t.prices = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(dates.size()), static_cast<Eigen::Index>(t.tickers.size()), kNaN);
    std::vector<char> seen(dates.size() * t.tickers.size(), 0);
    for (const auto& c : cells) {
        const auto r = static_cast<std::size_t>(std::lower_bound(dates.begin(), dates.end(), c.date) - dates.begin());
        char& flag = seen[r * t.tickers.size() + c.ticker];
        if (flag) throw DataError(Kind::duplicate_cell, "duplicate cell for " + t.tickers[c.ticker] + " on " + format_date(c.date), c.row);
        flag = 1;
        t.prices(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c.ticker)) = c.price;
    }
    t.dates = std::move(dates);
    return t;
}

PriceTable load_wide(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    if (!next_line(in, line, row)) throw DataError(Kind::empty_table, "price table is empty");
    const char delim = detect_delimiter(line);
    const auto header = split(line, delim);
    if (header.size() < 2) throw DataError(Kind::malformed, "wide price table needs a date column and at least one ticker", row);
    std::vector<std::string> tickers;
    for (std::size_t j = 1; j < header.size(); ++j) {
        if (header[j].empty()) throw DataError(Kind::malformed, "empty ticker name in header", row);
        tickers.emplace_back(header[j]);
    }
    if (std::set<std::string>(tickers.begin(), tickers.end()).size() != tickers.size())
        throw DataError(Kind::malformed, "repeated ticker in header", row);

    struct Row {
        Date date;
        std::size_t line;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    while (next_line(in, line, row)) {
        const auto fields = split(line, delim);
        if (fields.size() != header.size())
            throw DataError(Kind::malformed, "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()), row);
        Row r{parse_date_cell(fields[0], row), row, {}};
        for (std::size_t j = 1; j < fields.size(); ++j) r.values.push_back(parse_price_cell(fields[j], row));
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw DataError(Kind::empty_table, "price table has no data rows");
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].date == rows[i - 1].date)
            throw DataError(Kind::duplicate_cell, "duplicate date " + format_date(rows[i].date), std::max(rows[i].line, rows[i - 1].line));

    PriceTable t;
    t.tickers = std::move(tickers);
    t.prices.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.tickers.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.dates.push_back(rows[i].date);
        for (std::size_t j = 0; j < rows[i].values.size(); ++j)
            t.prices(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
    }
    return t;
}

PriceTable load_long(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    if (!next_line(in, line, row)) throw DataError(Kind::empty_table, "price table is empty");
    const char delim = detect_delimiter(line);
    if (split(line, delim).size() != 3) throw DataError(Kind::malformed, "long price table needs columns date,ticker,price", row);
    std::vector<std::string> tickers;
    std::map<std::string, std::size_t, std::less<>> index;
    std::vector<Cell> cells;
    while (next_line(in, line, row)) {
        const auto fields = split(line, delim);
        if (fields.size() != 3) throw DataError(Kind::malformed, "expected 3 fields, found " + std::to_string(fields.size()), row);
        const Date d = parse_date_cell(fields[0], row);
        if (fields[1].empty()) throw DataError(Kind::malformed, "empty ticker", row);
        auto it = index.find(fields[1]);
        if (it == index.end()) {
            it = index.emplace(std::string(fields[1]), tickers.size()).first;
            tickers.emplace_back(fields[1]);
        }
        cells.push_back({d, it->second, parse_price_cell(fields[2], row), row});
    }
    return build_table(std::move(tickers), std::move(cells));
}

}  // namespace

std::optional<Date> parse_iso_date(std::string_view s) {
    s = trim(s);
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [&](std::size_t pos, std::size_t len, auto& out) {
        const auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
        return res.ec == std::errc() && res.ptr == s.data() + pos + len;
    };
    if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) return std::nullopt;
    return date;
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

std::pair<int, unsigned> iso_week(const Date& d) {
    using namespace std::chrono;
    const sys_days sd{d};
    // The Thursday of the same ISO week decides the ISO year.
    const unsigned iso_dow = weekday{sd}.iso_encoding();  // Monday = 1
    const sys_days thursday = sd + days{4 - static_cast<int>(iso_dow)};
    const year_month_day t{thursday};
    const sys_days jan1{t.year() / January / 1};
    const auto week = static_cast<unsigned>((thursday - jan1).count() / 7 + 1);
    return {static_cast<int>(t.year()), week};
}

std::string_view to_string(Frequency f) { return f == Frequency::weekly ? "weekly" : "as_is"; }

Frequency frequency_from_string(std::string_view s) {
    if (s == "weekly") return Frequency::weekly;
    if (s == "as_is" || s == "daily" || s == "none") return Frequency::as_is;
    throw std::invalid_argument("unknown frequency: " + std::string(s));
}

PriceFormat price_format_from_string(std::string_view s) {
    if (s == "wide") return PriceFormat::wide;
    if (s == "long") return PriceFormat::long_format;
    throw std::invalid_argument("unknown price format: " + std::string(s));
}

Eigen::Index ReturnPanel::column(std::string_view ticker) const {
    const auto it = std::find(tickers.begin(), tickers.end(), ticker);
    if (it == tickers.end()) throw std::out_of_range("ticker not in panel: " + std::string(ticker));
    return it - tickers.begin();
}

PriceTable load_price_table(std::istream& in, PriceFormat format) {
    return format == PriceFormat::wide ? load_wide(in) : load_long(in);
}

PriceTable load_price_table(const std::filesystem::path& path, PriceFormat format) {
    std::ifstream in(path);
    if (!in) throw DataError(Kind::malformed, "cannot open price file " + path.string());
    return load_price_table(in, format);
}

std::map<std::string, TickerMeta> load_ticker_meta(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    std::map<std::string, TickerMeta> out;
    if (!next_line(in, line, row)) return out;
    const char delim = detect_delimiter(line);
    while (next_line(in, line, row)) {
        const auto f = split(line, delim);
        if (f.size() < 1 || f[0].empty()) throw DataError(Kind::malformed, "metadata row without ticker", row);
        TickerMeta m;
        if (f.size() > 1) m.name = f[1];
        if (f.size() > 2) m.country = f[2];
        if (f.size() > 3 && !f[3].empty()) {
            double v = 0.0;
            const auto res = std::from_chars(f[3].data(), f[3].data() + f[3].size(), v);
            if (res.ec != std::errc()) throw DataError(Kind::malformed, "bad total_assets value", row);
            m.total_assets_bn_usd = v;
        }
        out[std::string(f[0])] = std::move(m);
    }
    return out;
}

ReturnPanel to_log_returns(const PriceTable& p, Frequency frequency) {
    const auto n_tickers = p.prices.cols();
    if (p.dates.empty() || n_tickers == 0) throw DataError(Kind::empty_table, "price table is empty");

    // Group rows into sampling periods: one per date, or one per ISO week.
    std::vector<std::vector<std::size_t>> periods;
    std::pair<int, unsigned> last_week{0, 0};
    for (std::size_t r = 0; r < p.dates.size(); ++r) {
        if (frequency == Frequency::weekly) {
            const auto w = iso_week(p.dates[r]);
            if (periods.empty() || w != last_week) periods.emplace_back();
            last_week = w;
        } else {
            periods.emplace_back();
        }
        periods.back().push_back(r);
    }

    const auto P = static_cast<Eigen::Index>(periods.size());
    Eigen::MatrixXd sampled = Eigen::MatrixXd::Constant(P, n_tickers, kNaN);
    std::vector<Date> period_dates;
    for (Eigen::Index t = 0; t < P; ++t) {
        const auto& rows = periods[static_cast<std::size_t>(t)];
        period_dates.push_back(p.dates[rows.back()]);
        for (Eigen::Index j = 0; j < n_tickers; ++j)
            for (auto it = rows.rbegin(); it != rows.rend(); ++it)
                if (!std::isnan(p.prices(static_cast<Eigen::Index>(*it), j))) {
                    sampled(t, j) = p.prices(static_cast<Eigen::Index>(*it), j);
                    break;
                }
    }
    for (Eigen::Index j = 0; j < n_tickers; ++j) {
        const auto usable = (sampled.col(j).array() == sampled.col(j).array()).count();
        if (usable < 2)
            throw DataError(Kind::insufficient_data, "ticker " + p.tickers[static_cast<std::size_t>(j)] + " has fewer than 2 usable quotes");
    }

    ReturnPanel out;
    out.tickers = p.tickers;
    out.frequency = frequency;
    out.returns = (sampled.bottomRows(P - 1).array() / sampled.topRows(P - 1).array()).log();
    out.dates.assign(period_dates.begin() + 1, period_dates.end());
    return out;
}

ReturnPanel align(const ReturnPanel& p) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index t = 0; t < p.returns.rows(); ++t)
        if (p.returns.row(t).allFinite()) keep.push_back(t);
    if (keep.empty()) throw DataError(Kind::empty_table, "no complete rows remain after alignment");
    ReturnPanel out;
    out.tickers = p.tickers;
    out.frequency = p.frequency;
    out.returns = p.returns(keep, Eigen::all);
    for (auto t : keep) out.dates.push_back(p.dates[static_cast<std::size_t>(t)]);
    return out;
}

ReturnPanel merge(const ReturnPanel& a, const ReturnPanel& b) {
    for (const auto& t : b.tickers)
        if (std::find(a.tickers.begin(), a.tickers.end(), t) != a.tickers.end()) throw std::invalid_argument("merge: ticker in both panels: " + t);
    std::set<Date> all(a.dates.begin(), a.dates.end());
    all.insert(b.dates.begin(), b.dates.end());
    ReturnPanel out;
    out.dates.assign(all.begin(), all.end());
    out.tickers = a.tickers;
    out.tickers.insert(out.tickers.end(), b.tickers.begin(), b.tickers.end());
    out.frequency = a.frequency;
    out.returns = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(out.dates.size()), static_cast<Eigen::Index>(out.tickers.size()), kNaN);
    auto place = [&](const ReturnPanel& src, Eigen::Index offset) {
        for (std::size_t t = 0; t < src.dates.size(); ++t) {
            const auto r = std::lower_bound(out.dates.begin(), out.dates.end(), src.dates[t]) - out.dates.begin();
            out.returns.block(r, offset, 1, src.returns.cols()) = src.returns.row(static_cast<Eigen::Index>(t));
        }
    };
    place(a, 0);
    place(b, a.returns.cols());
    return out;
}

ReturnPanel select(const ReturnPanel& p, const std::vector<std::string>& tickers) {
    std::vector<Eigen::Index> cols;
    for (const auto& t : tickers) cols.push_back(p.column(t));
    ReturnPanel out;
    out.dates = p.dates;
    out.tickers = tickers;
    out.frequency = p.frequency;
    out.returns = p.returns(Eigen::all, cols);
    return out;
}

void write_return_panel(std::ostream& out, const ReturnPanel& p) {
    out << "date";
    for (const auto& t : p.tickers) out << ',' << t;
    out << '\n';
    for (Eigen::Index r = 0; r < p.returns.rows(); ++r) {
        out << format_date(p.dates[static_cast<std::size_t>(r)]);
        for (Eigen::Index j = 0; j < p.returns.cols(); ++j) {
            out << ',';
            if (!std::isnan(p.returns(r, j))) out << format_double(p.returns(r, j));
        }
        out << '\n';
    }
}

ReturnPanel read_return_panel(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    if (!next_line(in, line, row)) throw DataError(Kind::empty_table, "return panel is empty");
    const char delim = detect_delimiter(line);
    const auto header = split(line, delim);
    if (header.size() < 2) throw DataError(Kind::malformed, "return panel needs a date column and at least one ticker", row);
    ReturnPanel p;
    for (std::size_t j = 1; j < header.size(); ++j) p.tickers.emplace_back(header[j]);
    std::vector<std::vector<double>> rows;
    while (next_line(in, line, row)) {
        const auto f = split(line, delim);
        if (f.size() != header.size()) throw DataError(Kind::malformed, "wrong field count", row);
        const Date d = parse_date_cell(f[0], row);
        if (!p.dates.empty() && !(p.dates.back() < d)) throw DataError(Kind::malformed_date, "dates must be strictly increasing", row);
        p.dates.push_back(d);
        std::vector<double> vals;
        for (std::size_t j = 1; j < f.size(); ++j) {
            if (f[j].empty()) {
                vals.push_back(kNaN);
                continue;
            }
            double v = 0.0;
            const auto res = std::from_chars(f[j].data(), f[j].data() + f[j].size(), v);
            if (res.ec != std::errc() || res.ptr != f[j].data() + f[j].size())
                throw DataError(Kind::malformed, "unparseable return '" + std::string(f[j]) + "'", row);
            vals.push_back(v);
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw DataError(Kind::empty_table, "return panel has no data rows");
    p.returns.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p.tickers.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t j = 0; j < rows[r].size(); ++j) p.returns(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = rows[r][j];
    return p;
}

}  // namespace sysrisk
