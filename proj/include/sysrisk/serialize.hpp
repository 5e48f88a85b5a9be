#pragma once

#include "sysrisk/clustering.hpp"
#include "sysrisk/covar.hpp"
#include "sysrisk/dcc.hpp"
#include "sysrisk/dist.hpp"
#include "sysrisk/garch.hpp"
#include "sysrisk/marketdata.hpp"
#include "sysrisk/summary.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sysrisk {

using json = nlohmann::ordered_json;

/// Shortest decimal text that parses back to the same double; "nan", "inf", "-inf" otherwise.
std::string format_double(double x);
/// Inverse of format_double; throws std::invalid_argument on malformed text.
double parse_double(std::string_view s);

/// Non-finite numbers become the strings "nan", "inf" and "-inf" so they survive JSON.
json number_to_json(double x);
double number_from_json(const json& j);

json to_json(const DistSpec& d);
DistSpec dist_spec_from_json(const json& j);

json to_json(const ArmaEgarchOrders& o);
ArmaEgarchOrders orders_from_json(const json& j);

/// Table 2/4 block for one instrument: parameter rows (estimate, se, p-value), orders,
/// distribution, log-likelihood and diagnostics.
json to_json(const UnivariateFit& fit);
/// Restores params, se, p-values and diagnostics; the filter output is left empty.
UnivariateFit univariate_fit_from_json(const json& j);

json to_json(const DccParams& p);
DccParams dcc_params_from_json(const json& j);

/// Parameters, standard errors and fit statistics; the correlation path is not stored.
json to_json(const DccFit& fit);
DccFit dcc_fit_from_json(const json& j);

/// Table 3 layout: one row per (method, index) with one column per k, then the k
/// preferred by that index for that method.
void write_table3(std::ostream& out, const ValidityReport& r);
ValidityReport read_table3(std::istream& in);

/// Table 5 layout: one row per (index, insurer) pair.
struct Table5Row {
    std::string index;
    std::string insurer;
    DccFit fit;
};
void write_table5(std::ostream& out, const std::vector<Table5Row>& rows);
std::vector<Table5Row> read_table5(std::istream& in);

void write_partition(std::ostream& out, const std::vector<Date>& dates, const std::vector<int>& labels);
void write_covar_series(std::ostream& out, const CoVaRSeries& s);

json to_json(const Summary& s);

}  // namespace sysrisk
