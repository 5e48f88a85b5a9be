#include "sysrisk/serialize.hpp"

#include "sysrisk/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sysrisk {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_to_json(v[i]));
    return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_from_json(j[i]);
    return v;
}

std::string format_cell(double x) { return std::isnan(x) ? std::string() : format_double(x); }

double parse_cell(const std::string& s) { return s.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(s); }

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf" || s == "Inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-Inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    return v;
}

json number_to_json(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

double number_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_double(j.get<std::string>());
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("expected a number in JSON");
}

json to_json(const DistSpec& d) {
    json j;
    j["family"] = std::string(to_string(d.family));
    if (is_skewed(d.family)) j["skew"] = number_to_json(d.skew);
    if (has_shape(d.family)) j["shape"] = number_to_json(d.shape);
    return j;
}

DistSpec dist_spec_from_json(const json& j) {
    DistSpec d;
    d.family = family_from_string(j.at("family").get<std::string>());
    if (j.contains("skew")) d.skew = number_from_json(j["skew"]);
    if (j.contains("shape")) d.shape = number_from_json(j["shape"]);
    return d;
}

json to_json(const ArmaEgarchOrders& o) { return json{{"ar", o.ar}, {"ma", o.ma}, {"arch", o.arch}, {"garch", o.garch}}; }

ArmaEgarchOrders orders_from_json(const json& j) {
    return {j.at("ar").get<int>(), j.at("ma").get<int>(), j.at("arch").get<int>(), j.at("garch").get<int>()};
}

json to_json(const UnivariateFit& fit) {
    const auto orders = fit.params.orders();
    const auto names = parameter_names(orders, fit.params.dist.family);
    const Eigen::VectorXd est = pack(fit.params);
    json params = json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        params.push_back({{"name", names[i]},
                          {"estimate", number_to_json(est[k])},
                          {"se", number_to_json(k < fit.se.size() ? fit.se[k] : std::numeric_limits<double>::quiet_NaN())},
                          {"pvalue", number_to_json(k < fit.pvalues.size() ? fit.pvalues[k] : std::numeric_limits<double>::quiet_NaN())}});
    }
    const auto& d = fit.diagnostics;
    json j;
    j["orders"] = to_json(orders);
    j["dist"] = to_json(fit.params.dist);
    j["parameters"] = params;
    j["loglik"] = number_to_json(fit.filter.loglik);
    j["diagnostics"] = {{"converged", d.converged}, {"iterations", d.iterations}, {"evaluations", d.evaluations},
                        {"best_start", d.best_start}, {"message", d.message}, {"boundary", d.boundary},
                        {"se_available", d.se_available}, {"warnings", d.warnings}};
    return j;
}

UnivariateFit univariate_fit_from_json(const json& j) {
    const auto orders = orders_from_json(j.at("orders"));
    const DistSpec dist = dist_spec_from_json(j.at("dist"));
    const auto names = parameter_names(orders, dist.family);
    const auto& rows = j.at("parameters");
    if (rows.size() != names.size()) throw std::invalid_argument("parameter count does not match the model orders");
    Eigen::VectorXd est(static_cast<Eigen::Index>(names.size()));
    UnivariateFit fit;
    fit.se.resize(est.size());
    fit.pvalues.resize(est.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (rows[i].at("name").get<std::string>() != names[i]) throw std::invalid_argument("unexpected parameter " + rows[i]["name"].dump());
        const auto k = static_cast<Eigen::Index>(i);
        est[k] = number_from_json(rows[i].at("estimate"));
        fit.se[k] = number_from_json(rows[i].at("se"));
        fit.pvalues[k] = number_from_json(rows[i].at("pvalue"));
    }
    fit.params = unpack(est, orders, dist.family);
    fit.params.dist = dist;
    fit.filter.loglik = number_from_json(j.at("loglik"));
    const auto& d = j.at("diagnostics");
    fit.diagnostics.converged = d.at("converged").get<bool>();
    fit.diagnostics.iterations = d.at("iterations").get<int>();
    fit.diagnostics.evaluations = d.at("evaluations").get<int>();
    fit.diagnostics.best_start = d.at("best_start").get<int>();
    fit.diagnostics.message = d.at("message").get<std::string>();
    fit.diagnostics.boundary = d.at("boundary").get<bool>();
    fit.diagnostics.se_available = d.at("se_available").get<bool>();
    fit.diagnostics.warnings = d.at("warnings").get<std::vector<std::string>>();
    return fit;
}

json to_json(const DccParams& p) {
    json q = json::array();
    for (Eigen::Index r = 0; r < p.qbar.rows(); ++r) q.push_back(vector_to_json(p.qbar.row(r).transpose()));
    json cop{{"family", std::string(to_string(p.copula.family))}};
    if (p.copula.family == CopulaFamily::student) cop["shape"] = number_to_json(p.copula.shape);
    return json{{"c", vector_to_json(p.c)}, {"d", vector_to_json(p.d)}, {"qbar", q}, {"copula", cop}};
}

DccParams dcc_params_from_json(const json& j) {
    DccParams p;
    p.c = vector_from_json(j.at("c"));
    p.d = vector_from_json(j.at("d"));
    const auto& q = j.at("qbar");
    p.qbar.resize(static_cast<Eigen::Index>(q.size()), static_cast<Eigen::Index>(q.size()));
    for (std::size_t r = 0; r < q.size(); ++r) {
        if (q[r].size() != q.size()) throw std::invalid_argument("qbar must be square");
        p.qbar.row(static_cast<Eigen::Index>(r)) = vector_from_json(q[r]).transpose();
    }
    p.copula.family = copula_family_from_string(j.at("copula").at("family").get<std::string>());
    if (j["copula"].contains("shape")) p.copula.shape = number_from_json(j["copula"]["shape"]);
    return p;
}

json to_json(const DccFit& fit) {
    const auto names = dcc_parameter_names(static_cast<int>(fit.params.c.size()), static_cast<int>(fit.params.d.size()), fit.params.copula.family);
    json rows = json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        double est;
        if (k < fit.params.c.size()) est = fit.params.c[k];
        else if (k < fit.params.c.size() + fit.params.d.size()) est = fit.params.d[k - fit.params.c.size()];
        else est = fit.params.copula.shape;
        rows.push_back({{"name", names[i]},
                        {"estimate", number_to_json(est)},
                        {"se", number_to_json(k < fit.se.size() ? fit.se[k] : std::numeric_limits<double>::quiet_NaN())},
                        {"pvalue", number_to_json(k < fit.pvalues.size() ? fit.pvalues[k] : std::numeric_limits<double>::quiet_NaN())}});
    }
    json j;
    j["params"] = to_json(fit.params);
    j["parameters"] = rows;
    j["loglik"] = number_to_json(fit.loglik);
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["se_available"] = fit.se_available;
    j["clamped_pits"] = fit.clamped_pits;
    j["warnings"] = fit.warnings;
    return j;
}

DccFit dcc_fit_from_json(const json& j) {
    DccFit fit;
    fit.params = dcc_params_from_json(j.at("params"));
    const auto& rows = j.at("parameters");
    fit.se.resize(static_cast<Eigen::Index>(rows.size()));
    fit.pvalues.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        fit.se[static_cast<Eigen::Index>(i)] = number_from_json(rows[i].at("se"));
        fit.pvalues[static_cast<Eigen::Index>(i)] = number_from_json(rows[i].at("pvalue"));
    }
    fit.loglik = number_from_json(j.at("loglik"));
    fit.converged = j.at("converged").get<bool>();
    fit.iterations = j.at("iterations").get<int>();
    fit.se_available = j.at("se_available").get<bool>();
    fit.clamped_pits = j.at("clamped_pits").get<std::size_t>();
    fit.warnings = j.at("warnings").get<std::vector<std::string>>();
    return fit;
}

void write_table3(std::ostream& out, const ValidityReport& r) {
    constexpr ValidityIndex indices[] = {ValidityIndex::calinski_harabasz, ValidityIndex::silhouette, ValidityIndex::dunn,
                                         ValidityIndex::xie_beni};
    out << "method,index";
    for (int k : r.ks) out << ",k" << k;
    out << ",optimal_k\n";
    for (ClusterMethod m : r.methods) {
        for (ValidityIndex v : indices) {
            out << to_string(m) << ',' << to_string(v);
            for (int k : r.ks) out << ',' << format_double(r.at(m, k).value(v));
            out << ',' << r.best_k(m, v) << '\n';
        }
    }
}

ValidityReport read_table3(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(DataError::Kind::empty_table, "table3 is empty");
    const auto header = split_csv(line);
    if (header.size() < 4 || header[0] != "method" || header[1] != "index" || header.back() != "optimal_k")
        throw DataError(DataError::Kind::malformed, "table3 header is not method,index,k...,optimal_k", 1);
    ValidityReport r;
    for (std::size_t c = 2; c + 1 < header.size(); ++c) {
        if (header[c].size() < 2 || header[c][0] != 'k') throw DataError(DataError::Kind::malformed, "bad k column " + header[c], 1);
        r.ks.push_back(std::stoi(header[c].substr(1)));
    }
    std::map<std::pair<int, int>, ValidityEntry> entries;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != header.size()) throw DataError(DataError::Kind::malformed, "wrong field count in table3", row);
        const ClusterMethod m = cluster_method_from_string(f[0]);
        const ValidityIndex v = validity_index_from_string(f[1]);
        if (std::find(r.methods.begin(), r.methods.end(), m) == r.methods.end()) r.methods.push_back(m);
        for (std::size_t c = 0; c < r.ks.size(); ++c) {
            auto& e = entries[{static_cast<int>(m), r.ks[c]}];
            e.method = m;
            e.k = r.ks[c];
            const double x = parse_double(f[c + 2]);
            switch (v) {
                case ValidityIndex::silhouette: e.silhouette = x; break;
                case ValidityIndex::calinski_harabasz: e.calinski_harabasz = x; break;
                case ValidityIndex::dunn: e.dunn = x; break;
                case ValidityIndex::xie_beni: e.xie_beni = x; break;
            }
        }
    }
    for (ClusterMethod m : r.methods)
        for (int k : r.ks) r.entries.push_back(entries.at({static_cast<int>(m), k}));
    return r;
}

void write_table5(std::ostream& out, const std::vector<Table5Row>& rows) {
    int m = 1, n = 1;
    if (!rows.empty()) {
        m = static_cast<int>(rows.front().fit.params.c.size());
        n = static_cast<int>(rows.front().fit.params.d.size());
    }
    const auto names = dcc_parameter_names(m, n, CopulaFamily::student);
    out << "index,insurer,copula";
    for (const auto& name : names) out << ',' << name << ',' << name << "_se";
    out << ",loglik\n";
    for (const auto& r : rows) {
        const auto& p = r.fit.params;
        if (p.c.size() != m || p.d.size() != n) throw std::invalid_argument("table5 rows must share the DCC order");
        out << r.index << ',' << r.insurer << ',' << to_string(p.copula.family);
        Eigen::Index k = 0;
        auto se = [&](Eigen::Index i) { return i < r.fit.se.size() ? r.fit.se[i] : std::numeric_limits<double>::quiet_NaN(); };
        for (Eigen::Index i = 0; i < m; ++i, ++k) out << ',' << format_cell(p.c[i]) << ',' << format_cell(se(k));
        for (Eigen::Index i = 0; i < n; ++i, ++k) out << ',' << format_cell(p.d[i]) << ',' << format_cell(se(k));
        if (p.copula.family == CopulaFamily::student) out << ',' << format_cell(p.copula.shape) << ',' << format_cell(se(k));
        else out << ",,";
        out << ',' << format_cell(r.fit.loglik) << '\n';
    }
}

std::vector<Table5Row> read_table5(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(DataError::Kind::empty_table, "table5 is empty");
    const auto header = split_csv(line);
    if (header.size() < 6 || header[0] != "index" || header[1] != "insurer" || header[2] != "copula" || header.back() != "loglik")
        throw DataError(DataError::Kind::malformed, "table5 header is not index,insurer,copula,...,loglik", 1);
    int m = 0, n = 0;
    for (std::size_t c = 3; c + 1 < header.size(); c += 2) {
        if (header[c][0] == 'c') ++m;
        else if (header[c][0] == 'd') ++n;
    }
    std::vector<Table5Row> rows;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != header.size()) throw DataError(DataError::Kind::malformed, "wrong field count in table5", row);
        Table5Row r;
        r.index = f[0];
        r.insurer = f[1];
        auto& p = r.fit.params;
        p.copula.family = copula_family_from_string(f[2]);
        p.c.resize(m);
        p.d.resize(n);
        const int np = m + n + (p.copula.family == CopulaFamily::student ? 1 : 0);
        r.fit.se.resize(np);
        std::size_t c = 3;
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < m; ++i, ++k, c += 2) {
            p.c[i] = parse_cell(f[c]);
            r.fit.se[k] = parse_cell(f[c + 1]);
        }
        for (Eigen::Index i = 0; i < n; ++i, ++k, c += 2) {
            p.d[i] = parse_cell(f[c]);
            r.fit.se[k] = parse_cell(f[c + 1]);
        }
        if (p.copula.family == CopulaFamily::student) {
            p.copula.shape = parse_cell(f[c]);
            r.fit.se[k] = parse_cell(f[c + 1]);
        }
        r.fit.loglik = parse_cell(f.back());
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_partition(std::ostream& out, const std::vector<Date>& dates, const std::vector<int>& labels) {
    if (dates.size() != labels.size()) throw std::invalid_argument("partition and dates differ in length");
    out << "date,label\n";
    for (std::size_t t = 0; t < dates.size(); ++t) out << format_date(dates[t]) << ',' << labels[t] << '\n';
}

void write_covar_series(std::ostream& out, const CoVaRSeries& s) {
    out << "date,covar,var_j,rho_t\n";
    for (std::size_t t = 0; t < s.dates.size(); ++t) {
        const auto i = static_cast<Eigen::Index>(t);
        out << format_date(s.dates[t]) << ',' << format_double(s.values[i]) << ',' << format_double(s.var_j[i]) << ','
            << format_double(s.rho[i]) << '\n';
    }
}

json to_json(const Summary& s) {
    return json{{"count", s.count},
                {"mean", number_to_json(s.mean)},
                {"median", number_to_json(s.median)},
                {"q1", number_to_json(s.q1)},
                {"q3", number_to_json(s.q3)},
                {"min", number_to_json(s.min)},
                {"max", number_to_json(s.max)}};
}

}  // namespace sysrisk
