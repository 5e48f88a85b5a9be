#include "sysrisk/pipeline.hpp"

#include "sysrisk/error.hpp"
#include "sysrisk/summary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace sysrisk {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError("unknown config key '" + key + "' in " + where);
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

fs::path resolve(const std::string& p, const fs::path& base) {
    if (p.empty()) return {};
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

std::string hash_matrix(const Eigen::Ref<const Eigen::MatrixXd>& M) {
    std::uint64_t h = fnv1a("matrix");
    for (Eigen::Index j = 0; j < M.cols(); ++j)
        for (Eigen::Index i = 0; i < M.rows(); ++i) h = fnv1a(format_double(M(i, j)) + ";", h);
    return hex64(h);
}

Eigen::VectorXd pit(const DistSpec& d, const Eigen::VectorXd& z) {
    const StandardizedDist dist(d);
    Eigen::VectorXd u(z.size());
    for (Eigen::Index t = 0; t < z.size(); ++t) u[t] = dist.cdf(z[t]);
    return u;
}

std::string summary_cells(const Summary& s) {
    std::ostringstream o;
    o << s.count << ',' << format_double(s.mean) << ',' << format_double(s.median) << ',' << format_double(s.q1) << ','
      << format_double(s.q3) << ',' << format_double(s.min) << ',' << format_double(s.max);
    return o.str();
}

constexpr const char* kSummaryHeader = "count,mean,median,q1,q3,min,max";

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Rethrows a stage failure with the series name prefixed, keeping the error class.
[[noreturn]] void rethrow_named(const std::string& name) {
    try {
        throw;
    } catch (const DataError& e) {
        throw DataError(e.kind(), name + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(name + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(name + ": " + e.what());
    } catch (const std::exception& e) {
        throw NumericError(name + ": " + e.what());
    }
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
    require_keys(j, {"data", "index", "insurers", "panel", "margins", "dcc", "regimes", "risk", "seed", "out"}, "config");
    PipelineConfig c;
    try {
        if (!j.contains("data")) throw ConfigError("config needs a 'data' section");
        const json& d = j["data"];
        require_keys(d, {"prices", "format", "metadata", "frequency"}, "data");
        c.prices = resolve(get_or<std::string>(d, "prices", ""), base_dir);
        c.format = price_format_from_string(get_or<std::string>(d, "format", "wide"));
        c.metadata = resolve(get_or<std::string>(d, "metadata", ""), base_dir);
        c.frequency = frequency_from_string(get_or<std::string>(d, "frequency", "weekly"));

        c.index = get_or<std::string>(j, "index", "");
        c.insurers = get_or<std::vector<std::string>>(j, "insurers", {});
        c.panel = get_or<std::vector<std::string>>(j, "panel", {});

        if (j.contains("margins")) {
            const json& m = j["margins"];
            require_keys(m, {"ar", "ma", "arch", "garch", "family", "starts"}, "margins");
            c.orders.ar = get_or(m, "ar", c.orders.ar);
            c.orders.ma = get_or(m, "ma", c.orders.ma);
            c.orders.arch = get_or(m, "arch", c.orders.arch);
            c.orders.garch = get_or(m, "garch", c.orders.garch);
            c.margin_family = family_from_string(get_or<std::string>(m, "family", std::string(to_string(c.margin_family))));
            c.margin_starts = get_or(m, "starts", c.margin_starts);
        }
        if (j.contains("dcc")) {
            const json& m = j["dcc"];
            require_keys(m, {"copula", "m", "n", "score_source", "max_shape"}, "dcc");
            c.copula = copula_family_from_string(get_or<std::string>(m, "copula", std::string(to_string(c.copula))));
            c.dcc_m = get_or(m, "m", c.dcc_m);
            c.dcc_n = get_or(m, "n", c.dcc_n);
            const auto src = get_or<std::string>(m, "score_source", "copula_scores");
            if (src == "copula_scores") c.score_source = ScoreSource::copula_scores;
            else if (src == "garch_residuals") c.score_source = ScoreSource::garch_residuals;
            else throw ConfigError("unknown dcc.score_source '" + src + "'");
            c.max_shape = get_or(m, "max_shape", c.max_shape);
        }
        if (j.contains("regimes")) {
            const json& m = j["regimes"];
            require_keys(m, {"k", "methods", "metric", "kmeans_restarts", "log_features"}, "regimes");
            c.ks = get_or(m, "k", c.ks);
            if (m.contains("methods")) {
                c.methods.clear();
                for (const auto& s : get_or<std::vector<std::string>>(m, "methods", {})) c.methods.push_back(cluster_method_from_string(s));
            }
            c.metric = metric_from_string(get_or<std::string>(m, "metric", "euclidean"));
            c.kmeans_restarts = get_or(m, "kmeans_restarts", c.kmeans_restarts);
            c.log_features = get_or(m, "log_features", c.log_features);
        }
        if (j.contains("risk")) {
            const json& m = j["risk"];
            require_keys(m, {"alpha", "beta"}, "risk");
            c.levels.alpha = get_or(m, "alpha", c.levels.alpha);
            c.levels.beta = get_or(m, "beta", c.levels.beta);
        }
        c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
        c.out = resolve(get_or<std::string>(j, "out", "out"), base_dir);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    validate(c);
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

json to_json(const PipelineConfig& c) {
    json methods = json::array();
    for (auto m : c.methods) methods.push_back(std::string(to_string(m)));
    return json{{"data",
                 {{"prices", c.prices.string()},
                  {"format", c.format == PriceFormat::wide ? "wide" : "long"},
                  {"metadata", c.metadata.string()},
                  {"frequency", std::string(to_string(c.frequency))}}},
                {"index", c.index},
                {"insurers", c.insurers},
                {"panel", c.panel},
                {"margins",
                 {{"ar", c.orders.ar},
                  {"ma", c.orders.ma},
                  {"arch", c.orders.arch},
                  {"garch", c.orders.garch},
                  {"family", std::string(to_string(c.margin_family))},
                  {"starts", c.margin_starts}}},
                {"dcc",
                 {{"copula", std::string(to_string(c.copula))},
                  {"m", c.dcc_m},
                  {"n", c.dcc_n},
                  {"score_source", c.score_source == ScoreSource::copula_scores ? "copula_scores" : "garch_residuals"},
                  {"max_shape", c.max_shape}}},
                {"regimes",
                 {{"k", c.ks},
                  {"methods", methods},
                  {"metric", std::string(to_string(c.metric))},
                  {"kmeans_restarts", c.kmeans_restarts},
                  {"log_features", c.log_features}}},
                {"risk", {{"alpha", c.levels.alpha}, {"beta", c.levels.beta}}},
                {"seed", c.seed},
                {"out", c.out.string()}};
}

std::vector<std::string> stage1_tickers(const PipelineConfig& c) { return c.panel.empty() ? c.insurers : c.panel; }

void validate(const PipelineConfig& c) {
    if (c.prices.empty()) throw ConfigError("data.prices is required");
    const auto s1 = stage1_tickers(c);
    if (s1.empty()) throw ConfigError("no stage-1 instruments: set 'insurers' or 'panel'");
    for (const auto* list : {&c.insurers, &c.panel}) {
        if (std::set<std::string>(list->begin(), list->end()).size() != list->size()) throw ConfigError("ticker listed twice");
    }
    if (!c.index.empty() && std::find(c.insurers.begin(), c.insurers.end(), c.index) != c.insurers.end())
        throw ConfigError("index ticker " + c.index + " is also listed as an insurer");
    if (c.orders.ar < 0 || c.orders.ma < 0 || c.orders.arch < 0 || c.orders.garch < 0) throw ConfigError("model orders must be >= 0");
    if (c.margin_starts < 1) throw ConfigError("margins.starts must be >= 1");
    if (c.dcc_m < 0 || c.dcc_n < 0) throw ConfigError("DCC orders must be >= 0");
    if (!(c.max_shape > 2.0)) throw ConfigError("dcc.max_shape must exceed 2");
    if (c.ks.empty() || c.methods.empty()) throw ConfigError("regimes.k and regimes.methods must be non-empty");
    for (int k : c.ks)
        if (k < 2) throw ConfigError("every regimes.k must be >= 2");
    if (c.kmeans_restarts < 1) throw ConfigError("regimes.kmeans_restarts must be >= 1");
    try {
        validate(c.levels);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("risk: ") + e.what());
    }
}

void order_regimes_by_level(Partition& p, const Eigen::Ref<const Eigen::MatrixXd>& X) {
    const int k = p.k;
    std::vector<double> level(static_cast<std::size_t>(k), 0.0);
    std::vector<double> count(static_cast<std::size_t>(k), 0.0);
    for (Eigen::Index t = 0; t < X.rows(); ++t) {
        const auto c = static_cast<std::size_t>(p.labels[static_cast<std::size_t>(t)] - 1);
        level[c] += X.row(t).mean();
        count[c] += 1.0;
    }
    for (int c = 0; c < k; ++c) level[static_cast<std::size_t>(c)] /= count[static_cast<std::size_t>(c)];
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return level[static_cast<std::size_t>(a)] < level[static_cast<std::size_t>(b)]; });
    std::vector<int> new_label(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) new_label[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r + 1;
    for (int& l : p.labels) l = new_label[static_cast<std::size_t>(l - 1)];
    if (p.centers.rows() == k) {
        Eigen::MatrixXd centers(p.centers.rows(), p.centers.cols());
        for (int r = 0; r < k; ++r) centers.row(r) = p.centers.row(order[static_cast<std::size_t>(r)]);
        p.centers = std::move(centers);
    }
    if (static_cast<int>(p.medoids.size()) == k) {
        std::vector<Eigen::Index> medoids(static_cast<std::size_t>(k));
        for (int r = 0; r < k; ++r) medoids[static_cast<std::size_t>(r)] = p.medoids[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
        p.medoids = std::move(medoids);
    }
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) { validate(config_); }

fs::path Pipeline::cache_path(const std::string& name) const { return config_.out / "cache" / (name + ".json"); }

std::optional<json> Pipeline::read_cache(const std::string& name, const std::string& key) const {
    if (config_.force) return std::nullopt;
    std::ifstream in(cache_path(name));
    if (!in) return std::nullopt;
    try {
        json j = json::parse(in);
        if (j.at("key").get<std::string>() != key) return std::nullopt;
        return j.at("payload");
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void Pipeline::write_cache(const std::string& name, const std::string& key, const json& payload) const {
    fs::create_directories(cache_path(name).parent_path());
    std::ofstream out(cache_path(name));
    out << json{{"key", key}, {"payload", payload}}.dump(2) << '\n';
    if (!out) throw ConfigError("cannot write cache file " + cache_path(name).string());
}

void Pipeline::write_file(const fs::path& rel, const std::string& content) {
    const fs::path path = config_.out / rel;
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw ConfigError("cannot write output file " + path.string());
}

const ReturnPanel& Pipeline::panel() {
    if (panel_) return *panel_;
    PriceTable prices = load_price_table(config_.prices, config_.format);
    if (!config_.metadata.empty()) {
        std::ifstream in(config_.metadata);
        if (!in) throw DataError(DataError::Kind::malformed, "cannot open metadata file " + config_.metadata.string());
        prices.meta = load_ticker_meta(in);
    }
    std::vector<std::string> wanted;
    if (!config_.index.empty()) wanted.push_back(config_.index);
    const std::vector<std::string> s1 = stage1_tickers(config_);
    const std::vector<std::string>& ins = config_.insurers;
    for (const auto* list : {&s1, &ins})
        for (const auto& t : *list)
            if (std::find(wanted.begin(), wanted.end(), t) == wanted.end()) wanted.push_back(t);
    for (const auto& t : wanted)
        if (std::find(prices.tickers.begin(), prices.tickers.end(), t) == prices.tickers.end())
            throw ConfigError("ticker " + t + " is not in " + config_.prices.string());
    // Drop unused columns before computing returns so they cannot knock out rows.
    PriceTable used;
    used.dates = prices.dates;
    used.tickers = wanted;
    used.meta = prices.meta;
    used.prices.resize(prices.prices.rows(), static_cast<Eigen::Index>(wanted.size()));
    for (std::size_t j = 0; j < wanted.size(); ++j) {
        const auto col = std::find(prices.tickers.begin(), prices.tickers.end(), wanted[j]) - prices.tickers.begin();
        used.prices.col(static_cast<Eigen::Index>(j)) = prices.prices.col(col);
    }
    panel_ = align(to_log_returns(used, config_.frequency));
    return *panel_;
}

const UnivariateFit& Pipeline::margin(const std::string& ticker) {
    if (auto it = margins_.find(ticker); it != margins_.end()) return it->second;
    const ReturnPanel& p = panel();
    const Eigen::VectorXd series = p.returns.col(p.column(ticker));
    const json spec{{"orders", to_json(config_.orders)},
                    {"family", std::string(to_string(config_.margin_family))},
                    {"starts", config_.margin_starts},
                    {"seed", config_.seed}};
    const std::string key = hex64(fnv1a(spec.dump(), fnv1a(hash_matrix(series))));
    const std::string name = "margin_" + ticker;
    UnivariateFit fit;
    try {
        if (auto cached = read_cache(name, key)) {
            fit = univariate_fit_from_json(*cached);
            const double loglik = fit.filter.loglik;
            fit.filter = arma_egarch_filter(fit.params, series);
            fit.filter.loglik = loglik;
        } else {
            GarchFitOptions opts;
            opts.starts = config_.margin_starts;
            opts.seed = config_.seed;
            fit = fit_arma_egarch(config_.orders, DistSpec{config_.margin_family, 1.0, 8.0}, series, opts);
            write_cache(name, key, to_json(fit));
        }
    } catch (...) {
        rethrow_named("margin " + ticker);
    }
    return margins_.emplace(ticker, std::move(fit)).first->second;
}

const std::optional<DccFit>& Pipeline::panel_dcc() {
    if (panel_dcc_done_) return panel_dcc_;
    const auto tickers = stage1_tickers(config_);
    panel_dcc_done_ = true;
    if (tickers.size() < 2) return panel_dcc_;
    const Eigen::Index T = panel().periods();
    Eigen::MatrixXd U(T, static_cast<Eigen::Index>(tickers.size()));
    Eigen::MatrixXd Z(T, U.cols());
    for (std::size_t i = 0; i < tickers.size(); ++i) {
        const auto& m = margin(tickers[i]);
        Z.col(static_cast<Eigen::Index>(i)) = m.filter.z;
        U.col(static_cast<Eigen::Index>(i)) = pit(m.params.dist, m.filter.z);
    }
    DccFitOptions opts;
    opts.m = config_.dcc_m;
    opts.n = config_.dcc_n;
    opts.source = config_.score_source;
    opts.max_shape = config_.max_shape;
    const json spec = to_json(config_)["dcc"];
    const std::string key = hex64(fnv1a(spec.dump(), fnv1a(hash_matrix(U))));
    try {
        if (auto cached = read_cache("panel_dcc", key)) {
            DccFit fit = dcc_fit_from_json(*cached);
            fit.path = dcc_filter(fit.params, opts.source == ScoreSource::garch_residuals ? Z : recursion_scores(fit.params.copula, U));
            panel_dcc_ = std::move(fit);
        } else {
            panel_dcc_ = fit_dcc(U, config_.copula, opts, &Z);
            write_cache("panel_dcc", key, to_json(*panel_dcc_));
        }
    } catch (...) {
        rethrow_named("panel DCC");
    }
    return panel_dcc_;
}

const Stage1& Pipeline::stage1() {
    if (stage1_) return *stage1_;
    Stage1 s;
    s.tickers = stage1_tickers(config_);
    const Eigen::Index T = panel().periods();
    s.features.resize(T, static_cast<Eigen::Index>(s.tickers.size()));
    for (std::size_t i = 0; i < s.tickers.size(); ++i) {
        const auto& m = margin(s.tickers[i]);
        s.margins.emplace(s.tickers[i], m);
        s.features.col(static_cast<Eigen::Index>(i)) = config_.log_features ? Eigen::VectorXd(m.filter.h.array().log()) : m.filter.h;
    }
    s.panel_dcc = panel_dcc();
    RegimeSearchOptions opts;
    opts.metric = config_.metric;
    opts.kmeans_restarts = config_.kmeans_restarts;
    try {
        s.regimes = regime_search(s.features, config_.ks, config_.methods, config_.seed, opts);
    } catch (const std::invalid_argument& e) {
        throw DataError(DataError::Kind::insufficient_data, std::string("regime search: ") + e.what());
    }
    order_regimes_by_level(s.regimes.selected, s.features);
    stage1_ = std::move(s);
    return *stage1_;
}

const Stage2& Pipeline::stage2() {
    if (stage2_) return *stage2_;
    Stage2 s;
    if (config_.index.empty()) {
        stage2_ = std::move(s);
        return *stage2_;
    }
    const ReturnPanel& p = panel();
    const UnivariateFit& index_fit = margin(config_.index);
    for (const auto& insurer : config_.insurers) {
        PairResult r;
        r.insurer = insurer;
        try {
            const UnivariateFit& ins = margin(insurer);
            Eigen::MatrixXd U(p.periods(), 2), Z(p.periods(), 2);
            Z << index_fit.filter.z, ins.filter.z;
            U << pit(index_fit.params.dist, index_fit.filter.z), pit(ins.params.dist, ins.filter.z);
            DccFitOptions opts;
            opts.m = config_.dcc_m;
            opts.n = config_.dcc_n;
            opts.source = config_.score_source;
            opts.max_shape = config_.max_shape;
            const json spec = to_json(config_)["dcc"];
            const std::string key = hex64(fnv1a(spec.dump(), fnv1a(hash_matrix(U))));
            const std::string name = "pair_" + insurer;
            DccFit fit;
            if (auto cached = read_cache(name, key)) {
                fit = dcc_fit_from_json(*cached);
                fit.path = dcc_filter(fit.params, opts.source == ScoreSource::garch_residuals ? Z : recursion_scores(fit.params.copula, U));
            } else {
                fit = fit_dcc(U, config_.copula, opts, &Z);
                write_cache(name, key, to_json(fit));
            }
            CovarPairInput in;
            in.dates = p.dates;
            in.index_ticker = config_.index;
            in.insurer_ticker = insurer;
            in.copula = fit.params.copula;
            in.rho.resize(p.periods());
            for (Eigen::Index t = 0; t < p.periods(); ++t) in.rho[t] = fit.path.R[static_cast<std::size_t>(t)](0, 1);
            in.index_mu = index_fit.filter.mu;
            in.index_h = index_fit.filter.h;
            in.index_dist = index_fit.params.dist;
            in.insurer_mu = ins.filter.mu;
            in.insurer_h = ins.filter.h;
            in.insurer_dist = ins.params.dist;
            r.covar = covar_series(in, config_.levels);
            r.fit = std::move(fit);
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        s.pairs.push_back(std::move(r));
    }
    stage2_ = std::move(s);
    return *stage2_;
}

void Pipeline::write_returns() {
    std::ostringstream o;
    write_return_panel(o, panel());
    write_file("returns.csv", o.str());
}

void Pipeline::write_table2() {
    const auto tickers = stage1_tickers(config_);
    json margins = json::object();
    for (const auto& t : tickers) margins[t] = to_json(margin(t));
    const auto& dcc = panel_dcc();
    json j{{"tickers", tickers}, {"margins", margins}, {"dcc", dcc ? to_json(*dcc) : json(nullptr)}};
    write_file("table2.json", j.dump(2) + "\n");
}

void Pipeline::write_table4() {
    json j{{"ticker", config_.index.empty() ? json(nullptr) : json(config_.index)},
           {"fit", config_.index.empty() ? json(nullptr) : to_json(margin(config_.index))}};
    write_file("table4.json", j.dump(2) + "\n");
}

void Pipeline::write_table5() {
    std::vector<Table5Row> rows;
    for (const auto& pr : stage2().pairs)
        if (pr.fit) rows.push_back({config_.index, pr.insurer, *pr.fit});
    std::ostringstream o;
    sysrisk::write_table5(o, rows);
    write_file("table5.csv", o.str());
}

void Pipeline::write_table3() {
    std::ostringstream o;
    sysrisk::write_table3(o, stage1().regimes.report);
    write_file("table3.csv", o.str());
}

void Pipeline::write_regimes() {
    std::ostringstream o;
    write_partition(o, panel().dates, stage1().regimes.selected.labels);
    write_file("regimes.csv", o.str());
}

void Pipeline::write_covar() {
    const Stage1& s1 = stage1();
    const Stage2& s2 = stage2();
    const auto& labels = s1.regimes.selected.labels;
    const int k = s1.regimes.selected.k;
    std::ostringstream by_regime, corr;
    by_regime << "insurer,regime," << kSummaryHeader << '\n';
    corr << "source,pair,regime," << kSummaryHeader << '\n';
    json summary = json::object();
    for (int r = 1; r <= k; ++r) summary[std::to_string(r)] = {{"covar", json::object()}, {"index_correlation", json::object()}, {"panel_correlation", json::object()}};

    for (const auto& pr : s2.pairs) {
        if (!pr.covar) continue;
        std::ostringstream series;
        write_covar_series(series, *pr.covar);
        write_file(fs::path("covar") / (pr.insurer + ".csv"), series.str());
        for (const auto& [r, sm] : regime_summary(to_std(pr.covar->values), labels, k)) {
            by_regime << pr.insurer << ',' << r << ',' << summary_cells(sm) << '\n';
            summary[std::to_string(r)]["covar"][pr.insurer] = to_json(sm);
        }
        for (const auto& [r, sm] : regime_summary(to_std(pr.covar->rho), labels, k)) {
            corr << "index," << config_.index << '-' << pr.insurer << ',' << r << ',' << summary_cells(sm) << '\n';
            summary[std::to_string(r)]["index_correlation"][pr.insurer] = to_json(sm);
        }
    }
    if (s1.panel_dcc) {
        const auto& R = s1.panel_dcc->path.R;
        for (std::size_t a = 0; a < s1.tickers.size(); ++a) {
            for (std::size_t b = a + 1; b < s1.tickers.size(); ++b) {
                std::vector<double> rho(R.size());
                for (std::size_t t = 0; t < R.size(); ++t) rho[t] = R[t](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                const std::string pair = s1.tickers[a] + '-' + s1.tickers[b];
                for (const auto& [r, sm] : regime_summary(rho, labels, k)) {
                    corr << "panel," << pair << ',' << r << ',' << summary_cells(sm) << '\n';
                    summary[std::to_string(r)]["panel_correlation"][pair] = to_json(sm);
                }
            }
        }
    }
    write_file("covar_by_regime.csv", by_regime.str());
    write_file("correlations_by_regime.csv", corr.str());
    write_file("regime_summary.json", summary.dump(2) + "\n");
}

void Pipeline::write_plotdata() {
    const Stage1& s1 = stage1();
    const Stage2& s2 = stage2();
    const ReturnPanel& p = panel();
    const auto& part = s1.regimes.selected;
    const auto T = static_cast<std::size_t>(p.periods());

    {  // conditional variances
        std::ostringstream o;
        o << "date";
        for (const auto& t : s1.tickers) o << ',' << t;
        o << '\n';
        for (std::size_t t = 0; t < T; ++t) {
            o << format_date(p.dates[t]);
            for (const auto& tk : s1.tickers) o << ',' << format_double(s1.margins.at(tk).filter.h[static_cast<Eigen::Index>(t)]);
            o << '\n';
        }
        write_file("plotdata/fig3_conditional_variances.csv", o.str());
    }
    {  // regimes over time
        std::ostringstream o;
        o << "date,regime,mean_feature\n";
        for (std::size_t t = 0; t < T; ++t)
            o << format_date(p.dates[t]) << ',' << part.labels[t] << ',' << format_double(s1.features.row(static_cast<Eigen::Index>(t)).mean()) << '\n';
        write_file("plotdata/fig4_regimes.csv", o.str());
    }
    {  // silhouette widths
        const Eigen::VectorXd w = silhouette_widths(distance_matrix(s1.features, config_.metric), part.labels, part.k);
        std::ostringstream o;
        o << "date,regime,silhouette\n";
        for (std::size_t t = 0; t < T; ++t) o << format_date(p.dates[t]) << ',' << part.labels[t] << ',' << format_double(w[static_cast<Eigen::Index>(t)]) << '\n';
        write_file("plotdata/fig5_silhouette.csv", o.str());
    }
    {  // variance distribution per regime
        std::ostringstream o;
        o << "ticker,regime," << kSummaryHeader << '\n';
        for (const auto& tk : s1.tickers)
            for (const auto& [r, sm] : regime_summary(to_std(s1.margins.at(tk).filter.h), part.labels, part.k))
                o << tk << ',' << r << ',' << summary_cells(sm) << '\n';
        write_file("plotdata/fig6_variance_by_regime.csv", o.str());
    }
    {  // panel correlations per regime
        std::ostringstream o;
        o << "pair,regime," << kSummaryHeader << '\n';
        if (s1.panel_dcc) {
            const auto& R = s1.panel_dcc->path.R;
            for (std::size_t a = 0; a < s1.tickers.size(); ++a)
                for (std::size_t b = a + 1; b < s1.tickers.size(); ++b) {
                    std::vector<double> rho(R.size());
                    for (std::size_t t = 0; t < R.size(); ++t) rho[t] = R[t](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                    for (const auto& [r, sm] : regime_summary(rho, part.labels, part.k))
                        o << s1.tickers[a] << '-' << s1.tickers[b] << ',' << r << ',' << summary_cells(sm) << '\n';
                }
        }
        write_file("plotdata/fig7_panel_correlation_by_regime.csv", o.str());
    }
    std::vector<const PairResult*> ok;
    for (const auto& pr : s2.pairs)
        if (pr.covar) ok.push_back(&pr);
    {  // index-insurer correlation paths
        std::ostringstream o;
        o << "date";
        for (const auto* pr : ok) o << ',' << pr->insurer;
        o << '\n';
        for (std::size_t t = 0; t < T; ++t) {
            o << format_date(p.dates[t]);
            for (const auto* pr : ok) o << ',' << format_double(pr->covar->rho[static_cast<Eigen::Index>(t)]);
            o << '\n';
        }
        write_file("plotdata/fig8_index_correlations.csv", o.str());
    }
    {
        std::ostringstream rho, cv;
        rho << "insurer,regime," << kSummaryHeader << '\n';
        cv << "insurer,regime," << kSummaryHeader << '\n';
        for (const auto* pr : ok) {
            for (const auto& [r, sm] : regime_summary(to_std(pr->covar->rho), part.labels, part.k))
                rho << pr->insurer << ',' << r << ',' << summary_cells(sm) << '\n';
            for (const auto& [r, sm] : regime_summary(to_std(pr->covar->values), part.labels, part.k))
                cv << pr->insurer << ',' << r << ',' << summary_cells(sm) << '\n';
        }
        write_file("plotdata/fig9_index_correlation_by_regime.csv", rho.str());
        write_file("plotdata/fig10_covar_by_regime.csv", cv.str());
    }
}

void Pipeline::write_all() {
    write_returns();
    write_table2();
    write_table3();
    write_table4();
    write_table5();
    write_regimes();
    write_covar();
    write_plotdata();
}

void Pipeline::write_manifest(const std::string& command) {
    std::vector<fs::path> files;
    if (fs::exists(config_.out))
        for (const auto& e : fs::recursive_directory_iterator(config_.out))
            if (e.is_regular_file() && e.path().lexically_relative(config_.out) != "manifest.json") files.push_back(e.path().lexically_relative(config_.out));
    std::sort(files.begin(), files.end());
    json list = json::array();
    for (const auto& f : files) {
        std::ifstream in(config_.out / f, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string bytes = buf.str();
        list.push_back({{"path", f.generic_string()}, {"bytes", bytes.size()}, {"fnv1a", hex64(fnv1a(bytes))}});
    }
    json cfg = to_json(config_);
    cfg.erase("out");
    json failures = json::array();
    if (stage2_)
        for (const auto& pr : stage2_->pairs)
            if (!pr.error.empty()) failures.push_back({{"pair", config_.index + "-" + pr.insurer}, {"error", pr.error}});
    json m{{"version", kVersion}, {"command", command}, {"config_hash", hex64(fnv1a(cfg.dump()))}, {"files", list}, {"failures", failures}};
    write_file("manifest.json", m.dump(2) + "\n");
}

}  // namespace sysrisk
