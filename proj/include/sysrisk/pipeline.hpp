#pragma once

#include "sysrisk/clustering.hpp"
#include "sysrisk/covar.hpp"
#include "sysrisk/dcc.hpp"
#include "sysrisk/garch.hpp"
#include "sysrisk/marketdata.hpp"
#include "sysrisk/serialize.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sysrisk {

/// One JSON file drives a run. Relative paths resolve against the config file's directory.
struct PipelineConfig {
    std::filesystem::path prices;
    PriceFormat format = PriceFormat::wide;
    std::filesystem::path metadata;
    Frequency frequency = Frequency::weekly;

    /// Market index (stage-2 side i); empty disables stage 2.
    std::string index;
    /// Stage-2 pairs are (index, insurer).
    std::vector<std::string> insurers;
    /// Instruments clustered in stage 1; empty means the insurers.
    std::vector<std::string> panel;

    ArmaEgarchOrders orders{1, 1, 2, 2};
    Family margin_family = Family::skew_student_t;
    int margin_starts = 3;

    CopulaFamily copula = CopulaFamily::student;
    int dcc_m = 1;
    int dcc_n = 1;
    ScoreSource score_source = ScoreSource::copula_scores;
    double max_shape = 100.0;

    std::vector<int> ks{2, 3, 4, 5, 6};
    std::vector<ClusterMethod> methods{ClusterMethod::ward, ClusterMethod::pam, ClusterMethod::kmeans};
    Metric metric = Metric::euclidean;
    int kmeans_restarts = 10;
    /// Cluster log-variances instead of raw variances.
    bool log_features = false;

    RiskLevels levels;
    std::uint64_t seed = 20181230;
    std::filesystem::path out = "out";
    bool force = false;
};

/// Throws ConfigError for unreadable files, bad JSON, unknown keys or invalid values.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig config_from_json(const json& j, const std::filesystem::path& base_dir = {});
json to_json(const PipelineConfig& c);
/// Checks internal consistency (index not among insurers, levels in (0,1), ...).
void validate(const PipelineConfig& c);

/// The stage-1 instruments after defaulting.
std::vector<std::string> stage1_tickers(const PipelineConfig& c);

struct Stage1 {
    std::vector<std::string> tickers;
    std::map<std::string, UnivariateFit> margins;
    /// k-variate copula DCC over the stage-1 instruments; absent with fewer than two.
    std::optional<DccFit> panel_dcc;
    Eigen::MatrixXd features;
    RegimeSearchResult regimes;
};

struct PairResult {
    std::string insurer;
    std::optional<DccFit> fit;
    std::optional<CoVaRSeries> covar;
    /// Set when the pair failed; the run continues without it.
    std::string error;
};

struct Stage2 {
    std::vector<PairResult> pairs;
};

/// Orders regimes so label 1 has the lowest mean feature (the calm regime); centres and
/// medoids are permuted to match.
void order_regimes_by_level(Partition& p, const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Lazily runs and caches each step under `out/cache`; a cached fit is reused when its
/// key (data hash plus model settings) matches and `force` is off.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config);

    const PipelineConfig& config() const noexcept { return config_; }
    const ReturnPanel& panel();
    const UnivariateFit& margin(const std::string& ticker);
    const std::optional<DccFit>& panel_dcc();
    const Stage1& stage1();
    const Stage2& stage2();

    void write_returns();
    void write_table2();
    void write_table3();
    void write_table4();
    void write_table5();
    void write_regimes();
    void write_covar();
    void write_plotdata();
    void write_all();
    /// Lists every file under the output directory with its size and hash.
    void write_manifest(const std::string& command);

private:
    std::filesystem::path cache_path(const std::string& name) const;
    std::optional<json> read_cache(const std::string& name, const std::string& key) const;
    void write_cache(const std::string& name, const std::string& key, const json& payload) const;
    void write_file(const std::filesystem::path& rel, const std::string& content);

    PipelineConfig config_;
    std::optional<ReturnPanel> panel_;
    std::map<std::string, UnivariateFit> margins_;
    bool panel_dcc_done_ = false;
    std::optional<DccFit> panel_dcc_;
    std::optional<Stage1> stage1_;
    std::optional<Stage2> stage2_;
};

/// 64-bit FNV-1a, used for cache keys and the manifest.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 14695981039346656037ull);
std::string hex64(std::uint64_t h);

}  // namespace sysrisk
