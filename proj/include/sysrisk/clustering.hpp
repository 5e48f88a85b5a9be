#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sysrisk {

enum class ClusterMethod { ward, pam, kmeans };
enum class Metric { euclidean, manhattan };
enum class ValidityIndex { silhouette, calinski_harabasz, dunn, xie_beni };

std::string_view to_string(ClusterMethod m);
std::string_view to_string(Metric m);
std::string_view to_string(ValidityIndex v);
ClusterMethod cluster_method_from_string(std::string_view s);
Metric metric_from_string(std::string_view s);
ValidityIndex validity_index_from_string(std::string_view s);

/// Crisp partition of the rows of a feature matrix. Labels run 1..k in order of first
/// appearance; every cluster is non-empty.
struct Partition {
    std::vector<int> labels;
    int k = 0;
    ClusterMethod method = ClusterMethod::kmeans;
    /// Cluster centroids (k x p), row c-1 for label c.
    Eigen::MatrixXd centers;
    /// Row indices of the medoids (PAM only), entry c-1 for label c.
    std::vector<Eigen::Index> medoids;
    /// Final clustering objective: WSS for k-means and Ward, total dissimilarity for PAM.
    double objective = 0.0;
    /// Objective after every Lloyd iteration (k-means, best restart) or swap (PAM).
    std::vector<double> history;
};

Eigen::MatrixXd distance_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X, Metric metric = Metric::euclidean);

/// Centroids (k x p) of the clusters given by 1-based labels.
Eigen::MatrixXd cluster_centroids(const Eigen::Ref<const Eigen::MatrixXd>& X, std::span<const int> labels, int k);
double within_sum_of_squares(const Eigen::Ref<const Eigen::MatrixXd>& X, std::span<const int> labels, int k);

/// Lloyd's algorithm from k-means++ seeds; returns the best of `restarts` runs by WSS.
/// Throws std::invalid_argument when k exceeds the number of distinct rows.
Partition kmeans(const Eigen::Ref<const Eigen::MatrixXd>& X, int k, std::uint64_t seed, int restarts = 10);

/// Partitioning around medoids (BUILD then SWAP) on the chosen dissimilarity.
Partition pam(const Eigen::Ref<const Eigen::MatrixXd>& X, int k, Metric metric = Metric::euclidean);

struct Merge {
    Eigen::Index a;
    Eigen::Index b;
    /// Increase in within-cluster sum of squares caused by the merge.
    double cost;
};

/// Ward agglomeration (nearest-neighbour chain with Lance-Williams updates), merges sorted
/// by cost. Merge ids are representative row indices.
std::vector<Merge> ward_tree(const Eigen::Ref<const Eigen::MatrixXd>& X, Metric metric = Metric::euclidean);
Partition ward_cut(const Eigen::Ref<const Eigen::MatrixXd>& X, int k, Metric metric = Metric::euclidean);

/// Per-point silhouette widths; points in singleton clusters get 0.
Eigen::VectorXd silhouette_widths(const Eigen::Ref<const Eigen::MatrixXd>& D, std::span<const int> labels, int k);

double silhouette_index(const Eigen::Ref<const Eigen::MatrixXd>& X, const Partition& p, Metric metric = Metric::euclidean);
double calinski_harabasz(const Eigen::Ref<const Eigen::MatrixXd>& X, const Partition& p);
double dunn_index(const Eigen::Ref<const Eigen::MatrixXd>& X, const Partition& p, Metric metric = Metric::euclidean);
double xie_beni(const Eigen::Ref<const Eigen::MatrixXd>& X, const Partition& p);

struct ValidityEntry {
    ClusterMethod method;
    int k;
    double silhouette;
    double calinski_harabasz;
    double dunn;
    double xie_beni;

    double value(ValidityIndex v) const;
};

/// Index values over a grid of methods and cluster counts.
struct ValidityReport {
    std::vector<ClusterMethod> methods;
    std::vector<int> ks;
    std::vector<ValidityEntry> entries;

    const ValidityEntry& at(ClusterMethod m, int k) const;
    /// k preferred by one index for one method: highest value, except Xie-Beni (lowest).
    int best_k(ClusterMethod m, ValidityIndex v) const;
};

struct RegimeSearchOptions {
    Metric metric = Metric::euclidean;
    int kmeans_restarts = 10;
};

struct RegimeSearchResult {
    ValidityReport report;
    Partition selected;
};

/// Clusters X for every (method, k) and keeps the partition with the highest silhouette;
/// ties go to the higher Calinski-Harabasz, then higher Dunn, then lower Xie-Beni.
RegimeSearchResult regime_search(const Eigen::Ref<const Eigen::MatrixXd>& X, const std::vector<int>& ks,
                                 const std::vector<ClusterMethod>& methods, std::uint64_t seed,
                                 const RegimeSearchOptions& opts = {});

}  // namespace sysrisk
