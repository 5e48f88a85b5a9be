#include "sysrisk/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace sysrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_k(const Eigen::Ref<const Eigen::MatrixXd>& X, int k) {
    if (X.rows() == 0 || X.cols() == 0) throw std::invalid_argument("clustering: empty feature matrix");
    if (k < 1 || k > X.rows()) throw std::invalid_argument("clustering: k must lie in [1, rows], got " + std::to_string(k));
}

int count_distinct_rows(const Eigen::Ref<const Eigen::MatrixXd>& X) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(X.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    auto less = [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            if (X(a, j) != X(b, j)) return X(a, j) < X(b, j);
        return false;
    };
    std::sort(idx.begin(), idx.end(), less);
    int distinct = idx.empty() ? 0 : 1;
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (less(idx[i - 1], idx[i])) ++distinct;
    return distinct;
}

// Maps arbitrary non-negative cluster ids to 1..k by first appearance; returns the old id of each new label.
std::vector<int> relabel(std::vector<int>& labels) {
    std::vector<int> order;
    std::vector<int> map;
    for (int& l : labels) {
        if (l >= static_cast<int>(map.size())) map.resize(static_cast<std::size_t>(l) + 1, 0);
        if (map[static_cast<std::size_t>(l)] == 0) {
            order.push_back(l);
            map[static_cast<std::size_t>(l)] = static_cast<int>(order.size());
        }
        l = map[static_cast<std::size_t>(l)];
    }
    return order;
}

void check_labels(Eigen::Index n, std::span<const int> labels, int k) {
    if (static_cast<Eigen::Index>(labels.size()) != n) throw std::invalid_argument("partition size does not match the data");
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) {
        if (l < 1 || l > k) throw std::invalid_argument("partition label out of range");
        ++counts[static_cast<std::size_t>(l - 1)];
    }
    if (std::find(counts.begin(), counts.end(), 0) != counts.end()) throw std::invalid_argument("partition has an empty cluster");
}

double point_distance(const Eigen::Ref<const Eigen::MatrixXd>& X, Eigen::Index i, Eigen::Index j, Metric metric) {
    if (metric == Metric::manhattan) return (X.row(i) - X.row(j)).lpNorm<1>();
    return (X.row(i) - X.row(j)).norm();
}

double silhouette_from_distances(const Eigen::Ref<const Eigen::MatrixXd>& D, std::span<const int> labels, int k) {
    if (k < 2) throw std::invalid_argument("silhouette requires k >= 2");
    return silhouette_widths(D, labels, k).mean();
}

double dunn_from_distances(const Eigen::Ref<const Eigen::MatrixXd>& D, std::span<const int> labels, int k) {
    if (k < 2) throw std::invalid_argument("Dunn index requires k >= 2");
    const Eigen::Index n = D.rows();
    double min_between = kInf;
    double max_diameter = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) {
                max_diameter = std::max(max_diameter, D(i, j));
            } else {
                min_between = std::min(min_between, D(i, j));
            }
        }
    }
    if (max_diameter == 0.0) return kInf;
    return min_between / max_diameter;
}

}  // namespace

std::string_view to_string(ClusterMethod m) {
    switch (m) {
        case ClusterMethod::ward: return "ward";
        case ClusterMethod::pam: return "pam";
        case ClusterMethod::kmeans: return "kmeans";
    }
    return "unknown";
}

std::string_view to_string(Metric m) { return m == Metric::euclidean ? "euclidean" : "manhattan"; }

std::string_view to_string(ValidityIndex v) {
    switch (v) {
        case ValidityIndex::silhouette: return "silhouette";
        case ValidityIndex::calinski_harabasz: return "calinski_harabasz";
        case ValidityIndex::dunn: return "dunn";
        case ValidityIndex::xie_beni: return "xie_beni";
    }
    return "unknown";
}

ClusterMethod cluster_method_from_string(std::string_view s) {
    if (s == "ward") return ClusterMethod::ward;
    if (s == "pam") return ClusterMethod::pam;
    if (s == "kmeans" || s == "k-means") return ClusterMethod::kmeans;
    throw std::invalid_argument("unknown clustering method: " + std::string(s));
}

Metric metric_from_string(std::string_view s) {
    if (s == "euclidean") return Metric::euclidean;
    if (s == "manhattan") return Metric::manhattan;
    throw std::invalid_argument("unknown metric: " + std::string(s));
}

ValidityIndex validity_index_from_string(std::string_view s) {
    if (s == "silhouette") return ValidityIndex::silhouette;
    if (s == "calinski_harabasz") return ValidityIndex::calinski_harabasz;
    if (s == "dunn") return ValidityIndex::dunn;
    if (s == "xie_beni") return ValidityIndex::xie_beni;
    throw std::invalid_argument("unknown validity index: " + std::string(s));
}

Eigen::MatrixXd distance_matrix(const Eigen::Ref<const Eigen::MatrixXd>& X, Metric metric) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd D(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        D(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) D(i, j) = D(j, i) = point_distance(X, i, j, metric);
    }
    return D;
}

Eigen::MatrixXd cluster_centroids(const Eigen::Ref<const Eigen::MatrixXd>& X, std::span<const int> labels, int k) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(k, X.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const int c = labels[static_cast<std::size_t>(i)] - 1;
        C.row(c) += X.row(i);
        counts[c] += 1.0;
    }
    for (int c = 0; c < k; ++c)
        if (counts[c] > 0) C.row(c) /= counts[c];
    return C;
}

double within_sum_of_squares(const Eigen::Ref<const Eigen::MatrixXd>& X, std::span<const int> labels, int k) {
    const Eigen::MatrixXd C = cluster_centroids(X, labels, k);
    double w = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) w += (X.row(i) - C.row(labels[static_cast<std::size_t>(i)] - 1)).squaredNorm();
    return w;
}

Partition kmeans(const Eigen::Ref<const Eigen::MatrixXd>& X, int k, std::uint64_t seed, int restarts) {
    check_k(X, k);
    if (k > count_distinct_rows(X)) throw std::invalid_argument("kmeans: k exceeds the number of distinct rows");
    const Eigen::Index n = X.rows();
    std::mt19937_64 seeder(seed);

    Partition best;
    best.objective = kInf;
    for (int run = 0; run < std::max(restarts, 1); ++run) {
        std::mt19937_64 rng(seeder());
        // k-means++ seeding
        Eigen::MatrixXd C(k, X.cols());
        std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
        C.row(0) = X.row(pick(rng));
        Eigen::VectorXd d2 = (X.rowwise() - C.row(0)).rowwise().squaredNorm();
        for (int c = 1; c < k; ++c) {
            const double total = d2.sum();
            std::uniform_real_distribution<double> unif(0.0, total);
            double target = unif(rng);
            Eigen::Index chosen = -1;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (d2[i] <= 0.0) continue;
                chosen = i;
                target -= d2[i];
                if (target <= 0.0) break;
            }
            C.row(c) = X.row(chosen);
            d2 = d2.cwiseMin((X.rowwise() - C.row(c)).rowwise().squaredNorm());
        }

        std::vector<int> labels(static_cast<std::size_t>(n), -1);
        std::vector<double> history;
        for (int iter = 0; iter < 300; ++iter) {
            bool changed = false;
            Eigen::VectorXd dist(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                Eigen::Index c;
                dist[i] = (C.rowwise() - X.row(i)).rowwise().squaredNorm().minCoeff(&c);
                if (labels[static_cast<std::size_t>(i)] != static_cast<int>(c)) {
                    labels[static_cast<std::size_t>(i)] = static_cast<int>(c);
                    changed = true;
                }
            }
            // Refill empty clusters with the point farthest from its centre.
            std::vector<int> counts(static_cast<std::size_t>(k), 0);
            for (int l : labels) ++counts[static_cast<std::size_t>(l)];
            for (int c = 0; c < k; ++c) {
                if (counts[static_cast<std::size_t>(c)] > 0) continue;
                Eigen::Index far = 0;
                for (Eigen::Index i = 0; i < n; ++i)
                    if (counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] > 1 && dist[i] > dist[far]) far = i;
                --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
                labels[static_cast<std::size_t>(far)] = c;
                counts[static_cast<std::size_t>(c)] = 1;
                dist[far] = 0.0;
                changed = true;
            }
            std::vector<int> one_based(labels);
            for (int& l : one_based) ++l;
            C = cluster_centroids(X, one_based, k);
            history.push_back(within_sum_of_squares(X, one_based, k));
            if (!changed) break;
        }
        const double wss = history.back();
        if (wss < best.objective) {
            best.labels = labels;
            best.objective = wss;
            best.history = std::move(history);
        }
    }
    best.k = k;
    best.method = ClusterMethod::kmeans;
    relabel(best.labels);
    best.centers = cluster_centroids(X, best.labels, k);
    return best;
}

Partition pam(const Eigen::Ref<const Eigen::MatrixXd>& X, int k, Metric metric) {
    check_k(X, k);
    if (k > count_distinct_rows(X)) throw std::invalid_argument("pam: k exceeds the number of distinct rows");
    const Eigen::MatrixXd D = distance_matrix(X, metric);
    const Eigen::Index n = X.rows();

    std::vector<Eigen::Index> medoids;
    std::vector<char> is_medoid(static_cast<std::size_t>(n), 0);
    Eigen::Index first;
    D.colwise().sum().minCoeff(&first);
    medoids.push_back(first);
    is_medoid[static_cast<std::size_t>(first)] = 1;
    Eigen::VectorXd nearest = D.col(first);
    // BUILD
    while (static_cast<int>(medoids.size()) < k) {
        double best_gain = -1.0;
        Eigen::Index best_i = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (is_medoid[static_cast<std::size_t>(i)]) continue;
            const double gain = (nearest - D.col(i)).cwiseMax(0.0).sum();
            if (gain > best_gain) {
                best_gain = gain;
                best_i = i;
            }
        }
        medoids.push_back(best_i);
        is_medoid[static_cast<std::size_t>(best_i)] = 1;
        nearest = nearest.cwiseMin(D.col(best_i));
    }

    std::vector<double> history;
    auto assign = [&](Eigen::VectorXd& d1, Eigen::VectorXd& d2, std::vector<int>& which) {
        d1.setConstant(n, kInf);
        d2.setConstant(n, kInf);
        which.assign(static_cast<std::size_t>(n), 0);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (int m = 0; m < k; ++m) {
                const double v = D(j, medoids[static_cast<std::size_t>(m)]);
                if (v < d1[j]) {
                    d2[j] = d1[j];
                    d1[j] = v;
                    which[static_cast<std::size_t>(j)] = m;
                } else if (v < d2[j]) {
                    d2[j] = v;
                }
            }
        }
    };
    Eigen::VectorXd d1, d2;
    std::vector<int> which;
    assign(d1, d2, which);
    double cost = d1.sum();
    history.push_back(cost);
    // SWAP
    for (int pass = 0; pass < 1000; ++pass) {
        double best_delta = 0.0;
        int best_m = -1;
        Eigen::Index best_h = -1;
        for (int m = 0; m < k; ++m) {
            for (Eigen::Index h = 0; h < n; ++h) {
                if (is_medoid[static_cast<std::size_t>(h)]) continue;
                double delta = 0.0;
                for (Eigen::Index j = 0; j < n; ++j) {
                    const double without = which[static_cast<std::size_t>(j)] == m ? d2[j] : d1[j];
                    delta += std::min(D(j, h), without) - d1[j];
                }
                if (delta < best_delta) {
                    best_delta = delta;
                    best_m = m;
                    best_h = h;
                }
            }
        }
        if (best_m < 0 || best_delta > -1e-12 * (1.0 + cost)) break;
        is_medoid[static_cast<std::size_t>(medoids[static_cast<std::size_t>(best_m)])] = 0;
        medoids[static_cast<std::size_t>(best_m)] = best_h;
        is_medoid[static_cast<std::size_t>(best_h)] = 1;
        assign(d1, d2, which);
        cost = d1.sum();
        history.push_back(cost);
    }

    Partition p;
    p.k = k;
    p.method = ClusterMethod::pam;
    p.labels = which;
    const std::vector<int> order = relabel(p.labels);
    for (int old : order) p.medoids.push_back(medoids[static_cast<std::size_t>(old)]);
    p.centers = cluster_centroids(X, p.labels, k);
    p.objective = cost;
    p.history = std::move(history);
    return p;
}

std::vector<Merge> ward_tree(const Eigen::Ref<const Eigen::MatrixXd>& X, Metric metric) {
    const Eigen::Index n = X.rows();
    if (n == 0) throw std::invalid_argument("ward: empty feature matrix");
    // Merge cost of two singletons is d^2 / 2; Lance-Williams keeps the costs exact.
    Eigen::MatrixXd W = distance_matrix(X, metric).array().square() * 0.5;
    std::vector<double> size(static_cast<std::size_t>(n), 1.0);
    std::vector<char> active(static_cast<std::size_t>(n), 1);
    std::vector<Merge> merges;
    std::vector<Eigen::Index> chain;
    Eigen::Index remaining = n;
    while (remaining > 1) {
        if (chain.empty()) {
            Eigen::Index first = 0;
            while (!active[static_cast<std::size_t>(first)]) ++first;
            chain.push_back(first);
        }
        const Eigen::Index a = chain.back();
        const Eigen::Index prev = chain.size() >= 2 ? chain[chain.size() - 2] : -1;
        Eigen::Index b = prev;
        double best = prev >= 0 ? W(a, prev) : kInf;
        for (Eigen::Index c = 0; c < n; ++c) {
            if (c == a || !active[static_cast<std::size_t>(c)]) continue;
            if (W(a, c) < best) {
                best = W(a, c);
                b = c;
            }
        }
        if (b != prev) {
            chain.push_back(b);
            continue;
        }
        chain.pop_back();
        chain.pop_back();
        const Eigen::Index keep = std::min(a, b);
        const Eigen::Index drop = std::max(a, b);
        merges.push_back({keep, drop, best});
        const double na = size[static_cast<std::size_t>(a)];
        const double nb = size[static_cast<std::size_t>(b)];
        for (Eigen::Index c = 0; c < n; ++c) {
            if (c == a || c == b || !active[static_cast<std::size_t>(c)]) continue;
            const double nc = size[static_cast<std::size_t>(c)];
            const double v = ((na + nc) * W(a, c) + (nb + nc) * W(b, c) - nc * W(a, b)) / (na + nb + nc);
            W(keep, c) = W(c, keep) = v;
        }
        size[static_cast<std::size_t>(keep)] = na + nb;
        active[static_cast<std::size_t>(drop)] = 0;
        --remaining;
    }
    std::stable_sort(merges.begin(), merges.end(), [](const Merge& x, const Merge& y) { return x.cost < y.cost; });
    return merges;
}

Partition ward_cut(const Eigen::Ref<const Eigen::MatrixXd>& X, int k, Metric metric) {
    check_k(X, k);
    const Eigen::Index n = X.rows();
    const auto merges = ward_tree(X, metric);
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](Eigen::Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (Eigen::Index i = 0; i < n - k; ++i) {
        const Eigen::Index ra = find(merges[static_cast<std::size_t>(i)].a);
        const Eigen::Index rb = find(merges[static_cast<std::size_t>(i)].b);
        parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
    }
    Partition p;
    p.k = k;
    p.method = ClusterMethod::ward;
    p.labels.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) p.labels[static_cast<std::size_t>(i)] = static_cast<int>(find(i));
    relabel(p.labels);
    p.centers = cluster_centroids(X, p.labels, k);
    p.objective = within_sum_of_squares(X, p.labels, k);
    return p;
}

Eigen::VectorXd silhouette_widths(const Eigen::Ref<const Eigen::MatrixXd>& D, std::span<const int> labels, int k) {
    const Eigen::Index n = D.rows();
    check_labels(n, labels, k);
    std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
    for (int l : labels) counts[static_cast<std::size_t>(l - 1)] += 1.0;
    Eigen::VectorXd s(n);
    std::vector<double> sums(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i) {
        const int own = labels[static_cast<std::size_t>(i)] - 1;
        if (counts[static_cast<std::size_t>(own)] <= 1.0) {
            s[i] = 0.0;
            continue;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) sums[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)] - 1)] += D(i, j);
        const double a = sums[static_cast<std::size_t>(own)] / (counts[static_cast<std::size_t>(own)] - 1.0);
        double b = kInf;
        for (int c = 0; c < k; ++c)
            if (c != own) b = std::min(b, sums[static_cast<std::size_t>(c)] / counts[static_cast<std::size_t>(c)]);
        const double denom = std::max(a, b);
        s[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return s;
}

double silhouette_index(const Eigen::Ref<const Eigen::MatrixXd>& X, const Partition& p, Metric metric) {
    return silhouette_from_distances(distance_matrix(X, metric), p.labels, p.k);
}

double calinski_harabasz(const Eigen::Ref<const Eigen::MatrixXd>& X, const Partition& p) {
    const Eigen::Index n = X.rows();
    const int k = p.k;
    if (k < 2 || k >= n) throw std::invalid_argument("Calinski-Harabasz requires 2 <= k < n");
    check_labels(n, p.labels, k);
    const Eigen::MatrixXd C = cluster_centroids(X, p.labels, k);
    const Eigen::RowVectorXd grand = X.colwise().mean();
    std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
    for (int l : p.labels) counts[static_cast<std::size_t>(l - 1)] += 1.0;
    double between = 0.0;
    for (int c = 0; c < k; ++c) between += counts[static_cast<std::size_t>(c)] * (C.row(c) - grand).squaredNorm();
    double within = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) within += (X.row(i) - C.row(p.labels[static_cast<std::size_t>(i)] - 1)).squaredNorm();
    if (within == 0.0) return kInf;
    return (between / (k - 1)) / (within / static_cast<double>(n - k));
}

double dunn_index(const Eigen::Ref<const Eigen::MatrixXd>& X, const Partition& p, Metric metric) {
    check_labels(X.rows(), p.labels, p.k);
    return dunn_from_distances(distance_matrix(X, metric), p.labels, p.k);
}

double xie_beni(const Eigen::Ref<const Eigen::MatrixXd>& X, const Partition& p) {
    const int k = p.k;
    if (k < 2) throw std::invalid_argument("Xie-Beni requires k >= 2");
    check_labels(X.rows(), p.labels, k);
    const Eigen::MatrixXd C = cluster_centroids(X, p.labels, k);
    double within = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) within += (X.row(i) - C.row(p.labels[static_cast<std::size_t>(i)] - 1)).squaredNorm();
    double min_sep = kInf;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) min_sep = std::min(min_sep, (C.row(a) - C.row(b)).squaredNorm());
    if (min_sep == 0.0) return kInf;
    return within / (static_cast<double>(X.rows()) * min_sep);
}

double ValidityEntry::value(ValidityIndex v) const {
    switch (v) {
        case ValidityIndex::silhouette: return silhouette;
        case ValidityIndex::calinski_harabasz: return calinski_harabasz;
        case ValidityIndex::dunn: return dunn;
        case ValidityIndex::xie_beni: return xie_beni;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

const ValidityEntry& ValidityReport::at(ClusterMethod m, int k) const {
    for (const auto& e : entries)
        if (e.method == m && e.k == k) return e;
    throw std::out_of_range("no validity entry for " + std::string(to_string(m)) + " k=" + std::to_string(k));
}

int ValidityReport::best_k(ClusterMethod m, ValidityIndex v) const {
    int best = -1;
    double best_val = 0.0;
    for (const auto& e : entries) {
        if (e.method != m) continue;
        double val = e.value(v);
        if (v == ValidityIndex::xie_beni) val = -val;
        if (best < 0 || val > best_val) {
            best = e.k;
            best_val = val;
        }
    }
    return best;
}

RegimeSearchResult regime_search(const Eigen::Ref<const Eigen::MatrixXd>& X, const std::vector<int>& ks,
                                 const std::vector<ClusterMethod>& methods, std::uint64_t seed, const RegimeSearchOptions& opts) {
    if (ks.empty() || methods.empty()) throw std::invalid_argument("regime_search: empty (method, k) grid");
    for (int k : ks)
        if (k < 2) throw std::invalid_argument("regime_search: every k must be >= 2");
    const Eigen::MatrixXd D = distance_matrix(X, opts.metric);

    RegimeSearchResult out;
    out.report.methods = methods;
    out.report.ks = ks;
    bool have = false;
    const ValidityEntry* chosen = nullptr;
    std::vector<Partition> parts;
    parts.reserve(methods.size() * ks.size());
    for (ClusterMethod m : methods) {
        for (int k : ks) {
            Partition p;
            switch (m) {
                case ClusterMethod::kmeans: p = kmeans(X, k, seed, opts.kmeans_restarts); break;
                case ClusterMethod::pam: p = pam(X, k, opts.metric); break;
                case ClusterMethod::ward: p = ward_cut(X, k, opts.metric); break;
            }
            ValidityEntry e{m, k, silhouette_from_distances(D, p.labels, k), calinski_harabasz(X, p), dunn_from_distances(D, p.labels, k),
                            xie_beni(X, p)};
            out.report.entries.push_back(e);
            parts.push_back(std::move(p));
        }
    }
    std::size_t best_idx = 0;
    auto better = [](const ValidityEntry& a, const ValidityEntry& b) {
        if (a.silhouette != b.silhouette) return a.silhouette > b.silhouette;
        if (a.calinski_harabasz != b.calinski_harabasz) return a.calinski_harabasz > b.calinski_harabasz;
        if (a.dunn != b.dunn) return a.dunn > b.dunn;
        return a.xie_beni < b.xie_beni;
    };
    for (std::size_t i = 0; i < out.report.entries.size(); ++i) {
        if (!have || better(out.report.entries[i], *chosen)) {
            chosen = &out.report.entries[i];
            best_idx = i;
            have = true;
        }
    }
    out.selected = std::move(parts[best_idx]);
    return out;
}

}  // namespace sysrisk
