#include "selfboost/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "selfboost/error.hpp"

namespace selfboost {

double pearson(const TimeSeries& x, const TimeSeries& y) {
    if (x.length() != y.length()) {
        throw Error(ErrorCode::LengthMismatch, "pearson: series lengths differ");
    }
    if (x.length() < 2) {
        throw Error(ErrorCode::InsufficientLength, "pearson: need at least 2 samples");
    }
    const double mx = x.mean();
    const double my = y.mean();
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (int i = 0; i < x.length(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    const double n = static_cast<double>(x.length());
    if (std::sqrt(sxx / n) < 1e-12 || std::sqrt(syy / n) < 1e-12) {
        throw Error(ErrorCode::ZeroVariance, "pearson: an argument has (near-)zero variance");
    }
    const double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
    return std::clamp(r, -1.0, 1.0);
}

SimilarityReport similarity_report(const TimeSeries& original, const ImfSet& imfs,
                                   bool fold_negative_correlation) {
    SimilarityReport report;
    const int n = imfs.num_components();
    report.correlations.reserve(static_cast<std::size_t>(n));
    report.distances.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double corr;
        double dist;
        try {
            corr = pearson(original, imfs.component(i));
            dist = fold_negative_correlation ? 1.0 - std::abs(corr) : 1.0 - corr;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ZeroVariance) throw;
            // constant component: no linear relation to the original
            corr = 0.0;
            dist = fold_negative_correlation ? 1.0 : 2.0;
        }
        report.correlations.push_back(corr);
        report.distances.push_back(dist);
    }
    return report;
}

namespace {

/// Linearly interpolated quantile of sorted data at probability p.
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const int lo = static_cast<int>(std::floor(pos));
    const int hi = static_cast<int>(std::ceil(pos));
    const double frac = pos - lo;
    return sorted[static_cast<std::size_t>(lo)] * (1.0 - frac) +
           sorted[static_cast<std::size_t>(hi)] * frac;
}

}  // namespace

std::vector<int> kmeans_1d(const std::vector<double>& distances, int k, std::uint64_t /*seed*/) {
    const int n = static_cast<int>(distances.size());
    if (k < 2) {
        throw Error(ErrorCode::ConfigInvalid, "kmeans_1d: k must be >= 2");
    }
    if (n < k) {
        throw Error(ErrorCode::TooFewPoints,
                    "kmeans_1d: " + std::to_string(n) + " points < k = " + std::to_string(k));
    }

    std::vector<double> sorted = distances;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> centroids(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        centroids[static_cast<std::size_t>(j)] =
            quantile_sorted(sorted, (2.0 * j + 1.0) / (2.0 * k));
    }

    std::vector<int> assignment(static_cast<std::size_t>(n), 0);
    const int max_rounds = 200;
    for (int round = 0; round < max_rounds; ++round) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::abs(distances[static_cast<std::size_t>(i)] - centroids[0]);
            for (int j = 1; j < k; ++j) {
                const double d = std::abs(distances[static_cast<std::size_t>(i)] -
                                          centroids[static_cast<std::size_t>(j)]);
                if (d < best_d) {  // ties keep the lower cluster id
                    best_d = d;
                    best = j;
                }
            }
            if (assignment[static_cast<std::size_t>(i)] != best) {
                assignment[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        if (!changed && round > 0) break;
        for (int j = 0; j < k; ++j) {
            double sum = 0.0;
            int count = 0;
            for (int i = 0; i < n; ++i) {
                if (assignment[static_cast<std::size_t>(i)] == j) {
                    sum += distances[static_cast<std::size_t>(i)];
                    ++count;
                }
            }
            if (count > 0) centroids[static_cast<std::size_t>(j)] = sum / count;
            // empty clusters keep their previous centroid
        }
        if (!changed) break;
    }

    // Relabel: non-empty clusters by ascending centroid, empty clusters last.
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int a : assignment) ++counts[static_cast<std::size_t>(a)];
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const bool ea = counts[static_cast<std::size_t>(a)] == 0;
        const bool eb = counts[static_cast<std::size_t>(b)] == 0;
        if (ea != eb) return eb;
        return centroids[static_cast<std::size_t>(a)] < centroids[static_cast<std::size_t>(b)];
    });
    std::vector<int> relabel(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) relabel[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] = j;
    for (int& a : assignment) a = relabel[static_cast<std::size_t>(a)];
    return assignment;
}

FeatureGrouping group_features(const SimilarityReport& report, int num_clusters,
                               bool drop_least_related) {
    const auto assignment = kmeans_1d(report.distances, num_clusters);
    const int max_label = *std::max_element(assignment.begin(), assignment.end());

    FeatureGrouping grouping;
    grouping.num_clusters = num_clusters;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const int label = assignment[i];
        const int idx = static_cast<int>(i);
        if (label == 0) {
            grouping.task_indices.push_back(idx);
        } else if (num_clusters > 2 && drop_least_related && label == max_label) {
            grouping.dropped_indices.push_back(idx);
        } else {
            grouping.view_indices.push_back(idx);
        }
    }
    return grouping;
}

}  // namespace selfboost
