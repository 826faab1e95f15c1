#pragma once

#include <cstdint>
#include <vector>

#include "selfboost/eemd.hpp"
#include "selfboost/time_series.hpp"

namespace selfboost {

/// Per-component similarity against the original series. Components are the
/// IMFs in order followed by the residual. distance = 1 - correlation
/// (bounded, monotone in similarity); with fold_negative_correlation the
/// distance is 1 - |correlation|. A constant component, whose correlation is
/// undefined, records correlation 0 and the maximum distance for the chosen
/// convention (2.0 unfolded, 1.0 folded).
struct SimilarityReport {
    std::vector<double> correlations;
    std::vector<double> distances;
};

/// Partition of component indices (IMFs then residual) into the multi-task
/// group, the multi-view group, and a dropped set.
struct FeatureGrouping {
    std::vector<int> task_indices;
    std::vector<int> view_indices;
    std::vector<int> dropped_indices;
    int num_clusters = 2;
};

/// Standard Pearson correlation coefficient, clamped to [-1, 1].
/// Throws ZeroVariance when either argument has (near-)zero variance.
double pearson(const TimeSeries& x, const TimeSeries& y);

SimilarityReport similarity_report(const TimeSeries& original, const ImfSet& imfs,
                                   bool fold_negative_correlation = false);

/// Lloyd's algorithm on scalars with deterministic evenly spaced quantile
/// initialization. Clusters are relabeled so cluster 0 has the smallest
/// centroid; empty clusters sort last. The seed parameter is kept for
/// interface stability but the run is fully deterministic without it.
/// Throws TooFewPoints when there are fewer points than clusters.
std::vector<int> kmeans_1d(const std::vector<double>& distances, int k, std::uint64_t seed = 0);

/// Cluster the report's distances and map clusters to roles: cluster 0
/// (most related) -> tasks; the highest-centroid cluster -> dropped when
/// requested and num_clusters > 2; everything else -> views.
FeatureGrouping group_features(const SimilarityReport& report, int num_clusters = 2,
                               bool drop_least_related = false);

}  // namespace selfboost
