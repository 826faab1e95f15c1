#pragma once

#include <vector>

#include "selfboost/eemd.hpp"
#include "selfboost/selection.hpp"
#include "selfboost/time_series.hpp"
#include "selfboost/windowing.hpp"

namespace selfboost {

/// Normalized model channels: the original series first, then every
/// decomposition component in order (residual last). Stats come from the
/// training segment only -- the samples any training window touches.
struct PreparedChannels {
    std::vector<TimeSeries> channels;
    std::vector<NormStats> stats;
    int train_segment_length = 0;
};

/// Z-score every channel with training-segment statistics. The original
/// series must have nonzero variance there (ZeroVariance otherwise);
/// degenerate component channels fall back to a mean shift so unused or
/// dropped components cannot abort a run.
PreparedChannels normalize_channels(const TimeSeries& original, const ImfSet& components, int lag,
                                    int horizon, const SplitSpec& split);

/// Dataset task layout for a grouping: the main task (channel 0, the
/// original) followed by one auxiliary task per related component.
std::vector<int> dataset_task_indices(const FeatureGrouping& grouping);

/// Windows over the prepared channels with the grouping's task layout.
WindowedDataset build_model_dataset(const PreparedChannels& prepared,
                                    const FeatureGrouping& grouping, int lag, int horizon);

}  // namespace selfboost
