#include "selfboost/prepare.hpp"

#include <algorithm>

#include "selfboost/error.hpp"

namespace selfboost {

PreparedChannels normalize_channels(const TimeSeries& original, const ImfSet& components, int lag,
                                    int horizon, const SplitSpec& split) {
    const int T = original.length();
    if (T < lag + horizon + 2) {
        throw Error(ErrorCode::InsufficientLength, "series too short for the requested lag/horizon");
    }
    const int num_windows = T - lag - horizon + 1;
    const auto sizes = split_sizes(num_windows, split);
    const int seg_len = sizes[0] + lag + horizon - 1;

    PreparedChannels out;
    out.train_segment_length = seg_len;

    auto train_prefix = [&](const TimeSeries& s) {
        return s.with_values(std::vector<double>(s.values().begin(), s.values().begin() + seg_len));
    };

    auto [norm_original, stats_original] = zscore_normalize(original, train_prefix(original));
    out.channels.push_back(norm_original.renamed("original"));
    out.stats.push_back(stats_original);

    for (int i = 0; i < components.num_components(); ++i) {
        const TimeSeries& comp = components.component(i);
        if (comp.length() != T) {
            throw Error(ErrorCode::LengthMismatch, "component length differs from the original series");
        }
        const TimeSeries prefix = train_prefix(comp);
        if (prefix.std_dev() < 1e-12) {
            NormStats stats{prefix.mean(), 1.0};
            out.channels.push_back(comp.with_values(apply_norm(comp.values(), stats)));
            out.stats.push_back(stats);
        } else {
            auto [norm, stats] = zscore_normalize(comp, prefix);
            out.channels.push_back(std::move(norm));
            out.stats.push_back(stats);
        }
    }
    return out;
}

std::vector<int> dataset_task_indices(const FeatureGrouping& grouping) {
    std::vector<int> tasks{0};
    std::vector<int> related = grouping.task_indices;
    std::sort(related.begin(), related.end());
    for (int idx : related) tasks.push_back(1 + idx);
    return tasks;
}

WindowedDataset build_model_dataset(const PreparedChannels& prepared,
                                    const FeatureGrouping& grouping, int lag, int horizon) {
    return build_windows(prepared.channels, dataset_task_indices(grouping), lag, horizon);
}

}  // namespace selfboost
