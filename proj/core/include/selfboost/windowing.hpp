#pragma once

#include <array>
#include <string>
#include <vector>

#include "selfboost/tensor.hpp"
#include "selfboost/time_series.hpp"

namespace selfboost {

/// Supervised view of aligned series: sliding input windows of `lag` samples
/// over every channel, paired with `horizon` future samples of each task
/// channel. Window s covers input samples [s, s+lag) and target samples
/// [s+lag, s+lag+horizon) -- strictly ordered, no overlap between a window's
/// inputs and its own targets.
struct WindowedDataset {
    Tensor inputs;   // [num_samples, lag, num_channels]
    Tensor targets;  // [num_samples, num_tasks, horizon]
    int lag = 0;
    int horizon = 0;
    std::vector<std::string> channel_names;
    std::vector<std::string> task_names;
    std::vector<int> task_channels;  // channel index backing each task

    int num_samples() const { return inputs.empty() ? 0 : inputs.dim(0); }
    int num_channels() const { return inputs.empty() ? 0 : inputs.dim(2); }
    int num_tasks() const { return targets.empty() ? 0 : targets.dim(1); }
};

/// Chronological train/validation/test fractions. Must sum to 1 within 1e-9.
struct SplitSpec {
    double train_fraction = 0.6;
    double validation_fraction = 0.2;
    double test_fraction = 0.2;

    void validate() const;
};

/// floor(fraction * n) for validation and test, remainder to train.
std::array<int, 3> split_sizes(int num_samples, const SplitSpec& spec);

/// Build windows from equally long series. `task_indices` name the channels
/// whose futures become targets, in task order.
/// Throws LengthMismatch / InsufficientLength.
WindowedDataset build_windows(const std::vector<TimeSeries>& series_list,
                              const std::vector<int>& task_indices, int lag, int horizon);

/// Contiguous, order-preserving partition into train/validation/test.
/// Throws TooFewWindows if any split would be empty.
std::array<WindowedDataset, 3> chronological_split(const WindowedDataset& dataset,
                                                   const SplitSpec& spec);

}  // namespace selfboost
