#include "selfboost/windowing.hpp"

#include <cmath>

#include "selfboost/error.hpp"

namespace selfboost {

void SplitSpec::validate() const {
    for (double f : {train_fraction, validation_fraction, test_fraction}) {
        if (!(f > 0.0 && f < 1.0)) {
            throw Error(ErrorCode::ConfigInvalid, "split fractions must lie in (0,1)");
        }
    }
    if (std::abs(train_fraction + validation_fraction + test_fraction - 1.0) > 1e-9) {
        throw Error(ErrorCode::ConfigInvalid, "split fractions must sum to 1");
    }
}

std::array<int, 3> split_sizes(int num_samples, const SplitSpec& spec) {
    spec.validate();
    const int n_val = static_cast<int>(std::floor(spec.validation_fraction * num_samples));
    const int n_test = static_cast<int>(std::floor(spec.test_fraction * num_samples));
    const int n_train = num_samples - n_val - n_test;
    return {n_train, n_val, n_test};
}

WindowedDataset build_windows(const std::vector<TimeSeries>& series_list,
                              const std::vector<int>& task_indices, int lag, int horizon) {
    if (series_list.empty()) {
        throw Error(ErrorCode::InsufficientLength, "build_windows: no series given");
    }
    if (lag < 1 || horizon < 1) {
        throw Error(ErrorCode::ConfigInvalid, "build_windows: lag and horizon must be >= 1");
    }
    const int T = series_list.front().length();
    for (const auto& s : series_list) {
        if (s.length() != T) {
            throw Error(ErrorCode::LengthMismatch, "build_windows: series '" + s.name() + "' has length " +
                                                       std::to_string(s.length()) + ", expected " +
                                                       std::to_string(T));
        }
    }
    if (T < lag + horizon) {
        throw Error(ErrorCode::InsufficientLength,
                    "build_windows: series length " + std::to_string(T) + " < lag + horizon = " +
                        std::to_string(lag + horizon));
    }
    const int num_channels = static_cast<int>(series_list.size());
    for (int idx : task_indices) {
        if (idx < 0 || idx >= num_channels) {
            throw Error(ErrorCode::ConfigInvalid,
                        "build_windows: task index " + std::to_string(idx) + " out of range");
        }
    }

    const int num_samples = T - lag - horizon + 1;
    const int num_tasks = static_cast<int>(task_indices.size());

    WindowedDataset ds;
    ds.lag = lag;
    ds.horizon = horizon;
    ds.inputs = Tensor({num_samples, lag, num_channels});
    ds.targets = Tensor({num_samples, num_tasks, horizon});
    ds.task_channels = task_indices;
    for (const auto& s : series_list) ds.channel_names.push_back(s.name());
    for (int idx : task_indices) ds.task_names.push_back(series_list[static_cast<std::size_t>(idx)].name());

    for (int s = 0; s < num_samples; ++s) {
        for (int l = 0; l < lag; ++l) {
            for (int c = 0; c < num_channels; ++c) {
                ds.inputs.at(s, l, c) = series_list[static_cast<std::size_t>(c)][s + l];
            }
        }
        for (int j = 0; j < num_tasks; ++j) {
            const auto& src = series_list[static_cast<std::size_t>(task_indices[static_cast<std::size_t>(j)])];
            for (int h = 0; h < horizon; ++h) {
                ds.targets.at(s, j, h) = src[s + lag + h];
            }
        }
    }
    return ds;
}

namespace {

WindowedDataset slice_dataset(const WindowedDataset& ds, int begin, int count) {
    WindowedDataset out;
    out.lag = ds.lag;
    out.horizon = ds.horizon;
    out.channel_names = ds.channel_names;
    out.task_names = ds.task_names;
    out.task_channels = ds.task_channels;
    const int lag = ds.lag;
    const int nc = ds.num_channels();
    const int nt = ds.num_tasks();
    const int H = ds.horizon;
    out.inputs = Tensor({count, lag, nc});
    out.targets = Tensor({count, nt, H});
    for (int s = 0; s < count; ++s) {
        for (int l = 0; l < lag; ++l)
            for (int c = 0; c < nc; ++c) out.inputs.at(s, l, c) = ds.inputs.at(begin + s, l, c);
        for (int j = 0; j < nt; ++j)
            for (int h = 0; h < H; ++h) out.targets.at(s, j, h) = ds.targets.at(begin + s, j, h);
    }
    return out;
}

}  // namespace

std::array<WindowedDataset, 3> chronological_split(const WindowedDataset& dataset,
                                                   const SplitSpec& spec) {
    const int n = dataset.num_samples();
    if (n < 3) {
        throw Error(ErrorCode::TooFewWindows,
                    "chronological_split: need at least 3 windows, got " + std::to_string(n));
    }
    const auto sizes = split_sizes(n, spec);
    for (int sz : sizes) {
        if (sz < 1) {
            throw Error(ErrorCode::TooFewWindows, "chronological_split: a split would be empty");
        }
    }
    return {slice_dataset(dataset, 0, sizes[0]), slice_dataset(dataset, sizes[0], sizes[1]),
            slice_dataset(dataset, sizes[0] + sizes[1], sizes[2])};
}

}  // namespace selfboost
